use twomask_client::ClientError;
use twomask_core::ErrorKind;

/// A failure with the exit code it maps to: 1 validation, 2 I/O, 3 numeric.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        let code = match e.kind() {
            "io" => 2,
            "numeric" => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<twomask_core::Error> for CliError {
    fn from(e: twomask_core::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::Numeric => 3,
        };
        Self { code, message: e.to_string() }
    }
}
