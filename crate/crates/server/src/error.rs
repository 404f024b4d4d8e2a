use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use twomask_core::ErrorKind;
use twomask_proto::ErrorBody;

/// An error on its way to becoming an HTTP response.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, kind: "validation", message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self { status: StatusCode::NOT_FOUND, kind: "not_found", message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, kind: "io", message: message.into() }
    }
}

impl<E: Into<twomask_core::Error>> From<E> for ApiError {
    fn from(e: E) -> Self {
        let e: twomask_core::Error = e.into();
        let kind = e.kind();
        let status = match kind {
            ErrorKind::Validation => StatusCode::BAD_REQUEST,
            ErrorKind::Numeric => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Io => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self { status, kind: kind.as_str(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { kind: self.kind.to_owned(), message: self.message };
        (self.status, Json(body)).into_response()
    }
}

/// Malformed JSON is a validation error with the usual error body.
pub fn rejected(r: JsonRejection) -> ApiError {
    ApiError { status: r.status(), kind: "validation", message: r.body_text() }
}
