//! Restoring oversubtracted speech with a two-mask enhancer, plus the
//! streaming, simulation and evaluation machinery around it.

pub mod config;
pub mod dsp;
pub mod eval;
pub mod losses;
pub mod pipeline;
pub mod resf;
pub mod stream;
pub mod synth;
pub mod twomask;

use thiserror::Error;

/// How a failure should be reported: maps onto process exit codes and
/// HTTP error kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::Numeric => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Io => "io",
            ErrorKind::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dsp(#[from] dsp::DspError),
    #[error(transparent)]
    Resf(#[from] resf::ResfError),
    #[error(transparent)]
    TwoMask(#[from] twomask::TwoMaskError),
    #[error(transparent)]
    Loss(#[from] losses::LossError),
    #[error(transparent)]
    Stream(#[from] stream::StreamError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
    #[error(transparent)]
    ModelLoad(#[from] twomask::LoadError),
}

fn dsp_kind(e: &dsp::DspError) -> ErrorKind {
    match e {
        dsp::DspError::Wav(_) => ErrorKind::Io,
        dsp::DspError::NonFinite(_) => ErrorKind::Numeric,
        _ => ErrorKind::Validation,
    }
}

fn twomask_kind(e: &twomask::TwoMaskError) -> ErrorKind {
    match e {
        twomask::TwoMaskError::Dsp(d) => dsp_kind(d),
        twomask::TwoMaskError::NonFiniteLoss { .. } => ErrorKind::Numeric,
        _ => ErrorKind::Validation,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Dsp(e) => dsp_kind(e),
            Error::Resf(resf::ResfError::Dsp(e)) => dsp_kind(e),
            Error::TwoMask(e) => twomask_kind(e),
            Error::Loss(losses::LossError::Dsp(e)) => dsp_kind(e),
            Error::Eval(
                eval::EvalError::Io(_) | eval::EvalError::AsrNotFound(_) | eval::EvalError::AsrFailed { .. },
            ) => ErrorKind::Io,
            Error::Config(config::ConfigError::Io { .. }) => ErrorKind::Io,
            Error::Pipeline(pipeline::PipelineError::TwoMask(e)) => twomask_kind(e),
            Error::ModelLoad(twomask::LoadError::Io(_)) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
