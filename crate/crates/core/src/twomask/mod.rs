//! Compensation-then-denoise enhancement.
//!
//! A [`MaskPair`] holds an additive compensation mask restricted to the FFR
//! bins and a multiplicative denoising mask in `[0, 1]`. Applying the pair
//! computes `(Y_m + irm1) ⊙ irm2` and reattaches the noisy phase. Adding
//! before multiplying matters: bins that oversubtraction drove to zero stay
//! zero under any purely multiplicative mask.

mod enhancer;
mod masks;
mod oracle;
mod persist;
mod toy;

pub use enhancer::{EnhanceConfig, MaskEnhancer};
pub use masks::{apply_two_mask, IdentityGenerator, MaskGenerator, MaskPair};
pub use oracle::{oracle_masks, OracleGenerator, ORACLE_EPSILON};
pub use persist::{LoadError, MODEL_MAGIC, MODEL_VERSION};
pub use toy::{ffr_magnitude_mse, toy_generate, toy_train, ToyGeneratorModel, TrainHyper, TrainOutcome};

use thiserror::Error;

use crate::dsp::DspError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoMaskError {
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mask invariant violated: {0}")]
    InvalidMask(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("non-finite training loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("invalid FFR band: {0}")]
    InvalidBand(String),
}
