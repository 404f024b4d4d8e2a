//! Simulation of robot ego-speech filtering: global-SNR mixing, spectral
//! subtraction with oversubtraction inside the fundamental frequency range
//! (FFR), and distortion/target/mixture triplet generation.

mod band;
mod manifest;
mod mix;
mod subtract;
mod triplet;

pub use band::{band_energy, band_energy_ratio, FfrBand};
pub use manifest::{parse_manifest, ManifestRow, NINE_GLOBAL_SNRS_DB};
pub use mix::{measured_snr_db, mix_at_snr, mix_at_snr_parts, tile_noise, MixParts};
pub use subtract::{spectral_subtract, subtract_spectrum, SubtractionConfig};
pub use triplet::{make_triplet, Triplet, TripletSummary};

use thiserror::Error;

use crate::dsp::DspError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResfError {
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("noise is silent (RMS = 0)")]
    SilentNoise,
    #[error("speech is silent (RMS = 0)")]
    SilentSpeech,
    #[error("length mismatch: {0} vs {1} samples")]
    LengthMismatch(usize, usize),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),
    #[error("invalid FFR band: {0}")]
    InvalidBand(String),
    #[error("invalid subtraction config: {0}")]
    InvalidSubtraction(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}
