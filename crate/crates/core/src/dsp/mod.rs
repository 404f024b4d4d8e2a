//! Time-frequency analysis and synthesis shared by every other module.

mod mel;
mod spectrogram;
mod stft;
mod wav;
mod waveform;

pub use mel::{hz_to_mel, mel_project, mel_to_hz, MelFilterbank, MelSpectrogram, DISCRIMINATOR_MEL_BANDS};
pub use spectrogram::{decompose, recompose, ComplexSpectrogram, MagnitudeSpectrogram, PhaseSpectrogram, TfGrid};
pub use stft::{istft, istft_trimmed, stft, stft_padded, Framing, StftConfig, WindowKind};
pub use wav::{read_wav, write_wav};
pub use waveform::{Waveform, DEFAULT_SAMPLE_RATE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("invalid STFT config: {0}")]
    InvalidConfig(String),
    #[error("window/hop pair violates the constant-overlap-add condition (deviation {deviation:.3e})")]
    NotCola { deviation: f64 },
    #[error("waveform too short: need at least {min} samples, got {actual}")]
    TooShort { min: usize, actual: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(u32),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("wav: {0}")]
    Wav(String),
}
