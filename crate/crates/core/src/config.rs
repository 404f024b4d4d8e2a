//! The single pipeline configuration file. Parsing is strict: an unknown
//! key anywhere is an error, since a mistyped DSP parameter would otherwise
//! be silently replaced by its default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{StftConfig, DEFAULT_SAMPLE_RATE};
use crate::eval::AUDIO_PLACEHOLDER;
use crate::losses::{LossWeights, QualityConfig};
use crate::resf::{FfrBand, SubtractionConfig};
use crate::stream::StreamGeometry;
use crate::twomask::{EnhanceConfig, TrainHyper};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

/// The `[losses]` section: generator loss weights plus the endpoints of the
/// quality map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossesSection {
    pub w_mag: f64,
    pub w_ri: f64,
    pub w_time: f64,
    pub w_gan: f64,
    pub quality_min_db: f64,
    pub quality_max_db: f64,
    pub quality_n_mels: usize,
}

impl Default for LossesSection {
    fn default() -> Self {
        let (w, q) = (LossWeights::default(), QualityConfig::default());
        Self {
            w_mag: w.w_mag,
            w_ri: w.w_ri,
            w_time: w.w_time,
            w_gan: w.w_gan,
            quality_min_db: q.min_db,
            quality_max_db: q.max_db,
            quality_n_mels: q.n_mels,
        }
    }
}

impl LossesSection {
    pub fn weights(&self) -> LossWeights {
        LossWeights { w_mag: self.w_mag, w_ri: self.w_ri, w_time: self.w_time, w_gan: self.w_gan }
    }

    pub fn quality(&self) -> QualityConfig {
        QualityConfig { min_db: self.quality_min_db, max_db: self.quality_max_db, n_mels: self.quality_n_mels }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub sample_rate: u32,
    /// Power-law magnitude compression before masking; absent means none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compression: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_path: Option<PathBuf>,
    /// External recognizer, with `{audio}` standing for the WAV path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asr_command: Option<String>,
    pub stft: StftConfig,
    pub ffr: FfrBand,
    pub subtraction: SubtractionConfig,
    pub losses: LossesSection,
    pub stream: StreamGeometry,
    pub train: TrainHyper,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            compression: None,
            model_path: None,
            asr_command: None,
            stft: StftConfig::default(),
            ffr: FfrBand::default(),
            subtraction: SubtractionConfig::default(),
            losses: LossesSection::default(),
            stream: StreamGeometry::default(),
            train: TrainHyper::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        if self.sample_rate == 0 {
            return Err(ConfigError::Invalid("sample_rate must be > 0".into()));
        }
        self.stft.validate().map_err(|e| invalid(&e))?;
        self.ffr.bins(self.stft.n_fft, self.sample_rate).map_err(|e| invalid(&e))?;
        self.subtraction.validate().map_err(|e| invalid(&e))?;
        self.losses.weights().validate().map_err(|e| invalid(&e))?;
        let q = self.losses.quality();
        if q.max_db.partial_cmp(&q.min_db) != Some(std::cmp::Ordering::Greater) || q.n_mels == 0 {
            return Err(ConfigError::Invalid(format!("bad quality settings {q:?}")));
        }
        self.stream.validate(self.sample_rate).map_err(|e| invalid(&e))?;
        self.train.validate().map_err(|e| invalid(&e))?;
        if let Some(c) = self.compression {
            if !(c > 0.0 && c.is_finite()) {
                return Err(ConfigError::Invalid(format!("compression must be > 0, got {c}")));
            }
        }
        if let Some(cmd) = &self.asr_command {
            if !cmd.contains(AUDIO_PLACEHOLDER) {
                return Err(ConfigError::Invalid(format!("asr_command lacks {AUDIO_PLACEHOLDER}")));
            }
        }
        Ok(())
    }

    pub fn enhance_config(&self) -> EnhanceConfig {
        EnhanceConfig { stft: self.stft, ffr: self.ffr, compression: self.compression }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = PipelineConfig {
            seed: 42,
            compression: Some(0.3),
            asr_command: Some("whisper {audio}".into()),
            ..Default::default()
        };
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(PipelineConfig::from_toml("sead = 1"), Err(ConfigError::Parse(_))));
        let nested = "[subtraction]\noversubtraction_factor = 3.0\nbase_factor = 1.0\nspectral_flor = 0.1\n";
        assert!(matches!(PipelineConfig::from_toml(nested), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn partial_sections_fill_in_defaults() {
        let cfg = PipelineConfig::from_toml("[losses]\nw_gan = 0.5\nquality_max_db = 30.0\n").unwrap();
        assert_eq!(cfg.losses.weights(), LossWeights { w_gan: 0.5, ..LossWeights::default() });
        assert_eq!(cfg.losses.quality().max_db, 30.0);
        assert_eq!(cfg.losses.quality().min_db, -10.0);
    }

    #[test]
    fn nested_invariants_are_checked() {
        assert!(matches!(
            PipelineConfig::from_toml("[stft]\nn_fft = 400\nhop = 300\nwindow = \"hann\"\n"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(PipelineConfig::from_toml("asr_command = \"whisper\""), Err(ConfigError::Invalid(_))));
        assert!(matches!(PipelineConfig::from_toml("sample_rate = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(PipelineConfig::from_toml("[losses]\nw_mag = -1.0\n"), Err(ConfigError::Invalid(_))));
    }
}
