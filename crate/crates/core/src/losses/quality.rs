//! Frequency-weighted segmental SNR over mel bands, mapped affinely onto
//! `[0, 1]`. A stand-in for a perceptual quality score.

use serde::{Deserialize, Serialize};

use super::{LossError, QualityScore};
use crate::dsp::{decompose, stft_padded, MelFilterbank, StftConfig, TfGrid, Waveform, DISCRIMINATOR_MEL_BANDS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QualityConfig {
    /// Segmental SNR mapped to 0.
    pub min_db: f64,
    /// Segmental SNR mapped to 1.
    pub max_db: f64,
    pub n_mels: usize,
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self { min_db: -10.0, max_db: 35.0, n_mels: DISCRIMINATOR_MEL_BANDS }
    }
}

// Band weight is clean band power^0.1, i.e. magnitude^0.2.
const WEIGHT_EXPONENT: f64 = 0.1;

pub fn quality_proxy(s_hat: &Waveform, s: &Waveform) -> Result<QualityScore, LossError> {
    quality_proxy_with(s_hat, s, &StftConfig::default(), &QualityConfig::default())
}

pub fn quality_proxy_with(
    s_hat: &Waveform,
    s: &Waveform,
    stft_cfg: &StftConfig,
    cfg: &QualityConfig,
) -> Result<QualityScore, LossError> {
    if s_hat.len() != s.len() {
        return Err(LossError::ShapeMismatch(format!("{} vs {} samples", s_hat.len(), s.len())));
    }
    if cfg.max_db.partial_cmp(&cfg.min_db) != Some(std::cmp::Ordering::Greater) {
        return Err(LossError::InvalidWeights(format!(
            "quality map needs max_db > min_db, got [{}, {}]",
            cfg.min_db, cfg.max_db
        )));
    }
    if s.power() == 0.0 {
        return Err(LossError::SilentReference);
    }
    let error: Vec<f64> = s_hat.samples().iter().zip(s.samples()).map(|(a, b)| a - b).collect();
    let error = Waveform::new(error, s.sample_rate())?;
    let fb = MelFilterbank::new(cfg.n_mels, stft_cfg.n_fft, s.sample_rate())?;
    let band_power = |w: &Waveform| -> Result<TfGrid, LossError> {
        let (spec, _) = stft_padded(w, stft_cfg)?;
        let (mag, _) = decompose(&spec);
        Ok(fb.project(&mag)?.grid().clone())
    };
    let clean = band_power(s)?;
    let noise = band_power(&error)?;

    let (mut total, mut frames) = (0.0, 0usize);
    for t in 0..clean.frames() {
        let (mut num, mut den) = (0.0, 0.0);
        for b in 0..clean.bins() {
            let c = clean.get(t, b);
            if c <= 0.0 {
                continue;
            }
            let weight = c.powf(WEIGHT_EXPONENT);
            let n = noise.get(t, b);
            let snr = if n > 0.0 { 10.0 * (c / n).log10() } else { cfg.max_db };
            num += weight * snr.clamp(cfg.min_db, cfg.max_db);
            den += weight;
        }
        if den > 0.0 {
            total += num / den;
            frames += 1;
        }
    }
    if frames == 0 {
        return Err(LossError::SilentReference);
    }
    let seg_snr = total / frames as f64;
    QualityScore::new(((seg_snr - cfg.min_db) / (cfg.max_db - cfg.min_db)).clamp(0.0, 1.0))
}
