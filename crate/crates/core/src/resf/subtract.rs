use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{FfrBand, ResfError};
use crate::dsp::{istft_trimmed, stft_padded, ComplexSpectrogram, StftConfig, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubtractionConfig {
    /// Applied to the ego magnitude inside the FFR.
    pub oversubtraction_factor: f64,
    /// Applied to the ego magnitude outside the FFR.
    pub base_factor: f64,
    /// Output magnitude never drops below `spectral_floor · |mixture|`.
    pub spectral_floor: f64,
}

impl Default for SubtractionConfig {
    fn default() -> Self {
        Self { oversubtraction_factor: 3.0, base_factor: 1.0, spectral_floor: 0.002 }
    }
}

impl SubtractionConfig {
    pub fn validate(&self) -> Result<(), ResfError> {
        let err = |m: String| Err(ResfError::InvalidSubtraction(m));
        if self.oversubtraction_factor.is_nan() || self.oversubtraction_factor < 1.0 {
            return err(format!("oversubtraction_factor must be >= 1, got {}", self.oversubtraction_factor));
        }
        if self.base_factor.is_nan() || self.base_factor < 0.0 {
            return err(format!("base_factor must be >= 0, got {}", self.base_factor));
        }
        if !(self.spectral_floor >= 0.0 && self.spectral_floor < 1.0) {
            return err(format!("spectral_floor must be in [0, 1), got {}", self.spectral_floor));
        }
        if self.oversubtraction_factor < self.base_factor {
            return err("oversubtraction_factor must be >= base_factor".into());
        }
        Ok(())
    }
}

/// Per TF bin, `|out| = max(|M| − α(k)·|E|, β·|M|)` with the mixture phase,
/// where `α(k)` is the oversubtraction factor inside the FFR and the base
/// factor elsewhere.
pub fn spectral_subtract(
    mixture: &Waveform,
    ego_estimate: &Waveform,
    cfg: &SubtractionConfig,
    ffr: &FfrBand,
    stft_cfg: &StftConfig,
) -> Result<Waveform, ResfError> {
    cfg.validate()?;
    if mixture.len() != ego_estimate.len() {
        return Err(ResfError::LengthMismatch(mixture.len(), ego_estimate.len()));
    }
    if mixture.sample_rate() != ego_estimate.sample_rate() {
        return Err(ResfError::SampleRateMismatch(mixture.sample_rate(), ego_estimate.sample_rate()));
    }
    let band = ffr.bins(stft_cfg.n_fft, mixture.sample_rate())?;
    let (spec, framing) = stft_padded(mixture, stft_cfg)?;
    let (ego, _) = stft_padded(ego_estimate, stft_cfg)?;
    let spec = subtract_spectrum(&spec, &ego, cfg, band)?;
    Ok(istft_trimmed(&spec, stft_cfg, framing)?)
}

/// The TF-domain half of [`spectral_subtract`].
pub fn subtract_spectrum(
    mixture: &ComplexSpectrogram,
    ego: &ComplexSpectrogram,
    cfg: &SubtractionConfig,
    ffr_bins: RangeInclusive<usize>,
) -> Result<ComplexSpectrogram, ResfError> {
    mixture.real().check_same_shape(ego.real())?;
    let mut spec = mixture.clone();
    for t in 0..spec.frames() {
        for k in 0..spec.bins() {
            let (re, im) = (spec.real().get(t, k), spec.imag().get(t, k));
            let m = re.hypot(im);
            if m == 0.0 {
                continue;
            }
            let e = ego.real().get(t, k).hypot(ego.imag().get(t, k));
            let alpha = if ffr_bins.contains(&k) { cfg.oversubtraction_factor } else { cfg.base_factor };
            let gain = (m - alpha * e).max(cfg.spectral_floor * m) / m;
            spec.real_mut().set(t, k, re * gain);
            spec.imag_mut().set(t, k, im * gain);
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{decompose, stft_padded};
    use std::f64::consts::PI;

    fn tone(freq: f64, amp: f64, len: usize) -> Vec<f64> {
        (0..len).map(|i| amp * (2.0 * PI * freq * i as f64 / 16_000.0).sin()).collect()
    }

    fn wave(v: Vec<f64>) -> Waveform {
        Waveform::new(v, 16_000).unwrap()
    }

    #[test]
    fn full_cancellation() {
        let m = wave(tone(300.0, 0.5, 8_000).iter().zip(tone(1_700.0, 0.2, 8_000)).map(|(a, b)| a + b).collect());
        let cfg = SubtractionConfig { oversubtraction_factor: 1.0, base_factor: 1.0, spectral_floor: 0.0 };
        let out = spectral_subtract(&m, &m, &cfg, &FfrBand::default(), &StftConfig::default()).unwrap();
        assert!(out.rms() < 1e-9 * m.rms().max(1.0));
    }

    #[test]
    fn silent_ego_is_identity() {
        let m = wave(tone(220.0, 0.4, 6_000));
        let out = spectral_subtract(
            &m,
            &Waveform::zeros(6_000, 16_000),
            &SubtractionConfig::default(),
            &FfrBand::default(),
            &StftConfig::default(),
        )
        .unwrap();
        for (a, b) in m.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn oversubtracted_tone_hits_floor_while_high_tone_survives() {
        let cfg = StftConfig::default();
        let len = 16_000;
        let low = tone(200.0, 0.5, len);
        let high = tone(2_000.0, 0.3, len);
        let mixture = wave(low.iter().zip(&high).map(|(a, b)| a + b).collect());
        let sub = SubtractionConfig::default();
        let out = spectral_subtract(&mixture, &wave(low), &sub, &FfrBand::default(), &cfg).unwrap();

        // Per-bin oracle on the mixture: inside the FFR |M| ≈ |E|, so
        // |M| − 3|E| < 0 and every such bin must sit at β·|M|.
        let (mix_spec, _) = stft_padded(&mixture, &cfg).unwrap();
        let (out_spec, _) = stft_padded(&out, &cfg).unwrap();
        let (mm, _) = decompose(&mix_spec);
        let (om, _) = decompose(&out_spec);
        let t = mm.frames() / 2;
        let k200 = 5;
        let k2000 = 50;
        assert!(om.get(t, k200) < 0.01 * mm.get(t, k200), "{} vs {}", om.get(t, k200), mm.get(t, k200));
        assert!((om.get(t, k2000) / mm.get(t, k2000) - 1.0).abs() < 0.01);
        let high_rms = Waveform::new(tone(2_000.0, 0.3, len), 16_000).unwrap().rms();
        assert!((out.rms() - high_rms).abs() / high_rms < 0.05);
    }

    #[test]
    fn output_bounded_by_floor_and_mixture() {
        let cfg = StftConfig::default();
        let a = wave(tone(180.0, 0.4, 4_000).iter().zip(tone(900.0, 0.2, 4_000)).map(|(x, y)| x + y).collect());
        let e = wave(tone(170.0, 0.3, 4_000).iter().zip(tone(950.0, 0.3, 4_000)).map(|(x, y)| x + y).collect());
        let sub = SubtractionConfig { oversubtraction_factor: 2.0, base_factor: 0.5, spectral_floor: 0.1 };
        let (ms, _) = stft_padded(&a, &cfg).unwrap();
        let (es, _) = stft_padded(&e, &cfg).unwrap();
        let out = subtract_spectrum(&ms, &es, &sub, 1..=11).unwrap();
        let (mm, mp) = decompose(&ms);
        let (om, op) = decompose(&out);
        for t in 0..mm.frames() {
            for k in 0..mm.bins() {
                let (m, o) = (mm.get(t, k), om.get(t, k));
                assert!(o >= 0.1 * m * (1.0 - 1e-12) && o <= m * (1.0 + 1e-12));
                if o > 1e-12 {
                    let dp = (op.get(t, k) - mp.get(t, k)).abs();
                    assert!(dp < 1e-9 || (dp - 2.0 * PI).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_mismatched_lengths_and_bad_config() {
        let cfg = StftConfig::default();
        let a = wave(vec![0.1; 1_000]);
        let b = wave(vec![0.1; 999]);
        assert_eq!(
            spectral_subtract(&a, &b, &SubtractionConfig::default(), &FfrBand::default(), &cfg),
            Err(ResfError::LengthMismatch(1_000, 999))
        );
        let bad = SubtractionConfig { oversubtraction_factor: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SubtractionConfig { oversubtraction_factor: 1.0, base_factor: 2.0, spectral_floor: 0.0 };
        assert!(bad.validate().is_err());
        let bad = SubtractionConfig { spectral_floor: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
