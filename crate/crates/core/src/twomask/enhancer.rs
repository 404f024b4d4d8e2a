use serde::{Deserialize, Serialize};

use super::{apply_two_mask, MaskGenerator, OracleGenerator, TwoMaskError};
use crate::dsp::{
    decompose, istft_trimmed, stft_padded, ComplexSpectrogram, MagnitudeSpectrogram, StftConfig, TfGrid, Waveform,
};
use crate::resf::FfrBand;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnhanceConfig {
    pub stft: StftConfig,
    pub ffr: FfrBand,
    /// Optional power-law exponent applied to magnitudes before masking
    /// (and inverted after). `None` masks raw magnitudes.
    pub compression: Option<f64>,
}

/// Waveform-in, waveform-out wrapper around a [`MaskGenerator`]:
/// padded STFT, masks on the magnitudes, noisy phase, trimmed inverse.
#[derive(Debug, Clone)]
pub struct MaskEnhancer {
    cfg: EnhanceConfig,
}

impl MaskEnhancer {
    pub fn new(cfg: EnhanceConfig) -> Result<Self, TwoMaskError> {
        cfg.stft.validate()?;
        if let Some(c) = cfg.compression {
            if !(c > 0.0 && c.is_finite()) {
                return Err(TwoMaskError::InvalidHyper(format!("compression exponent must be > 0, got {c}")));
            }
        }
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &EnhanceConfig {
        &self.cfg
    }

    pub fn ffr_bins(&self, sample_rate: u32) -> Result<std::ops::RangeInclusive<usize>, TwoMaskError> {
        self.cfg.ffr.bins(self.cfg.stft.n_fft, sample_rate).map_err(|e| TwoMaskError::InvalidBand(e.to_string()))
    }

    /// Magnitudes in the domain the masks operate on.
    pub fn analyze(&self, w: &Waveform) -> Result<MagnitudeSpectrogram, TwoMaskError> {
        let (spec, _) = stft_padded(w, &self.cfg.stft)?;
        self.compress(decompose(&spec).0)
    }

    fn compress(&self, mag: MagnitudeSpectrogram) -> Result<MagnitudeSpectrogram, TwoMaskError> {
        match self.cfg.compression {
            None => Ok(mag),
            Some(c) => Ok(MagnitudeSpectrogram::new(mag.grid().map(|m| m.powf(c)))?),
        }
    }

    pub fn enhance(&self, noisy: &Waveform, generator: &dyn MaskGenerator) -> Result<Waveform, TwoMaskError> {
        let bins = self.ffr_bins(noisy.sample_rate())?;
        let (spec, framing) = stft_padded(noisy, &self.cfg.stft)?;
        let (mag, _) = decompose(&spec);
        let out = match self.cfg.compression {
            None => {
                let masks = generator.generate(&mag)?;
                apply_two_mask(&spec, &masks, &bins)?
            }
            Some(c) => {
                let compressed = self.compress(mag)?;
                let masks = generator.generate(&compressed)?;
                let restored = masks.apply_to_magnitude(compressed.grid())?.map(|v| v.powf(1.0 / c));
                rescale(&spec, &restored)
            }
        };
        Ok(istft_trimmed(&out, &self.cfg.stft, framing)?)
    }

    /// Enhances `noisy` with oracle masks computed against `clean`.
    pub fn enhance_with_oracle(&self, noisy: &Waveform, clean: &Waveform) -> Result<Waveform, TwoMaskError> {
        if noisy.len() != clean.len() {
            return Err(TwoMaskError::ShapeMismatch(format!(
                "noisy has {} samples, clean has {}",
                noisy.len(),
                clean.len()
            )));
        }
        let generator = OracleGenerator { clean: self.analyze(clean)?, ffr_bins: self.ffr_bins(clean.sample_rate())? };
        self.enhance(noisy, &generator)
    }
}

/// Sets each bin's magnitude to `mag` while keeping its phase.
fn rescale(spec: &ComplexSpectrogram, mag: &TfGrid) -> ComplexSpectrogram {
    let mut out = spec.clone();
    for t in 0..spec.frames() {
        for k in 0..spec.bins() {
            let (re, im) = (spec.real().get(t, k), spec.imag().get(t, k));
            let m = re.hypot(im);
            let target = mag.get(t, k);
            if m > 0.0 {
                out.real_mut().set(t, k, re * target / m);
                out.imag_mut().set(t, k, im * target / m);
            } else {
                out.real_mut().set(t, k, target);
                out.imag_mut().set(t, k, 0.0);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twomask::IdentityGenerator;
    use std::f64::consts::PI;

    fn voice(len: usize) -> Waveform {
        Waveform::new(
            (0..len)
                .map(|i| {
                    let t = i as f64 / 16_000.0;
                    (1..=5).map(|h| (2.0 * PI * 150.0 * h as f64 * t).sin() / h as f64).sum::<f64>() * 0.2
                })
                .collect(),
            16_000,
        )
        .unwrap()
    }

    #[test]
    fn identity_generator_round_trips() {
        for compression in [None, Some(0.3)] {
            let e = MaskEnhancer::new(EnhanceConfig { compression, ..Default::default() }).unwrap();
            let w = voice(5_000);
            let out = e.enhance(&w, &IdentityGenerator { ffr_bins: 1..=11 }).unwrap();
            assert_eq!(out.len(), w.len());
            for (a, b) in w.samples().iter().zip(out.samples()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn oracle_on_clean_input_is_near_identity() {
        let e = MaskEnhancer::new(EnhanceConfig::default()).unwrap();
        let w = voice(8_000);
        let out = e.enhance_with_oracle(&w, &w).unwrap();
        for (a, b) in w.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_compression_and_length_mismatch() {
        assert!(MaskEnhancer::new(EnhanceConfig { compression: Some(0.0), ..Default::default() }).is_err());
        let e = MaskEnhancer::new(EnhanceConfig::default()).unwrap();
        assert!(matches!(e.enhance_with_oracle(&voice(100), &voice(101)), Err(TwoMaskError::ShapeMismatch(_))));
    }
}
