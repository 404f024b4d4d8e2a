use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::ResfError;
use crate::dsp::{decompose, stft_padded, MagnitudeSpectrogram, StftConfig, Waveform};

/// The fundamental frequency range, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FfrBand {
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Default for FfrBand {
    fn default() -> Self {
        Self { low_hz: 50.0, high_hz: 450.0 }
    }
}

impl FfrBand {
    pub fn validate(&self, sample_rate: u32) -> Result<(), ResfError> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.low_hz >= 0.0 && self.low_hz < self.high_hz && self.high_hz <= nyquist) {
            return Err(ResfError::InvalidBand(format!(
                "need 0 <= low < high <= {nyquist} Hz, got [{}, {}]",
                self.low_hz, self.high_hz
            )));
        }
        Ok(())
    }

    /// Inclusive bin range `[round(low·n_fft/sr), round(high·n_fft/sr)]`.
    pub fn bins(&self, n_fft: usize, sample_rate: u32) -> Result<RangeInclusive<usize>, ResfError> {
        self.validate(sample_rate)?;
        let to_bin = |f: f64| (f * n_fft as f64 / sample_rate as f64).round() as usize;
        Ok(to_bin(self.low_hz)..=to_bin(self.high_hz))
    }
}

/// Sum of squared magnitudes over all frames and the given bins.
pub fn band_energy(mag: &MagnitudeSpectrogram, bins: impl Iterator<Item = usize> + Clone) -> f64 {
    (0..mag.frames()).map(|t| bins.clone().map(|k| mag.get(t, k).powi(2)).sum::<f64>()).sum()
}

/// Band energy of `output` over band energy of `reference`, measured on
/// padded STFTs. Returns `(ffr_ratio, hfr_ratio)` where the HFR is every bin
/// above the FFR.
pub fn band_energy_ratio(
    output: &Waveform,
    reference: &Waveform,
    stft_cfg: &StftConfig,
    ffr: &FfrBand,
) -> Result<(f64, f64), ResfError> {
    let bins = ffr.bins(stft_cfg.n_fft, reference.sample_rate())?;
    let (out_spec, _) = stft_padded(output, stft_cfg)?;
    let (ref_spec, _) = stft_padded(reference, stft_cfg)?;
    let (out_mag, _) = decompose(&out_spec);
    let (ref_mag, _) = decompose(&ref_spec);
    let hfr = *bins.end() + 1..stft_cfg.bins();
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
    Ok((
        ratio(band_energy(&out_mag, bins.clone()), band_energy(&ref_mag, bins)),
        ratio(band_energy(&out_mag, hfr.clone()), band_energy(&ref_mag, hfr)),
    ))
}
