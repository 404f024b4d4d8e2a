use std::ops::RangeInclusive;

use super::{MaskGenerator, MaskPair, TwoMaskError};
use crate::dsp::{MagnitudeSpectrogram, TfGrid};

/// Division guard in the denoising ratio.
pub const ORACLE_EPSILON: f64 = 1e-8;

/// Masks that map `noisy` onto `clean` as closely as the pair allows:
/// `irm1 = max(0, S − Y)` inside the FFR (zero elsewhere) and
/// `irm2 = min(1, S / (Y + irm1 + ε))`.
///
/// The split is not unique; this one keeps `irm1` minimal and `irm2 ≤ 1`.
pub fn oracle_masks(
    noisy: &MagnitudeSpectrogram,
    clean: &MagnitudeSpectrogram,
    ffr_bins: RangeInclusive<usize>,
) -> Result<MaskPair, TwoMaskError> {
    if noisy.grid().shape() != clean.grid().shape() {
        return Err(TwoMaskError::ShapeMismatch(format!(
            "noisy {:?} vs clean {:?}",
            noisy.grid().shape(),
            clean.grid().shape()
        )));
    }
    let (frames, bins) = noisy.grid().shape();
    let irm1 = TfGrid::from_fn(frames, bins, |t, k| {
        if ffr_bins.contains(&k) {
            (clean.get(t, k) - noisy.get(t, k)).max(0.0)
        } else {
            0.0
        }
    });
    let irm2 = TfGrid::from_fn(frames, bins, |t, k| {
        (clean.get(t, k) / (noisy.get(t, k) + irm1.get(t, k) + ORACLE_EPSILON)).min(1.0)
    });
    MaskPair::new(irm1, irm2, ffr_bins)
}

/// Oracle masks against a fixed clean reference.
#[derive(Debug, Clone)]
pub struct OracleGenerator {
    pub clean: MagnitudeSpectrogram,
    pub ffr_bins: RangeInclusive<usize>,
}

impl MaskGenerator for OracleGenerator {
    fn generate(&self, noisy: &MagnitudeSpectrogram) -> Result<MaskPair, TwoMaskError> {
        oracle_masks(noisy, &self.clean, self.ffr_bins.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mag(frames: usize, bins: usize, f: impl FnMut(usize, usize) -> f64) -> MagnitudeSpectrogram {
        MagnitudeSpectrogram::new(TfGrid::from_fn(frames, bins, f)).unwrap()
    }

    #[test]
    fn clean_input_gives_identity() {
        let s = mag(3, 10, |t, k| 0.1 + (t * k) as f64);
        let masks = oracle_masks(&s, &s, 1..=4).unwrap();
        assert!(masks.irm1().as_slice().iter().all(|&v| v == 0.0));
        assert!(masks.irm2().as_slice().iter().all(|&g| (g - 1.0).abs() < 1e-7));
        let out = masks.apply_to_magnitude(s.grid()).unwrap();
        // Exact up to the ε guard plus one rounding of the product.
        for (a, b) in out.as_slice().iter().zip(s.grid().as_slice()) {
            assert!((a - b).abs() <= ORACLE_EPSILON + 4.0 * f64::EPSILON * b, "{a} vs {b}");
        }
    }

    #[test]
    fn dropped_ffr_bins_are_compensated() {
        let ffr = 1..=4;
        let s = mag(3, 10, |t, k| 0.5 + 0.2 * (t + k) as f64);
        let y = mag(3, 10, |t, k| if ffr.contains(&k) { 0.0 } else { 0.5 + 0.2 * (t + k) as f64 });
        let masks = oracle_masks(&y, &s, ffr.clone()).unwrap();
        for t in 0..3 {
            for k in ffr.clone() {
                assert_eq!(masks.irm1().get(t, k), s.get(t, k));
                assert!((masks.irm2().get(t, k) - 1.0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            oracle_masks(&mag(2, 5, |_, _| 1.0), &mag(3, 5, |_, _| 1.0), 1..=2),
            Err(TwoMaskError::ShapeMismatch(_))
        ));
    }
}
