use std::ops::RangeInclusive;

use super::TwoMaskError;
use crate::dsp::{ComplexSpectrogram, MagnitudeSpectrogram, TfGrid};

/// `irm1` is additive and zero outside the FFR bins; `irm2` is a
/// multiplicative gain in `[0, 1]`. Both are T×F.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPair {
    irm1: TfGrid,
    irm2: TfGrid,
    ffr_bins: RangeInclusive<usize>,
}

impl MaskPair {
    pub fn new(irm1: TfGrid, irm2: TfGrid, ffr_bins: RangeInclusive<usize>) -> Result<Self, TwoMaskError> {
        if irm1.shape() != irm2.shape() {
            return Err(TwoMaskError::ShapeMismatch(format!("irm1 {:?} vs irm2 {:?}", irm1.shape(), irm2.shape())));
        }
        for t in 0..irm1.frames() {
            for k in 0..irm1.bins() {
                let (a, g) = (irm1.get(t, k), irm2.get(t, k));
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(TwoMaskError::InvalidMask(format!("irm1[{t}][{k}] = {a} is not >= 0")));
                }
                if a != 0.0 && !ffr_bins.contains(&k) {
                    return Err(TwoMaskError::InvalidMask(format!("irm1[{t}][{k}] = {a} outside the FFR")));
                }
                if !(0.0..=1.0).contains(&g) {
                    return Err(TwoMaskError::InvalidMask(format!("irm2[{t}][{k}] = {g} not in [0, 1]")));
                }
            }
        }
        Ok(Self { irm1, irm2, ffr_bins })
    }

    /// `irm1 = 0`, `irm2 = 1`.
    pub fn identity(frames: usize, bins: usize, ffr_bins: RangeInclusive<usize>) -> Self {
        Self { irm1: TfGrid::zeros(frames, bins), irm2: TfGrid::from_fn(frames, bins, |_, _| 1.0), ffr_bins }
    }

    pub fn irm1(&self) -> &TfGrid {
        &self.irm1
    }

    pub fn irm2(&self) -> &TfGrid {
        &self.irm2
    }

    pub fn ffr_bins(&self) -> &RangeInclusive<usize> {
        &self.ffr_bins
    }

    pub fn shape(&self) -> (usize, usize) {
        self.irm1.shape()
    }

    /// `(Y_m + irm1) ⊙ irm2`.
    pub fn apply_to_magnitude(&self, mag: &TfGrid) -> Result<TfGrid, TwoMaskError> {
        if mag.shape() != self.shape() {
            return Err(TwoMaskError::ShapeMismatch(format!("masks {:?} vs input {:?}", self.shape(), mag.shape())));
        }
        Ok(TfGrid::from_fn(mag.frames(), mag.bins(), |t, k| {
            (mag.get(t, k) + self.irm1.get(t, k)) * self.irm2.get(t, k)
        }))
    }
}

/// Produces a mask pair from a noisy magnitude spectrogram.
pub trait MaskGenerator {
    fn generate(&self, noisy: &MagnitudeSpectrogram) -> Result<MaskPair, TwoMaskError>;
}

/// Always returns identity masks.
#[derive(Debug, Clone)]
pub struct IdentityGenerator {
    pub ffr_bins: RangeInclusive<usize>,
}

impl MaskGenerator for IdentityGenerator {
    fn generate(&self, noisy: &MagnitudeSpectrogram) -> Result<MaskPair, TwoMaskError> {
        Ok(MaskPair::identity(noisy.frames(), noisy.bins(), self.ffr_bins.clone()))
    }
}

/// Applies the pair to `Y` and reuses the phase of `Y`.
///
/// Each bin is rescaled by `|Y′|/|Y|`, which equals `|Y′|·(cos Y_p, sin Y_p)`
/// without the rounding of a polar round trip. Zero-magnitude bins take
/// phase 0, so restored content there lands on the real axis.
pub fn apply_two_mask(
    y: &ComplexSpectrogram,
    masks: &MaskPair,
    ffr_bins: &RangeInclusive<usize>,
) -> Result<ComplexSpectrogram, TwoMaskError> {
    if masks.ffr_bins() != ffr_bins {
        return Err(TwoMaskError::InvalidMask(format!(
            "masks built for FFR bins {:?}, applied with {:?}",
            masks.ffr_bins(),
            ffr_bins
        )));
    }
    if (y.frames(), y.bins()) != masks.shape() {
        return Err(TwoMaskError::ShapeMismatch(format!(
            "masks {:?} vs spectrogram {:?}",
            masks.shape(),
            (y.frames(), y.bins())
        )));
    }
    let mut out = y.clone();
    for t in 0..y.frames() {
        for k in 0..y.bins() {
            let (re, im) = (y.real().get(t, k), y.imag().get(t, k));
            let m = re.hypot(im);
            let target = (m + masks.irm1.get(t, k)) * masks.irm2.get(t, k);
            if m > 0.0 {
                let gain = target / m;
                out.real_mut().set(t, k, re * gain);
                out.imag_mut().set(t, k, im * gain);
            } else {
                out.real_mut().set(t, k, target);
                out.imag_mut().set(t, k, 0.0);
            }
        }
    }
    Ok(out)
}
