//! HTK-scale triangular mel filterbank over power spectra.

use super::{DspError, MagnitudeSpectrogram, TfGrid};

/// Band count of the discriminator's mel inputs.
pub const DISCRIMINATOR_MEL_BANDS: usize = 128;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// T×bands matrix of non-negative mel-band energies.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram(TfGrid);

impl MelSpectrogram {
    pub fn new(grid: TfGrid) -> Result<Self, DspError> {
        if let Some(i) = grid.as_slice().iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(DspError::InvalidValue(format!("mel energy at index {i} is negative or non-finite")));
        }
        Ok(Self(grid))
    }

    pub fn grid(&self) -> &TfGrid {
        &self.0
    }

    pub fn frames(&self) -> usize {
        self.0.frames()
    }

    pub fn bands(&self) -> usize {
        self.0.bins()
    }
}

/// Filter weights, `bands × bins`, unnormalized (peak 1 per triangle).
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: TfGrid,
    edges_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(n_mels: usize, n_fft: usize, sample_rate: u32) -> Result<Self, DspError> {
        if n_mels < 1 {
            return Err(DspError::InvalidValue("n_mels must be >= 1".into()));
        }
        if sample_rate == 0 {
            return Err(DspError::InvalidSampleRate(sample_rate));
        }
        if n_fft < 2 {
            return Err(DspError::InvalidConfig(format!("n_fft must be >= 2, got {n_fft}")));
        }
        let nyquist = sample_rate as f64 / 2.0;
        let top = hz_to_mel(nyquist);
        let edges_hz: Vec<f64> = (0..n_mels + 2).map(|i| mel_to_hz(top * i as f64 / (n_mels + 1) as f64)).collect();
        let bins = n_fft / 2 + 1;
        let weights = TfGrid::from_fn(n_mels, bins, |m, k| {
            let f = k as f64 * sample_rate as f64 / n_fft as f64;
            let (lo, mid, hi) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
            let rising = (f - lo) / (mid - lo);
            let falling = (hi - f) / (hi - mid);
            rising.min(falling).max(0.0)
        });
        Ok(Self { weights, edges_hz })
    }

    pub fn bands(&self) -> usize {
        self.weights.frames()
    }

    pub fn bins(&self) -> usize {
        self.weights.bins()
    }

    /// Lower, centre and upper edge of band `m` in Hz.
    pub fn band_edges(&self, m: usize) -> (f64, f64, f64) {
        (self.edges_hz[m], self.edges_hz[m + 1], self.edges_hz[m + 2])
    }

    pub fn weight(&self, band: usize, bin: usize) -> f64 {
        self.weights.get(band, bin)
    }

    /// Projects one frame of power values onto the bands.
    pub fn project_power_frame(&self, power: &[f64], out: &mut [f64]) {
        for (m, o) in out.iter_mut().enumerate() {
            *o = self.weights.row(m).iter().zip(power).map(|(w, p)| w * p).sum();
        }
    }

    pub fn project_power(&self, power: &TfGrid) -> Result<MelSpectrogram, DspError> {
        if power.bins() != self.bins() {
            return Err(DspError::ShapeMismatch(format!(
                "power spectrum has {} bins, filterbank expects {}",
                power.bins(),
                self.bins()
            )));
        }
        let mut out = TfGrid::zeros(power.frames(), self.bands());
        for t in 0..power.frames() {
            self.project_power_frame(power.row(t), out.row_mut(t));
        }
        MelSpectrogram::new(out)
    }

    pub fn project(&self, mag: &MagnitudeSpectrogram) -> Result<MelSpectrogram, DspError> {
        self.project_power(&mag.grid().map(|m| m * m))
    }
}

/// Mel energies of `|m|²` with an `n_mels`-band filterbank spanning 0 Hz to sr/2.
pub fn mel_project(mag: &MagnitudeSpectrogram, sample_rate: u32, n_mels: usize) -> Result<MelSpectrogram, DspError> {
    let n_fft = 2 * mag.bins().saturating_sub(1);
    MelFilterbank::new(n_mels, n_fft, sample_rate)?.project(mag)
}
