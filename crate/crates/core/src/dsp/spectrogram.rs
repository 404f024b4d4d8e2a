use super::DspError;

/// Row-major T×F matrix: one row per frame, one column per frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct TfGrid {
    frames: usize,
    bins: usize,
    data: Vec<f64>,
}

impl TfGrid {
    pub fn zeros(frames: usize, bins: usize) -> Self {
        Self { frames, bins, data: vec![0.0; frames * bins] }
    }

    pub fn from_vec(frames: usize, bins: usize, data: Vec<f64>) -> Result<Self, DspError> {
        if data.len() != frames * bins {
            return Err(DspError::ShapeMismatch(format!("{} values for a {frames}x{bins} grid", data.len())));
        }
        Ok(Self { frames, bins, data })
    }

    pub fn from_fn(frames: usize, bins: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(frames * bins);
        for t in 0..frames {
            for k in 0..bins {
                data.push(f(t, k));
            }
        }
        Self { frames, bins, data }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.frames, self.bins)
    }

    #[inline]
    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.data[t * self.bins + k]
    }

    #[inline]
    pub fn set(&mut self, t: usize, k: usize, v: f64) {
        self.data[t * self.bins + k] = v;
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.bins..(t + 1) * self.bins]
    }

    pub fn row_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.data[t * self.bins..(t + 1) * self.bins]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { frames: self.frames, bins: self.bins, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, DspError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { frames: self.frames, bins: self.bins, data })
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<(), DspError> {
        if self.shape() != other.shape() {
            return Err(DspError::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.frames, self.bins, other.frames, other.bins
            )));
        }
        Ok(())
    }

    fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|v| !v.is_finite())
    }
}

/// Complex STFT as separate real and imaginary planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    real: TfGrid,
    imag: TfGrid,
    sample_rate: u32,
}

impl ComplexSpectrogram {
    pub fn new(real: TfGrid, imag: TfGrid, sample_rate: u32) -> Result<Self, DspError> {
        real.check_same_shape(&imag)?;
        if let Some(i) = real.first_non_finite().or_else(|| imag.first_non_finite()) {
            return Err(DspError::NonFinite(i));
        }
        if sample_rate == 0 {
            return Err(DspError::InvalidSampleRate(0));
        }
        Ok(Self { real, imag, sample_rate })
    }

    pub fn zeros(frames: usize, bins: usize, sample_rate: u32) -> Self {
        Self { real: TfGrid::zeros(frames, bins), imag: TfGrid::zeros(frames, bins), sample_rate }
    }

    pub fn real(&self) -> &TfGrid {
        &self.real
    }

    pub fn imag(&self) -> &TfGrid {
        &self.imag
    }

    pub fn real_mut(&mut self) -> &mut TfGrid {
        &mut self.real
    }

    pub fn imag_mut(&mut self) -> &mut TfGrid {
        &mut self.imag
    }

    pub fn frames(&self) -> usize {
        self.real.frames()
    }

    pub fn bins(&self) -> usize {
        self.real.bins()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// FFT size implied by the one-sided bin count.
    pub fn n_fft(&self) -> usize {
        2 * (self.bins().saturating_sub(1))
    }
}

/// Non-negative magnitudes, `Y_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrogram(TfGrid);

impl MagnitudeSpectrogram {
    pub fn new(grid: TfGrid) -> Result<Self, DspError> {
        if let Some(i) = grid.first_non_finite() {
            return Err(DspError::NonFinite(i));
        }
        if let Some(i) = grid.as_slice().iter().position(|&v| v < 0.0) {
            return Err(DspError::InvalidValue(format!("negative magnitude at index {i}")));
        }
        Ok(Self(grid))
    }

    pub fn grid(&self) -> &TfGrid {
        &self.0
    }

    pub fn into_grid(self) -> TfGrid {
        self.0
    }

    pub fn frames(&self) -> usize {
        self.0.frames()
    }

    pub fn bins(&self) -> usize {
        self.0.bins()
    }

    #[inline]
    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.0.get(t, k)
    }
}

/// Principal-range phases in (-π, π], `Y_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrogram(TfGrid);

impl PhaseSpectrogram {
    pub fn new(grid: TfGrid) -> Result<Self, DspError> {
        if let Some(i) = grid.first_non_finite() {
            return Err(DspError::NonFinite(i));
        }
        Ok(Self(grid))
    }

    pub fn grid(&self) -> &TfGrid {
        &self.0
    }

    #[inline]
    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.0.get(t, k)
    }
}

/// Splits a spectrogram into magnitude and phase. `atan2(0, 0)` is taken as 0.
pub fn decompose(spec: &ComplexSpectrogram) -> (MagnitudeSpectrogram, PhaseSpectrogram) {
    let mag = spec.real.zip_map(&spec.imag, |r, i| r.hypot(i)).expect("planes share shape");
    let phase = spec
        .real
        .zip_map(&spec.imag, |r, i| if r == 0.0 && i == 0.0 { 0.0 } else { i.atan2(r) })
        .expect("planes share shape");
    (MagnitudeSpectrogram(mag), PhaseSpectrogram(phase))
}

/// `real = m·cos(p)`, `imag = m·sin(p)`.
pub fn recompose(
    mag: &MagnitudeSpectrogram,
    phase: &PhaseSpectrogram,
    sample_rate: u32,
) -> Result<ComplexSpectrogram, DspError> {
    let real = mag.0.zip_map(&phase.0, |m, p| m * p.cos())?;
    let imag = mag.0.zip_map(&phase.0, |m, p| m * p.sin())?;
    ComplexSpectrogram::new(real, imag, sample_rate)
}
