//! Short-time Fourier transform and weighted overlap-add inverse.
//!
//! Frames are not centered: frame `t` covers samples `[t·hop, t·hop + n_fft)`,
//! giving `1 + (len - n_fft) / hop` frames. The inverse applies the same
//! window for synthesis and divides by the per-sample sum of squared windows,
//! so reconstruction is exact wherever that sum is non-zero. [`stft_padded`]
//! and [`istft_trimmed`] wrap this with zero padding so every input sample
//! sits in the fully overlapped interior.

use std::f64::consts::PI;
use std::ops::Range;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{ComplexSpectrogram, DspError, TfGrid, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// Periodic Hann.
    Hann,
    /// Periodic Hamming.
    Hamming,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StftConfig {
    pub n_fft: usize,
    pub hop: usize,
    pub window: WindowKind,
}

impl Default for StftConfig {
    /// 25 ms Hann frames with a 6.25 ms hop at 16 kHz.
    fn default() -> Self {
        Self { n_fft: 400, hop: 100, window: WindowKind::Hann }
    }
}

// Relative ripple of the squared-window overlap-add sum tolerated as COLA.
const COLA_TOLERANCE: f64 = 1e-9;

impl StftConfig {
    pub fn window(&self) -> Vec<f64> {
        let n = self.n_fft as f64;
        (0..self.n_fft)
            .map(|i| {
                let phase = 2.0 * PI * i as f64 / n;
                match self.window {
                    WindowKind::Hann => 0.5 - 0.5 * phase.cos(),
                    WindowKind::Hamming => 0.54 - 0.46 * phase.cos(),
                    WindowKind::Rectangular => 1.0,
                }
            })
            .collect()
    }

    pub fn bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// Number of frames for a signal of `len` samples (0 if shorter than a frame).
    pub fn frames_for(&self, len: usize) -> usize {
        if len < self.n_fft {
            0
        } else {
            1 + (len - self.n_fft) / self.hop
        }
    }

    /// Samples covered by the maximum number of overlapping frames.
    pub fn interior(&self, len: usize) -> Range<usize> {
        let frames = self.frames_for(len);
        if frames == 0 {
            return 0..0;
        }
        let start = self.n_fft - self.hop;
        let end = frames * self.hop;
        start.min(end)..end
    }

    /// Checks shape constraints and the squared-window COLA condition.
    pub fn validate(&self) -> Result<(), DspError> {
        if self.n_fft < 2 {
            return Err(DspError::InvalidConfig(format!("n_fft must be >= 2, got {}", self.n_fft)));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return Err(DspError::InvalidConfig(format!("hop must be in 1..={}, got {}", self.n_fft, self.hop)));
        }
        let deviation = self.cola_deviation();
        if deviation > COLA_TOLERANCE {
            return Err(DspError::NotCola { deviation });
        }
        Ok(())
    }

    fn cola_deviation(&self) -> f64 {
        let w = self.window();
        let mut sums = vec![0.0; self.hop];
        for (i, v) in w.iter().enumerate() {
            sums[i % self.hop] += v * v;
        }
        let max = sums.iter().cloned().fold(f64::MIN, f64::max);
        let min = sums.iter().cloned().fold(f64::MAX, f64::min);
        if max <= 0.0 {
            return f64::INFINITY;
        }
        (max - min) / max
    }
}

pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<ComplexSpectrogram, DspError> {
    cfg.validate()?;
    if w.len() < cfg.n_fft {
        return Err(DspError::TooShort { min: cfg.n_fft, actual: w.len() });
    }
    let frames = cfg.frames_for(w.len());
    let bins = cfg.bins();
    let window = cfg.window();
    let fft = FftPlanner::new().plan_fft_forward(cfg.n_fft);

    let mut real = TfGrid::zeros(frames, bins);
    let mut imag = TfGrid::zeros(frames, bins);
    let mut buf = vec![Complex::new(0.0, 0.0); cfg.n_fft];
    let samples = w.samples();
    for t in 0..frames {
        let start = t * cfg.hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(samples[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, c) in buf.iter().take(bins).enumerate() {
            real.set(t, k, c.re);
            imag.set(t, k, c.im);
        }
    }
    ComplexSpectrogram::new(real, imag, w.sample_rate())
}

pub fn istft(spec: &ComplexSpectrogram, cfg: &StftConfig) -> Result<Waveform, DspError> {
    cfg.validate()?;
    if spec.bins() != cfg.bins() {
        return Err(DspError::ShapeMismatch(format!(
            "spectrogram has {} bins, config expects {}",
            spec.bins(),
            cfg.bins()
        )));
    }
    let frames = spec.frames();
    if frames == 0 {
        return Ok(Waveform::zeros(0, spec.sample_rate()));
    }
    let n = cfg.n_fft;
    let len = (frames - 1) * cfg.hop + n;
    let window = cfg.window();
    let ifft = FftPlanner::new().plan_fft_inverse(n);

    let mut out = vec![0.0; len];
    let mut norm = vec![0.0; len];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let bins = cfg.bins();
    for t in 0..frames {
        let (re, im) = (spec.real().row(t), spec.imag().row(t));
        for k in 0..bins {
            buf[k] = Complex::new(re[k], im[k]);
        }
        // Hermitian completion; DC and Nyquist must be real.
        buf[0].im = 0.0;
        if n.is_multiple_of(2) {
            buf[n / 2].im = 0.0;
        }
        for k in bins..n {
            buf[k] = buf[n - k].conj();
        }
        ifft.process(&mut buf);
        let start = t * cfg.hop;
        for i in 0..n {
            out[start + i] += buf[i].re / n as f64 * window[i];
            norm[start + i] += window[i] * window[i];
        }
    }
    let peak = norm.iter().cloned().fold(0.0, f64::max);
    for (o, &s) in out.iter_mut().zip(&norm) {
        *o = if s > peak * 1e-10 { *o / s } else { 0.0 };
    }
    Waveform::new(out, spec.sample_rate())
}

/// Zero padding applied by [`stft_padded`], needed to undo it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Framing {
    pub left: usize,
    pub len: usize,
}

/// Pads `w` with `n_fft` zeros on the left and enough on the right that the
/// original samples lie inside [`StftConfig::interior`], then runs [`stft`].
pub fn stft_padded(w: &Waveform, cfg: &StftConfig) -> Result<(ComplexSpectrogram, Framing), DspError> {
    cfg.validate()?;
    let left = cfg.n_fft;
    let min_total = left + w.len() + cfg.n_fft;
    let frames = (min_total - cfg.n_fft).div_ceil(cfg.hop) + 1;
    let total = (frames - 1) * cfg.hop + cfg.n_fft;
    let mut padded = vec![0.0; total];
    padded[left..left + w.len()].copy_from_slice(w.samples());
    let spec = stft(&Waveform::new(padded, w.sample_rate())?, cfg)?;
    Ok((spec, Framing { left, len: w.len() }))
}

pub fn istft_trimmed(spec: &ComplexSpectrogram, cfg: &StftConfig, framing: Framing) -> Result<Waveform, DspError> {
    let full = istft(spec, cfg)?;
    let end = framing.left + framing.len;
    if full.len() < end {
        return Err(DspError::ShapeMismatch(format!("synthesized {} samples, framing needs {end}", full.len())));
    }
    Waveform::new(full.samples()[framing.left..end].to_vec(), full.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(len: usize, seed: u64) -> Waveform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Waveform::new((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(), 16_000).unwrap()
    }

    /// Direct O(N²) DFT of one windowed frame.
    fn dft_magnitudes(frame: &[f64]) -> Vec<f64> {
        let n = frame.len();
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, x) in frame.iter().enumerate() {
                    let a = -2.0 * PI * (k * i) as f64 / n as f64;
                    re += x * a.cos();
                    im += x * a.sin();
                }
                re.hypot(im)
            })
            .collect()
    }

    #[test]
    fn frame_count_for_window_length() {
        let cfg = StftConfig::default();
        let spec = stft(&Waveform::zeros(32_640, 16_000), &cfg).unwrap();
        assert_eq!((spec.frames(), spec.bins()), (323, 201));
        assert!(spec.real().as_slice().iter().all(|&v| v == 0.0));
        assert!(spec.imag().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bin_centred_sinusoid_peaks_at_its_bin() {
        let cfg = StftConfig::default();
        let k = 7;
        let f = k as f64 * 16_000.0 / cfg.n_fft as f64;
        let samples: Vec<f64> = (0..4_000).map(|i| (2.0 * PI * f * i as f64 / 16_000.0).sin()).collect();
        let w = Waveform::new(samples.clone(), 16_000).unwrap();
        let spec = stft(&w, &cfg).unwrap();
        let window = cfg.window();
        for t in [0, spec.frames() / 2, spec.frames() - 1] {
            let row: Vec<f64> = (0..spec.bins()).map(|b| spec.real().get(t, b).hypot(spec.imag().get(t, b))).collect();
            let peak = row.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert_eq!(peak, k);
            let frame: Vec<f64> = (0..cfg.n_fft).map(|i| samples[t * cfg.hop + i] * window[i]).collect();
            for (a, b) in row.iter().zip(dft_magnitudes(&frame)) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn round_trip_white_noise() {
        let cfg = StftConfig::default();
        let w = noise(32_640, 3);
        let back = istft(&stft(&w, &cfg).unwrap(), &cfg).unwrap();
        for i in cfg.interior(w.len()) {
            assert!((w.samples()[i] - back.samples()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn round_trip_chirp_relative_error() {
        let cfg = StftConfig::default();
        let sr = 16_000.0;
        let samples: Vec<f64> = (0..24_000)
            .map(|i| {
                let t = i as f64 / sr;
                0.6 * (2.0 * PI * (120.0 * t + 900.0 * t * t)).sin()
            })
            .collect();
        let w = Waveform::new(samples, 16_000).unwrap();
        let back = istft(&stft(&w, &cfg).unwrap(), &cfg).unwrap();
        let r = cfg.interior(w.len());
        let err: f64 = r.clone().map(|i| (w.samples()[i] - back.samples()[i]).powi(2)).sum();
        let energy: f64 = r.map(|i| w.samples()[i].powi(2)).sum();
        assert!((err / energy).sqrt() < 1e-6);
    }

    #[test]
    fn zero_spectrogram_synthesizes_silence() {
        let cfg = StftConfig::default();
        let out = istft(&ComplexSpectrogram::zeros(10, 201, 16_000), &cfg).unwrap();
        assert_eq!(out.len(), 9 * 100 + 400);
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn padded_round_trip_is_length_preserving() {
        let cfg = StftConfig::default();
        for len in [1, 399, 400, 401, 8_160, 12_345] {
            let w = noise(len, len as u64);
            let (spec, framing) = stft_padded(&w, &cfg).unwrap();
            let back = istft_trimmed(&spec, &cfg, framing).unwrap();
            assert_eq!(back.len(), len);
            for (a, b) in w.samples().iter().zip(back.samples()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_short_waveform_and_bad_configs() {
        let cfg = StftConfig::default();
        assert_eq!(stft(&Waveform::zeros(399, 16_000), &cfg), Err(DspError::TooShort { min: 400, actual: 399 }));
        let bad_hop = StftConfig { hop: 0, ..cfg };
        assert!(matches!(bad_hop.validate(), Err(DspError::InvalidConfig(_))));
        let too_long = StftConfig { hop: 401, ..cfg };
        assert!(matches!(too_long.validate(), Err(DspError::InvalidConfig(_))));
        // Hann at 50% overlap is COLA for w but not for w².
        let half = StftConfig { hop: 200, ..cfg };
        assert!(matches!(half.validate(), Err(DspError::NotCola { .. })));
        assert!(matches!(istft(&ComplexSpectrogram::zeros(3, 201, 16_000), &half), Err(DspError::NotCola { .. })));
    }

    #[test]
    fn accepted_configs() {
        for cfg in [
            StftConfig::default(),
            StftConfig { n_fft: 512, hop: 128, window: WindowKind::Hann },
            StftConfig { n_fft: 400, hop: 100, window: WindowKind::Hamming },
            StftConfig { n_fft: 256, hop: 256, window: WindowKind::Rectangular },
        ] {
            cfg.validate().unwrap();
        }
    }
}
