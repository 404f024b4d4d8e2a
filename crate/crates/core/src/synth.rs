//! Synthetic signals standing in for recorded corpora: a harmonic "human"
//! voice and a robot ego voice concentrated in the FFR.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rand::Rng;

use crate::dsp::{decompose, stft_padded, DspError, MagnitudeSpectrogram, StftConfig, TfGrid, Waveform};

pub const HUMAN_F0_HZ: RangeInclusive<f64> = 100.0..=300.0;
pub const HUMAN_HARMONICS: usize = 5;

/// Harmonic voice with `1/h` harmonic amplitudes, a fixed F0 drawn from
/// [`HUMAN_F0_HZ`], random phases and a syllable-rate envelope.
pub fn human_voice(len: usize, sample_rate: u32, rng: &mut impl Rng) -> Waveform {
    let f0 = rng.gen_range(HUMAN_F0_HZ);
    let phases: Vec<f64> = (0..HUMAN_HARMONICS).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let syllable_hz = rng.gen_range(3.0..5.0);
    let env_phase = rng.gen_range(0.0..2.0 * PI);
    let sr = sample_rate as f64;
    let samples = (0..len)
        .map(|i| {
            let t = i as f64 / sr;
            let env = 0.55 - 0.45 * (2.0 * PI * syllable_hz * t + env_phase).cos();
            let tone: f64 = phases
                .iter()
                .enumerate()
                .map(|(h, ph)| {
                    let h = (h + 1) as f64;
                    (2.0 * PI * f0 * h * t + ph).sin() / h
                })
                .sum();
            0.15 * env * tone
        })
        .collect();
    Waveform::new(samples, sample_rate).expect("synthetic samples are finite")
}

/// Sum of random partials between 50 and 450 Hz.
pub fn robot_ego(len: usize, sample_rate: u32, rng: &mut impl Rng) -> Waveform {
    let partials: Vec<(f64, f64, f64)> =
        (0..40).map(|_| (rng.gen_range(50.0..450.0), rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI))).collect();
    let sr = sample_rate as f64;
    let samples = (0..len)
        .map(|i| {
            let t = i as f64 / sr;
            0.02 * partials.iter().map(|(f, a, ph)| a * (2.0 * PI * f * t + ph).sin()).sum::<f64>()
        })
        .collect();
    Waveform::new(samples, sample_rate).expect("synthetic samples are finite")
}

/// A (noisy, clean) magnitude pair: the clean voice's padded-STFT
/// magnitudes with the FFR bins zeroed, as total oversubtraction leaves them.
pub fn zeroed_ffr_pair(
    clean: &Waveform,
    stft_cfg: &StftConfig,
    ffr_bins: RangeInclusive<usize>,
) -> Result<(MagnitudeSpectrogram, MagnitudeSpectrogram), DspError> {
    let (spec, _) = stft_padded(clean, stft_cfg)?;
    let (mag, _) = decompose(&spec);
    let g = mag.grid();
    let noisy = TfGrid::from_fn(g.frames(), g.bins(), |t, k| if ffr_bins.contains(&k) { 0.0 } else { g.get(t, k) });
    Ok((MagnitudeSpectrogram::new(noisy)?, mag))
}

/// `count` independent harmonic voices as zeroed-FFR training pairs.
pub fn harmonic_corpus(
    count: usize,
    len: usize,
    sample_rate: u32,
    stft_cfg: &StftConfig,
    ffr_bins: RangeInclusive<usize>,
    rng: &mut impl Rng,
) -> Result<Vec<(MagnitudeSpectrogram, MagnitudeSpectrogram)>, DspError> {
    (0..count).map(|_| zeroed_ffr_pair(&human_voice(len, sample_rate, rng), stft_cfg, ffr_bins.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn signals_are_bounded_and_deterministic() {
        let a = human_voice(16_000, 16_000, &mut ChaCha8Rng::seed_from_u64(3));
        let b = human_voice(16_000, 16_000, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.samples().iter().all(|v| v.abs() < 1.0));
        let e = robot_ego(16_000, 16_000, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(e.samples().iter().all(|v| v.abs() < 1.0));
        assert!(e.rms() > 0.0);
    }

    #[test]
    fn ego_energy_sits_in_the_ffr() {
        let e = robot_ego(16_000, 16_000, &mut ChaCha8Rng::seed_from_u64(5));
        let (spec, _) = stft_padded(&e, &StftConfig::default()).unwrap();
        let (mag, _) = decompose(&spec);
        let energy = |ks: std::ops::Range<usize>| -> f64 {
            (0..mag.frames()).map(|t| ks.clone().map(|k| mag.get(t, k).powi(2)).sum::<f64>()).sum()
        };
        let inside = energy(1..12);
        let outside = energy(14..201);
        assert!(outside < 1e-3 * inside, "{outside} vs {inside}");
    }

    #[test]
    fn corpus_pairs_zero_only_the_ffr() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pairs = harmonic_corpus(2, 4_000, 16_000, &StftConfig::default(), 1..=11, &mut rng).unwrap();
        for (noisy, clean) in &pairs {
            for t in 0..noisy.frames() {
                for k in 0..noisy.bins() {
                    let expect = if (1..=11).contains(&k) { 0.0 } else { clean.get(t, k) };
                    assert_eq!(noisy.get(t, k), expect);
                }
            }
        }
    }
}
