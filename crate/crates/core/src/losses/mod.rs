//! Generator and discriminator losses plus a reference-based quality score.
//!
//! The TF loss is a weighted sum of the magnitude MSE and the real/imaginary
//! MSEs, the waveform loss is the mean absolute error, and the adversarial
//! terms use the least-squares form.

mod quality;

pub use quality::{quality_proxy, quality_proxy_with, QualityConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{ComplexSpectrogram, DspError, MelSpectrogram, TfGrid, Waveform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LossError {
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("discriminator returned {0}, outside [0, 1]")]
    ScorerContract(f64),
    #[error("invalid loss weights: {0}")]
    InvalidWeights(String),
    #[error("reference signal is silent")]
    SilentReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossWeights {
    pub w_mag: f64,
    pub w_ri: f64,
    pub w_time: f64,
    pub w_gan: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { w_mag: 0.9, w_ri: 0.1, w_time: 0.2, w_gan: 0.05 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), LossError> {
        let all = [self.w_mag, self.w_ri, self.w_time, self.w_gan];
        if all.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(LossError::InvalidWeights(format!("weights must be finite and >= 0, got {all:?}")));
        }
        if all.iter().all(|&w| w == 0.0) {
            return Err(LossError::InvalidWeights("at least one weight must be positive".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { w_mag: c * self.w_mag, w_ri: c * self.w_ri, w_time: c * self.w_time, w_gan: c * self.w_gan }
    }
}

/// Normalized quality in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct QualityScore(f64);

impl QualityScore {
    pub fn new(q: f64) -> Result<Self, LossError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(LossError::ScoreOutOfRange(q));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Scores how close `candidate` is to `reference`, in `[0, 1]`.
pub trait DiscriminatorScorer {
    fn score(&self, reference: &MelSpectrogram, candidate: &MelSpectrogram) -> f64;
}

impl<F: Fn(&MelSpectrogram, &MelSpectrogram) -> f64> DiscriminatorScorer for F {
    fn score(&self, reference: &MelSpectrogram, candidate: &MelSpectrogram) -> f64 {
        self(reference, candidate)
    }
}

fn same_shape(a: &ComplexSpectrogram, b: &ComplexSpectrogram) -> Result<(), LossError> {
    if (a.frames(), a.bins()) != (b.frames(), b.bins()) {
        return Err(LossError::ShapeMismatch(format!("{}x{} vs {}x{}", a.frames(), a.bins(), b.frames(), b.bins())));
    }
    Ok(())
}

/// Unweighted TF components: `(MSE(|Ŝ|, |S|), MSE(Ŝ_r, S_r) + MSE(Ŝ_i, S_i))`.
pub fn loss_tf_parts(s_hat: &ComplexSpectrogram, s: &ComplexSpectrogram) -> Result<(f64, f64), LossError> {
    same_shape(s_hat, s)?;
    let n = s.real().as_slice().len().max(1) as f64;
    let (mut mag, mut ri) = (0.0, 0.0);
    let planes = s_hat.real().as_slice().iter().zip(s_hat.imag().as_slice());
    for ((hr, hi), (r, i)) in planes.zip(s.real().as_slice().iter().zip(s.imag().as_slice())) {
        mag += (hr.hypot(*hi) - r.hypot(*i)).powi(2);
        ri += (hr - r).powi(2) + (hi - i).powi(2);
    }
    Ok((mag / n, ri / n))
}

pub fn loss_tf(s_hat: &ComplexSpectrogram, s: &ComplexSpectrogram, w: &LossWeights) -> Result<f64, LossError> {
    let (mag, ri) = loss_tf_parts(s_hat, s)?;
    Ok(w.w_mag * mag + w.w_ri * ri)
}

/// Gradient of [`loss_tf`] with respect to the real and imaginary planes of
/// `s_hat`. The magnitude term's gradient is taken as zero at `|Ŝ| = 0`.
pub fn loss_tf_grad(
    s_hat: &ComplexSpectrogram,
    s: &ComplexSpectrogram,
    w: &LossWeights,
) -> Result<(TfGrid, TfGrid), LossError> {
    same_shape(s_hat, s)?;
    let (frames, bins) = (s.frames(), s.bins());
    let n = (frames * bins).max(1) as f64;
    let mut gr = TfGrid::zeros(frames, bins);
    let mut gi = TfGrid::zeros(frames, bins);
    for t in 0..frames {
        for k in 0..bins {
            let (hr, hi) = (s_hat.real().get(t, k), s_hat.imag().get(t, k));
            let (r, i) = (s.real().get(t, k), s.imag().get(t, k));
            let hm = hr.hypot(hi);
            let (mut dr, mut di) = (2.0 * w.w_ri * (hr - r) / n, 2.0 * w.w_ri * (hi - i) / n);
            if hm > 0.0 {
                let c = 2.0 * w.w_mag * (hm - r.hypot(i)) / (n * hm);
                dr += c * hr;
                di += c * hi;
            }
            gr.set(t, k, dr);
            gi.set(t, k, di);
        }
    }
    Ok((gr, gi))
}

pub fn loss_time(s_hat: &Waveform, s: &Waveform) -> Result<f64, LossError> {
    if s_hat.len() != s.len() {
        return Err(LossError::ShapeMismatch(format!("{} vs {} samples", s_hat.len(), s.len())));
    }
    if s.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = s_hat.samples().iter().zip(s.samples()).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / s.len() as f64)
}

/// Subgradient of [`loss_time`]: `sign(ŝ − s) / N`, zero where they agree.
pub fn loss_time_grad(s_hat: &Waveform, s: &Waveform) -> Result<Vec<f64>, LossError> {
    if s_hat.len() != s.len() {
        return Err(LossError::ShapeMismatch(format!("{} vs {} samples", s_hat.len(), s.len())));
    }
    let n = s.len().max(1) as f64;
    Ok(s_hat
        .samples()
        .iter()
        .zip(s.samples())
        .map(|(a, b)| {
            let d = a - b;
            if d > 0.0 {
                1.0 / n
            } else if d < 0.0 {
                -1.0 / n
            } else {
                0.0
            }
        })
        .collect())
}

/// `(d − 1)²`.
pub fn loss_gan(d_score: f64) -> Result<f64, LossError> {
    if !(0.0..=1.0).contains(&d_score) {
        return Err(LossError::ScoreOutOfRange(d_score));
    }
    Ok((d_score - 1.0).powi(2))
}

/// `(D(X, X) − 1)² + (D(X, X̂) − q)²`: the clean pair is driven to 1 and the
/// enhanced pair to the normalized quality score.
pub fn loss_discriminator(
    d: &dyn DiscriminatorScorer,
    x_mel: &MelSpectrogram,
    x_hat_mel: &MelSpectrogram,
    q: QualityScore,
) -> Result<f64, LossError> {
    if x_mel.grid().shape() != x_hat_mel.grid().shape() {
        return Err(LossError::ShapeMismatch(format!(
            "mel {:?} vs {:?}",
            x_mel.grid().shape(),
            x_hat_mel.grid().shape()
        )));
    }
    let checked = |v: f64| if (0.0..=1.0).contains(&v) { Ok(v) } else { Err(LossError::ScorerContract(v)) };
    let clean = checked(d.score(x_mel, x_mel))?;
    let enhanced = checked(d.score(x_mel, x_hat_mel))?;
    Ok((clean - 1.0).powi(2) + (enhanced - q.value()).powi(2))
}

/// Raw, unweighted generator loss components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub mag: f64,
    pub ri: f64,
    pub time: f64,
    pub gan: f64,
}

/// `w_mag·mag + w_ri·ri + w_time·time + w_gan·gan`.
pub fn combined_generator_loss(parts: &LossParts, w: &LossWeights) -> f64 {
    w.w_mag * parts.mag + w.w_ri * parts.ri + w.w_time * parts.time + w.w_gan * parts.gan
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(frames: usize, bins: usize, r: f64, i: f64) -> ComplexSpectrogram {
        ComplexSpectrogram::new(
            TfGrid::from_fn(frames, bins, |_, _| r),
            TfGrid::from_fn(frames, bins, |_, _| i),
            16_000,
        )
        .unwrap()
    }

    fn mel() -> MelSpectrogram {
        MelSpectrogram::new(TfGrid::from_fn(3, 128, |t, m| (t + m) as f64)).unwrap()
    }

    #[test]
    fn tf_loss_examples() {
        let w = LossWeights { w_mag: 1.0, w_ri: 1.0, w_time: 0.0, w_gan: 0.0 };
        let s = spec(3, 5, 0.3, -0.2);
        assert_eq!(loss_tf(&s, &s, &w).unwrap(), 0.0);
        assert_eq!(loss_tf(&spec(3, 5, 1.0, 0.0), &spec(3, 5, 0.0, 0.0), &w).unwrap(), 2.0);
        assert!(loss_tf(&spec(3, 5, 1.0, 0.0), &spec(2, 5, 0.0, 0.0), &w).is_err());
    }

    #[test]
    fn time_loss_examples() {
        let zero = Waveform::zeros(10, 16_000);
        let half = Waveform::new(vec![0.5; 10], 16_000).unwrap();
        assert_eq!(loss_time(&zero, &zero).unwrap(), 0.0);
        assert_eq!(loss_time(&half, &zero).unwrap(), 0.5);
        assert!(loss_time(&half, &Waveform::zeros(9, 16_000)).is_err());
    }

    #[test]
    fn gan_loss_examples() {
        assert_eq!(loss_gan(1.0).unwrap(), 0.0);
        assert_eq!(loss_gan(0.0).unwrap(), 1.0);
        assert_eq!(loss_gan(0.5).unwrap(), 0.25);
        assert!(matches!(loss_gan(1.2), Err(LossError::ScoreOutOfRange(_))));
    }

    #[test]
    fn discriminator_loss_examples() {
        let x = mel();
        let x_hat = MelSpectrogram::new(x.grid().map(|v| 0.5 * v)).unwrap();
        let q = QualityScore::new(0.7).unwrap();
        let perfect = |a: &MelSpectrogram, b: &MelSpectrogram| if a == b { 1.0 } else { 0.7 };
        assert_eq!(loss_discriminator(&perfect, &x, &x_hat, q).unwrap(), 0.0);
        let half = |_: &MelSpectrogram, _: &MelSpectrogram| 0.5;
        assert_eq!(loss_discriminator(&half, &x, &x_hat, QualityScore::new(1.0).unwrap()).unwrap(), 0.5);
        let one = |_: &MelSpectrogram, _: &MelSpectrogram| 1.0;
        assert_eq!(loss_discriminator(&one, &x, &x_hat, QualityScore::new(0.0).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn scorer_contract_violation_is_an_error() {
        let x = mel();
        let rogue = |_: &MelSpectrogram, _: &MelSpectrogram| 1.3;
        assert_eq!(
            loss_discriminator(&rogue, &x, &x, QualityScore::new(0.5).unwrap()),
            Err(LossError::ScorerContract(1.3))
        );
        let other = MelSpectrogram::new(TfGrid::zeros(2, 128)).unwrap();
        let fine = |_: &MelSpectrogram, _: &MelSpectrogram| 0.5;
        assert!(matches!(
            loss_discriminator(&fine, &x, &other, QualityScore::new(0.5).unwrap()),
            Err(LossError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn constant_scorer_minimum_matches_least_squares() {
        // (c − 1)² + (c − q)² is minimized at c = (1 + q)/2.
        let x = mel();
        for q in [0.0, 0.3, 0.8, 1.0] {
            let qs = QualityScore::new(q).unwrap();
            let best = (0..=1000)
                .map(|i| i as f64 / 1000.0)
                .min_by(|a, b| {
                    let la = loss_discriminator(&|_: &MelSpectrogram, _: &MelSpectrogram| *a, &x, &x, qs).unwrap();
                    let lb = loss_discriminator(&|_: &MelSpectrogram, _: &MelSpectrogram| *b, &x, &x, qs).unwrap();
                    la.total_cmp(&lb)
                })
                .unwrap();
            assert!((best - (1.0 + q) / 2.0).abs() <= 5e-4, "q={q} best={best}");
        }
    }

    #[test]
    fn combined_loss_examples() {
        let w = LossWeights { w_mag: 1.0, w_ri: 0.3, w_time: 1.0, w_gan: 1.0 };
        assert_eq!(combined_generator_loss(&LossParts::default(), &w), 0.0);
        let parts = LossParts { mag: 2.0, ri: 0.0, time: 0.5, gan: 0.25 };
        assert_eq!(combined_generator_loss(&parts, &w), 2.75);
        let full = LossParts { mag: 1.5, ri: 0.4, time: 0.5, gan: 0.25 };
        assert_eq!(combined_generator_loss(&full, &w.scaled(2.0)), 2.0 * combined_generator_loss(&full, &w));
    }

    #[test]
    fn weight_validation() {
        LossWeights::default().validate().unwrap();
        assert!(LossWeights { w_mag: 0.0, w_ri: 0.0, w_time: 0.0, w_gan: 0.0 }.validate().is_err());
        assert!(LossWeights { w_mag: -1.0, ..Default::default() }.validate().is_err());
        assert!(QualityScore::new(1.01).is_err());
    }
}
