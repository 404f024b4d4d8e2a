//! A per-frame linear mask generator: each FFR bin's compensation is an
//! affine function of the frame's magnitudes above the FFR, and the
//! denoising mask is a per-bin gain table. Trained by block-coordinate
//! gradient descent with hand-derived gradients.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MaskGenerator, MaskPair, TwoMaskError};
use crate::dsp::{MagnitudeSpectrogram, TfGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainHyper {
    /// Step size as a fraction of the inverse curvature bound, in (0, 2].
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self { lr: 1.0, epochs: 300, seed: 0 }
    }
}

impl TrainHyper {
    pub fn validate(&self) -> Result<(), TwoMaskError> {
        if !(self.lr > 0.0 && self.lr <= 2.0) {
            return Err(TwoMaskError::InvalidHyper(format!("lr must be in (0, 2], got {}", self.lr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyGeneratorModel {
    bins: usize,
    ffr_bins: RangeInclusive<usize>,
    /// Row per FFR bin: one weight per HFR bin, then the bias.
    weights: Vec<f64>,
    gains: Vec<f64>,
}

impl ToyGeneratorModel {
    pub fn from_parts(
        bins: usize,
        ffr_bins: RangeInclusive<usize>,
        weights: Vec<f64>,
        gains: Vec<f64>,
    ) -> Result<Self, TwoMaskError> {
        if ffr_bins.is_empty() || *ffr_bins.end() >= bins {
            return Err(TwoMaskError::InvalidBand(format!("FFR bins {ffr_bins:?} do not fit {bins} bins")));
        }
        let width = bins - ffr_bins.end(); // HFR bins + bias
        let rows = ffr_bins.end() - ffr_bins.start() + 1;
        if weights.len() != rows * width {
            return Err(TwoMaskError::ShapeMismatch(format!("{} weights, expected {rows}x{width}", weights.len())));
        }
        if gains.len() != bins {
            return Err(TwoMaskError::ShapeMismatch(format!("{} gains, expected {bins}", gains.len())));
        }
        if weights.iter().chain(&gains).any(|v| !v.is_finite()) {
            return Err(TwoMaskError::ModelFormat("non-finite parameter".into()));
        }
        Ok(Self { bins, ffr_bins, weights, gains })
    }

    /// All weights zero, all gains one.
    pub fn zeroed(bins: usize, ffr_bins: RangeInclusive<usize>) -> Result<Self, TwoMaskError> {
        let width = bins.saturating_sub(*ffr_bins.end());
        let rows = (ffr_bins.end() + 1).saturating_sub(*ffr_bins.start());
        Self::from_parts(bins, ffr_bins, vec![0.0; rows * width], vec![1.0; bins])
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn ffr_bins(&self) -> &RangeInclusive<usize> {
        &self.ffr_bins
    }

    pub fn hfr_start(&self) -> usize {
        self.ffr_bins.end() + 1
    }

    pub fn hfr_count(&self) -> usize {
        self.bins - self.hfr_start()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    fn width(&self) -> usize {
        self.hfr_count() + 1
    }

    /// Unclamped compensation for FFR bin `k` given one frame of magnitudes.
    fn affine(&self, frame: &[f64], k: usize) -> f64 {
        let w = self.width();
        let row = &self.weights[(k - self.ffr_bins.start()) * w..][..w];
        let hfr = &frame[self.hfr_start()..];
        row[..w - 1].iter().zip(hfr).map(|(a, b)| a * b).sum::<f64>() + row[w - 1]
    }
}

impl MaskGenerator for ToyGeneratorModel {
    fn generate(&self, noisy: &MagnitudeSpectrogram) -> Result<MaskPair, TwoMaskError> {
        toy_generate(self, noisy)
    }
}

pub fn toy_generate(model: &ToyGeneratorModel, noisy: &MagnitudeSpectrogram) -> Result<MaskPair, TwoMaskError> {
    if noisy.bins() != model.bins {
        return Err(TwoMaskError::ShapeMismatch(format!("model has {} bins, input has {}", model.bins, noisy.bins())));
    }
    let (frames, bins) = noisy.grid().shape();
    let mut irm1 = TfGrid::zeros(frames, bins);
    for t in 0..frames {
        let frame = noisy.grid().row(t);
        for k in model.ffr_bins.clone() {
            irm1.set(t, k, model.affine(frame, k).max(0.0));
        }
    }
    let irm2 = TfGrid::from_fn(frames, bins, |_, k| model.gains[k].clamp(0.0, 1.0));
    MaskPair::new(irm1, irm2, model.ffr_bins.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: ToyGeneratorModel,
    pub initial_loss: f64,
    /// Loss after each epoch.
    pub losses: Vec<f64>,
}

/// Flattened training data. Features are HFR magnitudes scaled to unit RMS
/// per column plus a trailing bias column.
struct Corpus {
    rows: usize,
    bins: usize,
    width: usize,
    features: Vec<f64>,
    noisy: Vec<f64>,
    clean: Vec<f64>,
    scales: Vec<f64>,
}

impl Corpus {
    fn build(pairs: &[(MagnitudeSpectrogram, MagnitudeSpectrogram)], hfr_start: usize) -> Result<Self, TwoMaskError> {
        let bins = pairs[0].0.bins();
        for (i, (y, s)) in pairs.iter().enumerate() {
            if y.grid().shape() != s.grid().shape() || y.bins() != bins {
                return Err(TwoMaskError::ShapeMismatch(format!(
                    "pair {i}: noisy {:?}, clean {:?}, expected {bins} bins",
                    y.grid().shape(),
                    s.grid().shape()
                )));
            }
        }
        let hfr = bins - hfr_start;
        let width = hfr + 1;
        let rows: usize = pairs.iter().map(|(y, _)| y.frames()).sum();
        let mut features = Vec::with_capacity(rows * width);
        let mut noisy = Vec::with_capacity(rows * bins);
        let mut clean = Vec::with_capacity(rows * bins);
        for (y, s) in pairs {
            noisy.extend_from_slice(y.grid().as_slice());
            clean.extend_from_slice(s.grid().as_slice());
            for t in 0..y.frames() {
                features.extend_from_slice(&y.grid().row(t)[hfr_start..]);
                features.push(1.0);
            }
        }
        let mut scales = vec![0.0; width];
        for row in features.chunks(width) {
            for (acc, v) in scales.iter_mut().zip(row) {
                *acc += v * v;
            }
        }
        for s in scales.iter_mut() {
            *s = (*s / rows.max(1) as f64).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        scales[width - 1] = 1.0;
        for row in features.chunks_mut(width) {
            for (v, s) in row.iter_mut().zip(&scales) {
                *v /= s;
            }
        }
        Ok(Self { rows, bins, width, features, noisy, clean, scales })
    }

    fn feature(&self, r: usize) -> &[f64] {
        &self.features[r * self.width..(r + 1) * self.width]
    }

    /// Largest eigenvalue of XᵀX by power iteration.
    fn gram_spectral_radius(&self) -> f64 {
        let w = self.width;
        let mut gram = vec![0.0; w * w];
        for r in 0..self.rows {
            let x = self.feature(r);
            for i in 0..w {
                if x[i] == 0.0 {
                    continue;
                }
                let xi = x[i];
                for j in 0..w {
                    gram[i * w + j] += xi * x[j];
                }
            }
        }
        let mut v = vec![1.0 / (w as f64).sqrt(); w];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let next: Vec<f64> =
                (0..w).map(|i| gram[i * w..(i + 1) * w].iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let converged = (norm - lambda).abs() <= 1e-12 * norm;
            lambda = norm;
            v = next.into_iter().map(|x| x / norm).collect();
            if converged {
                break;
            }
        }
        // Power iteration approaches from below; pad to stay an upper bound.
        lambda * 1.01
    }
}

struct Params<'a> {
    ffr: &'a RangeInclusive<usize>,
    weights: &'a [f64],
    gains: &'a [f64],
}

impl Params<'_> {
    fn preactivation(&self, corpus: &Corpus, r: usize, k: usize) -> f64 {
        let w = corpus.width;
        let row = &self.weights[(k - self.ffr.start()) * w..][..w];
        row.iter().zip(corpus.feature(r)).map(|(a, b)| a * b).sum()
    }

    /// Compensation for every (row, FFR bin), row-major.
    fn compensation(&self, corpus: &Corpus) -> Vec<f64> {
        let n_ffr = self.ffr.end() - self.ffr.start() + 1;
        let mut out = Vec::with_capacity(corpus.rows * n_ffr);
        for r in 0..corpus.rows {
            for k in self.ffr.clone() {
                out.push(self.preactivation(corpus, r, k).max(0.0));
            }
        }
        out
    }

    fn loss(&self, corpus: &Corpus, comp: &[f64]) -> f64 {
        let n_ffr = self.ffr.end() - self.ffr.start() + 1;
        let mut total = 0.0;
        for r in 0..corpus.rows {
            for k in 0..corpus.bins {
                let add = if self.ffr.contains(&k) { comp[r * n_ffr + k - self.ffr.start()] } else { 0.0 };
                let idx = r * corpus.bins + k;
                let e = self.gains[k] * (corpus.noisy[idx] + add) - corpus.clean[idx];
                total += e * e;
            }
        }
        total / (corpus.rows * corpus.bins) as f64
    }
}

/// Fits a [`ToyGeneratorModel`] to `(noisy, clean)` magnitude pairs by
/// minimizing the mean squared error of `(Y_m + irm1) ⊙ irm2` against `S_m`.
///
/// Each epoch takes one gradient step on the compensation weights (step
/// `lr / L` with `L` bounding the curvature, halved on any loss increase)
/// followed by one projected step on the gains. The loss is therefore
/// non-increasing across epochs.
pub fn toy_train(
    pairs: &[(MagnitudeSpectrogram, MagnitudeSpectrogram)],
    ffr_bins: RangeInclusive<usize>,
    hyper: &TrainHyper,
) -> Result<TrainOutcome, TwoMaskError> {
    hyper.validate()?;
    if pairs.is_empty() {
        return Err(TwoMaskError::EmptyTrainingSet);
    }
    let bins = pairs[0].0.bins();
    if ffr_bins.is_empty() || *ffr_bins.end() >= bins {
        return Err(TwoMaskError::InvalidBand(format!("FFR bins {ffr_bins:?} do not fit {bins} bins")));
    }
    let corpus = Corpus::build(pairs, ffr_bins.end() + 1)?;
    if corpus.rows == 0 {
        return Err(TwoMaskError::EmptyTrainingSet);
    }
    let n_ffr = ffr_bins.end() - ffr_bins.start() + 1;
    let width = corpus.width;
    let norm = 2.0 / (corpus.rows * corpus.bins) as f64;

    // Small positive start: features are non-negative, so every
    // compensation unit begins active and receives gradient.
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut weights: Vec<f64> = (0..n_ffr * width).map(|_| rng.gen_range(1e-7..1e-6)).collect();
    let mut gains = vec![1.0; bins];

    let curvature = norm * corpus.gram_spectral_radius();
    let base_step = if curvature > 0.0 { hyper.lr / curvature } else { 0.0 };

    let params = |w: &'_ [f64], g: &'_ [f64]| -> (Vec<f64>, f64) {
        let p = Params { ffr: &ffr_bins, weights: w, gains: g };
        let comp = p.compensation(&corpus);
        let loss = p.loss(&corpus, &comp);
        (comp, loss)
    };
    let (mut comp, mut loss) = params(&weights, &gains);
    if !loss.is_finite() {
        return Err(TwoMaskError::NonFiniteLoss { epoch: 0 });
    }
    let initial_loss = loss;
    let mut losses = Vec::with_capacity(hyper.epochs);

    for epoch in 1..=hyper.epochs {
        // Weight step.
        let mut grad = vec![0.0; n_ffr * width];
        for r in 0..corpus.rows {
            let x = corpus.feature(r);
            for (j, k) in ffr_bins.clone().enumerate() {
                let c = comp[r * n_ffr + j];
                if c <= 0.0 {
                    continue;
                }
                let idx = r * corpus.bins + k;
                let e = gains[k] * (corpus.noisy[idx] + c) - corpus.clean[idx];
                let scale = norm * e * gains[k];
                for (g, xi) in grad[j * width..(j + 1) * width].iter_mut().zip(x) {
                    *g += scale * xi;
                }
            }
        }
        let mut step = base_step;
        for _ in 0..40 {
            if step == 0.0 {
                break;
            }
            let trial: Vec<f64> = weights.iter().zip(&grad).map(|(w, g)| w - step * g).collect();
            let (trial_comp, trial_loss) = params(&trial, &gains);
            if trial_loss <= loss {
                weights = trial;
                comp = trial_comp;
                break;
            }
            step *= 0.5;
        }

        // Gain step: the loss is a separate 1-D quadratic in each gain.
        for (k, gain) in gains.iter_mut().enumerate() {
            let (mut aa, mut ab) = (0.0, 0.0);
            for r in 0..corpus.rows {
                let idx = r * corpus.bins + k;
                let add = if ffr_bins.contains(&k) { comp[r * n_ffr + k - ffr_bins.start()] } else { 0.0 };
                let a = corpus.noisy[idx] + add;
                aa += a * a;
                ab += a * corpus.clean[idx];
            }
            if aa > 0.0 {
                let optimum = ab / aa;
                *gain = (*gain - hyper.lr * (*gain - optimum)).clamp(0.0, 1.0);
            }
        }
        let (c, l) = params(&weights, &gains);
        if !l.is_finite() {
            return Err(TwoMaskError::NonFiniteLoss { epoch });
        }
        comp = c;
        loss = l;
        losses.push(loss);
    }

    // Fold the feature scaling into the weights.
    for row in weights.chunks_mut(width) {
        for (w, s) in row.iter_mut().zip(&corpus.scales) {
            *w /= s;
        }
    }
    let model = ToyGeneratorModel::from_parts(bins, ffr_bins, weights, gains)?;
    Ok(TrainOutcome { model, initial_loss, losses })
}

/// Mean squared FFR-bin error of `(Y_m + irm1) ⊙ irm2` against `S_m` using
/// `model`'s masks. With `compensate = false`, `irm1` is forced to zero,
/// which gives the no-compensation baseline.
pub fn ffr_magnitude_mse(
    model: &ToyGeneratorModel,
    pairs: &[(MagnitudeSpectrogram, MagnitudeSpectrogram)],
    compensate: bool,
) -> Result<f64, TwoMaskError> {
    let (mut sum, mut count) = (0.0, 0usize);
    for (noisy, clean) in pairs {
        let masks = toy_generate(model, noisy)?;
        let masks = if compensate {
            masks
        } else {
            MaskPair::new(TfGrid::zeros(noisy.frames(), noisy.bins()), masks.irm2().clone(), model.ffr_bins.clone())?
        };
        let out = masks.apply_to_magnitude(noisy.grid())?;
        if clean.grid().shape() != out.shape() {
            return Err(TwoMaskError::ShapeMismatch("clean reference shape".into()));
        }
        for t in 0..out.frames() {
            for k in model.ffr_bins.clone() {
                sum += (out.get(t, k) - clean.get(t, k)).powi(2);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(TwoMaskError::EmptyTrainingSet);
    }
    Ok(sum / count as f64)
}
