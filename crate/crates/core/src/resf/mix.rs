use std::f64::consts::PI;

use super::ResfError;
use crate::dsp::Waveform;

const CROSSFADE_SECS: f64 = 0.010;

/// Repeats or crops `noise` to `len` samples. Repeats are joined with a
/// 10 ms raised-cosine crossfade; cropping always starts at offset 0.
pub fn tile_noise(noise: &[f64], len: usize, sample_rate: u32) -> Vec<f64> {
    if noise.is_empty() {
        return vec![0.0; len];
    }
    if noise.len() >= len {
        return noise[..len].to_vec();
    }
    let xfade = ((CROSSFADE_SECS * sample_rate as f64).round() as usize).min(noise.len() / 2);
    let mut out = Vec::with_capacity(len + noise.len());
    out.extend_from_slice(noise);
    while out.len() < len {
        let join = out.len() - xfade;
        for (i, &v) in noise[..xfade].iter().enumerate() {
            let fade_in = 0.5 - 0.5 * (PI * (i as f64 + 0.5) / xfade as f64).cos();
            out[join + i] = out[join + i] * (1.0 - fade_in) + v * fade_in;
        }
        out.extend_from_slice(&noise[xfade..]);
    }
    out.truncate(len);
    out
}

/// Result of scaling a noise track into speech.
#[derive(Debug, Clone, PartialEq)]
pub struct MixParts {
    pub mixture: Waveform,
    /// The noise as it appears inside `mixture`: tiled/cropped and scaled.
    pub scaled_noise: Waveform,
    pub gain: f64,
}

/// `speech + g·noise` with `g = (rms(speech)/rms(noise))·10^(-snr/20)`,
/// the noise first tiled or cropped to the speech length.
pub fn mix_at_snr_parts(speech: &Waveform, noise: &Waveform, snr_db: f64) -> Result<MixParts, ResfError> {
    if speech.sample_rate() != noise.sample_rate() {
        return Err(ResfError::SampleRateMismatch(speech.sample_rate(), noise.sample_rate()));
    }
    if !snr_db.is_finite() {
        return Err(ResfError::Dsp(crate::dsp::DspError::InvalidValue(format!("SNR {snr_db} dB"))));
    }
    let sr = speech.sample_rate();
    let fitted = Waveform::new(tile_noise(noise.samples(), speech.len(), sr), sr)?;
    let (speech_rms, noise_rms) = (speech.rms(), fitted.rms());
    if noise_rms == 0.0 {
        return Err(ResfError::SilentNoise);
    }
    if speech_rms == 0.0 {
        return Err(ResfError::SilentSpeech);
    }
    let gain = speech_rms / noise_rms * 10f64.powf(-snr_db / 20.0);
    let scaled: Vec<f64> = fitted.samples().iter().map(|n| gain * n).collect();
    let mixture: Vec<f64> = speech.samples().iter().zip(&scaled).map(|(s, n)| s + n).collect();
    Ok(MixParts { mixture: Waveform::new(mixture, sr)?, scaled_noise: Waveform::new(scaled, sr)?, gain })
}

pub fn mix_at_snr(speech: &Waveform, noise: &Waveform, snr_db: f64) -> Result<Waveform, ResfError> {
    mix_at_snr_parts(speech, noise, snr_db).map(|p| p.mixture)
}

/// `10·log10(P_speech / P_noise)` over whole signals.
pub fn measured_snr_db(speech: &Waveform, noise: &Waveform) -> f64 {
    10.0 * (speech.power() / noise.power()).log10()
}
