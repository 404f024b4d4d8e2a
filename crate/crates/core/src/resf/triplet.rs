use super::{
    band_energy_ratio, measured_snr_db, mix_at_snr_parts, spectral_subtract, FfrBand, ResfError, SubtractionConfig,
};
use crate::dsp::{StftConfig, Waveform};

/// One training/evaluation example: distorted detection, clean target and
/// the overlapped recording it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub distortion: Waveform,
    pub target: Waveform,
    pub mixture: Waveform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletSummary {
    pub achieved_snr_db: f64,
    /// FFR band energy of distortion over target.
    pub ffr_energy_ratio: f64,
    /// Band energy above the FFR, distortion over target.
    pub hfr_energy_ratio: f64,
}

/// Mixes `ego` into `human` at `snr_db`, then subtracts the scaled ego
/// track (oracle ego estimate) with FFR oversubtraction.
pub fn make_triplet(
    human: &Waveform,
    ego: &Waveform,
    snr_db: f64,
    cfg: &SubtractionConfig,
    ffr: &FfrBand,
    stft_cfg: &StftConfig,
) -> Result<(Triplet, TripletSummary), ResfError> {
    let parts = mix_at_snr_parts(human, ego, snr_db)?;
    let distortion = spectral_subtract(&parts.mixture, &parts.scaled_noise, cfg, ffr, stft_cfg)?;
    let (ffr_energy_ratio, hfr_energy_ratio) = band_energy_ratio(&distortion, human, stft_cfg, ffr)?;
    let summary = TripletSummary {
        achieved_snr_db: measured_snr_db(human, &parts.scaled_noise),
        ffr_energy_ratio,
        hfr_energy_ratio,
    };
    Ok((Triplet { distortion, target: human.clone(), mixture: parts.mixture }, summary))
}
