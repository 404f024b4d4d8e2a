//! Request and response bodies for the twomask HTTP API.
//!
//! Audio travels as plain sample arrays. Models travel as base64 of the
//! binary model file.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use twomask_core::config::PipelineConfig;
use twomask_core::dsp::{DspError, Waveform};
use twomask_core::twomask::{ToyGeneratorModel, TwoMaskError};

pub const API_PREFIX: &str = "/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformDto {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl From<&Waveform> for WaveformDto {
    fn from(w: &Waveform) -> Self {
        Self { sample_rate: w.sample_rate(), samples: w.samples().to_vec() }
    }
}

impl From<Waveform> for WaveformDto {
    fn from(w: Waveform) -> Self {
        let sample_rate = w.sample_rate();
        Self { sample_rate, samples: w.into_samples() }
    }
}

impl TryFrom<WaveformDto> for Waveform {
    type Error = DspError;

    fn try_from(dto: WaveformDto) -> Result<Self, DspError> {
        Waveform::new(dto.samples, dto.sample_rate)
    }
}

pub fn encode_model(model: &ToyGeneratorModel) -> String {
    STANDARD.encode(model.to_bytes())
}

pub fn decode_model(text: &str) -> Result<ToyGeneratorModel, TwoMaskError> {
    let bytes = STANDARD.decode(text).map_err(|e| TwoMaskError::ModelFormat(format!("bad base64: {e}")))?;
    ToyGeneratorModel::from_bytes(&bytes)
}

/// Error body returned with every non-2xx status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// One of `validation`, `io`, `numeric`, `not_found`.
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub human: WaveformDto,
    pub ego: WaveformDto,
    pub snr_db: f64,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletSummaryDto {
    pub achieved_snr_db: f64,
    pub ffr_energy_ratio: f64,
    pub hfr_energy_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResponse {
    pub distortion: WaveformDto,
    pub target: WaveformDto,
    pub mixture: WaveformDto,
    pub summary: TripletSummaryDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorDto {
    Identity,
    Oracle { target: WaveformDto },
    Toy { model_b64: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnhanceRequest {
    pub audio: WaveformDto,
    pub generator: GeneratorDto,
    /// Drive the incremental stream state machine instead of per-segment passes.
    #[serde(default)]
    pub streaming: bool,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhanceResponse {
    pub audio: WaveformDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainPair {
    pub distortion: WaveformDto,
    pub target: WaveformDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainRequest {
    pub pairs: Vec<TrainPair>,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResponse {
    pub model_b64: String,
    pub initial_loss: f64,
    /// Training loss after each epoch.
    pub losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptDto {
    pub utterance_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WerRequest {
    pub references: Vec<TranscriptDto>,
    pub hypotheses: Vec<TranscriptDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerFileWer {
    pub utterance_id: String,
    pub wer: f64,
}

/// Summary figures are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WerReportDto {
    pub per_file: Vec<PerFileWer>,
    pub mean: f64,
    pub std: f64,
    pub pct_le_20: f64,
    /// Human-readable table.
    pub text: String,
    /// Machine-readable table.
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateRequest {
    pub wers: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateResponse {
    pub mean: f64,
    pub std: f64,
    pub pct_le_20: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityRequest {
    pub estimate: WaveformDto,
    pub reference: WaveformDto,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityResponse {
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossRequest {
    pub estimate: WaveformDto,
    pub reference: WaveformDto,
    /// Discriminator score for the adversarial term; omitted means zero weight on it.
    #[serde(default)]
    pub discriminator_score: Option<f64>,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossResponse {
    pub mag: f64,
    pub ri: f64,
    pub time: f64,
    pub gan: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    pub generator: GeneratorDto,
    pub sample_rate: u32,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub buffer_len: usize,
    pub block_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushBufferRequest {
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDto {
    pub index: u64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushResponse {
    pub emitted: Option<BlockDto>,
}
