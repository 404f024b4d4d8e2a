use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use twomask_core::config::PipelineConfig;
use twomask_core::dsp::{stft_padded, Waveform};
use twomask_core::eval::{aggregate, evaluate_pairs, Transcript};
use twomask_core::losses::{
    combined_generator_loss, loss_gan, loss_tf_parts, loss_time, quality_proxy_with, LossParts,
};
use twomask_core::pipeline::{enhance_waveform, GeneratorChoice, WindowEnhancer};
use twomask_core::resf::make_triplet;
use twomask_core::stream::StreamState;
use twomask_core::twomask::{toy_train, MaskEnhancer};
use twomask_proto::*;
use uuid::Uuid;

use crate::error::{rejected, ApiError};
use crate::{AppState, Session};

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn effective(config: Option<PipelineConfig>) -> Result<PipelineConfig, ApiError> {
    let cfg = config.unwrap_or_default();
    cfg.validate()?;
    Ok(cfg)
}

fn waveform(dto: WaveformDto, what: &str) -> Result<Waveform, ApiError> {
    Waveform::try_from(dto).map_err(|e| ApiError::validation(format!("{what}: {e}")))
}

fn generator(dto: GeneratorDto) -> Result<GeneratorChoice, ApiError> {
    Ok(match dto {
        GeneratorDto::Identity => GeneratorChoice::Identity,
        GeneratorDto::Oracle { target } => GeneratorChoice::Oracle { target: waveform(target, "oracle target")? },
        GeneratorDto::Toy { model_b64 } => GeneratorChoice::Toy { model: decode_model(&model_b64)? },
    })
}

pub async fn health() -> Json<HealthResponse> {
    Json(HealthResponse { status: "ok".into(), version: env!("CARGO_PKG_VERSION").into() })
}

pub async fn simulate(body: Result<Json<SimulateRequest>, JsonRejection>) -> ApiResult<SimulateResponse> {
    let Json(req) = body.map_err(rejected)?;
    blocking(move || {
        let cfg = effective(req.config)?;
        let human = waveform(req.human, "human")?;
        let ego = waveform(req.ego, "ego")?;
        let (tri, s) = make_triplet(&human, &ego, req.snr_db, &cfg.subtraction, &cfg.ffr, &cfg.stft)?;
        Ok(Json(SimulateResponse {
            distortion: tri.distortion.into(),
            target: tri.target.into(),
            mixture: tri.mixture.into(),
            summary: TripletSummaryDto {
                achieved_snr_db: s.achieved_snr_db,
                ffr_energy_ratio: s.ffr_energy_ratio,
                hfr_energy_ratio: s.hfr_energy_ratio,
            },
        }))
    })
    .await
}

pub async fn enhance(body: Result<Json<EnhanceRequest>, JsonRejection>) -> ApiResult<EnhanceResponse> {
    let Json(req) = body.map_err(rejected)?;
    blocking(move || {
        let cfg = effective(req.config)?;
        let audio = waveform(req.audio, "audio")?;
        let choice = generator(req.generator)?;
        let out = enhance_waveform(&audio, choice, cfg.enhance_config(), cfg.stream, req.streaming)?;
        Ok(Json(EnhanceResponse { audio: out.into() }))
    })
    .await
}

pub async fn train(body: Result<Json<TrainRequest>, JsonRejection>) -> ApiResult<TrainResponse> {
    let Json(req) = body.map_err(rejected)?;
    blocking(move || {
        let cfg = effective(req.config)?;
        let enhancer = MaskEnhancer::new(cfg.enhance_config())?;
        let mut sample_rate = None;
        let mut pairs = Vec::with_capacity(req.pairs.len());
        for (i, p) in req.pairs.into_iter().enumerate() {
            let distortion = waveform(p.distortion, &format!("pair {i} distortion"))?;
            let target = waveform(p.target, &format!("pair {i} target"))?;
            if distortion.len() != target.len() || distortion.sample_rate() != target.sample_rate() {
                return Err(ApiError::validation(format!("pair {i}: distortion and target differ in length or rate")));
            }
            if *sample_rate.get_or_insert(target.sample_rate()) != target.sample_rate() {
                return Err(ApiError::validation(format!("pair {i}: sample rate differs from pair 0")));
            }
            pairs.push((enhancer.analyze(&distortion)?, enhancer.analyze(&target)?));
        }
        let bins = enhancer.ffr_bins(sample_rate.unwrap_or(cfg.sample_rate))?;
        let outcome = toy_train(&pairs, bins, &cfg.train)?;
        Ok(Json(TrainResponse {
            model_b64: encode_model(&outcome.model),
            initial_loss: outcome.initial_loss,
            losses: outcome.losses,
        }))
    })
    .await
}

pub async fn eval_wer(body: Result<Json<WerRequest>, JsonRejection>) -> ApiResult<WerReportDto> {
    let Json(req) = body.map_err(rejected)?;
    let to_core = |v: Vec<TranscriptDto>| -> Vec<Transcript> {
        v.into_iter().map(|t| Transcript::new(t.utterance_id, &t.text)).collect()
    };
    let report = evaluate_pairs(&to_core(req.references), &to_core(req.hypotheses))?;
    Ok(Json(WerReportDto {
        per_file: report.per_file.iter().map(|(id, wer)| PerFileWer { utterance_id: id.clone(), wer: *wer }).collect(),
        mean: report.summary.mean,
        std: report.summary.std,
        pct_le_20: report.summary.pct_le_20,
        text: report.to_text(),
        csv: report.to_csv(),
    }))
}

pub async fn eval_aggregate(body: Result<Json<AggregateRequest>, JsonRejection>) -> ApiResult<AggregateResponse> {
    let Json(req) = body.map_err(rejected)?;
    let s = aggregate(&req.wers)?;
    Ok(Json(AggregateResponse { mean: s.mean, std: s.std, pct_le_20: s.pct_le_20 }))
}

pub async fn quality(body: Result<Json<QualityRequest>, JsonRejection>) -> ApiResult<QualityResponse> {
    let Json(req) = body.map_err(rejected)?;
    blocking(move || {
        let cfg = effective(req.config)?;
        let estimate = waveform(req.estimate, "estimate")?;
        let reference = waveform(req.reference, "reference")?;
        let q = quality_proxy_with(&estimate, &reference, &cfg.stft, &cfg.losses.quality())?;
        Ok(Json(QualityResponse { score: q.value() }))
    })
    .await
}

pub async fn losses(body: Result<Json<LossRequest>, JsonRejection>) -> ApiResult<LossResponse> {
    let Json(req) = body.map_err(rejected)?;
    blocking(move || {
        let cfg = effective(req.config)?;
        let estimate = waveform(req.estimate, "estimate")?;
        let reference = waveform(req.reference, "reference")?;
        let (s_hat, _) = stft_padded(&estimate, &cfg.stft)?;
        let (s, _) = stft_padded(&reference, &cfg.stft)?;
        let (mag, ri) = loss_tf_parts(&s_hat, &s)?;
        let time = loss_time(&estimate, &reference)?;
        let (gan, weights) = match req.discriminator_score {
            Some(d) => (loss_gan(d)?, cfg.losses.weights()),
            None => (0.0, twomask_core::losses::LossWeights { w_gan: 0.0, ..cfg.losses.weights() }),
        };
        let parts = LossParts { mag, ri, time, gan };
        Ok(Json(LossResponse { mag, ri, time, gan, total: combined_generator_loss(&parts, &weights) }))
    })
    .await
}

pub async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateSessionRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionInfo>), ApiError> {
    let Json(req) = body.map_err(rejected)?;
    let cfg = effective(req.config)?;
    let choice = generator(req.generator)?;
    if let GeneratorChoice::Oracle { target } = &choice {
        if target.sample_rate() != req.sample_rate {
            return Err(ApiError::validation("oracle target sample rate differs from the session's"));
        }
    }
    let stream = StreamState::new(cfg.stream, req.sample_rate)?;
    let enhancer = WindowEnhancer::new(choice, cfg.enhance_config())?;
    let info = SessionInfo {
        session_id: Uuid::new_v4().to_string(),
        buffer_len: stream.buffer_len(),
        block_len: stream.block_len(),
    };
    let session = Arc::new(Mutex::new(Session { stream, enhancer }));
    state.sessions.lock().expect("session map poisoned").insert(info.session_id.clone(), session);
    Ok((StatusCode::CREATED, Json(info)))
}

fn session(state: &AppState, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    state
        .sessions
        .lock()
        .expect("session map poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no session {id}")))
}

fn block(b: Option<twomask_core::stream::EmittedBlock>) -> PushResponse {
    PushResponse { emitted: b.map(|b| BlockDto { index: b.index, samples: b.samples }) }
}

pub async fn push_buffer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<PushBufferRequest>, JsonRejection>,
) -> ApiResult<PushResponse> {
    let Json(req) = body.map_err(rejected)?;
    let session = session(&state, &id)?;
    blocking(move || {
        let mut guard = session.lock().map_err(|_| ApiError::internal("session poisoned"))?;
        let Session { stream, enhancer } = &mut *guard;
        Ok(Json(block(stream.push_buffer(&req.samples, enhancer)?)))
    })
    .await
}

pub async fn flush(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<PushResponse> {
    let session = session(&state, &id)?;
    blocking(move || {
        let mut guard = session.lock().map_err(|_| ApiError::internal("session poisoned"))?;
        let Session { stream, enhancer } = &mut *guard;
        Ok(Json(block(stream.flush(enhancer)?)))
    })
    .await
}

pub async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match state.sessions.lock().expect("session map poisoned").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found(format!("no session {id}"))),
    }
}
