use std::path::{Path, PathBuf};

use twomask_client::Client;
use twomask_core::config::PipelineConfig;
use twomask_core::dsp::{read_wav, write_wav, Waveform};
use twomask_core::eval::{read_transcripts, run_asr, Transcript};
use twomask_core::resf::{parse_manifest, NINE_GLOBAL_SNRS_DB};
use twomask_core::twomask::ToyGeneratorModel;
use twomask_proto::*;

use crate::error::CliError;
use crate::run_manifest::{sidecar_for, RunManifest};

pub struct Context {
    pub client: Client,
    pub config: PipelineConfig,
}

impl Context {
    fn config(&self) -> Option<PipelineConfig> {
        Some(self.config.clone())
    }

    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, &self.config.to_toml())
    }
}

fn read(path: &Path) -> Result<Waveform, CliError> {
    read_wav(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, w: &Waveform) -> Result<(), CliError> {
    write_wav(path, w).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn waveform(dto: WaveformDto) -> Result<Waveform, CliError> {
    Waveform::try_from(dto).map_err(|e| CliError::io(format!("malformed audio from service: {e}")))
}

fn out_dir(out: Option<&Path>) -> Result<&Path, CliError> {
    let dir = out.ok_or_else(|| CliError::validation("--out <dir> is required for this command"))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "audio".into())
}

pub async fn simulate(ctx: &Context, manifest: &Path, snr_sweep: bool, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| CliError::io(format!("{}: {e}", manifest.display())))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let rows = parse_manifest(&text, base).map_err(|e| CliError::validation(format!("{}: {e}", manifest.display())))?;
    let dir = out_dir(out)?;
    let mut record = ctx.manifest("simulate");
    record.input(manifest)?;
    if rows.is_empty() {
        eprintln!("warning: {} lists no rows; nothing written", manifest.display());
    }
    for (i, row) in rows.iter().enumerate() {
        let human = read(&row.human)?;
        let ego = read(&row.ego)?;
        record.input(&row.human)?;
        record.input(&row.ego)?;
        let snrs: Vec<f64> = if snr_sweep { NINE_GLOBAL_SNRS_DB.to_vec() } else { vec![row.snr_db] };
        for snr_db in snrs {
            let resp = ctx
                .client
                .simulate(&SimulateRequest { human: (&human).into(), ego: (&ego).into(), snr_db, config: ctx.config() })
                .await?;
            let prefix = format!("{:03}_{}_snr{snr_db}", i + 1, stem(&row.human));
            for (suffix, dto) in [("distortion", resp.distortion), ("target", resp.target), ("mixture", resp.mixture)] {
                let path = dir.join(format!("{prefix}.{suffix}.wav"));
                write(&path, &waveform(dto)?)?;
                record.output(&path);
            }
            let s = resp.summary;
            println!(
                "row {} snr {snr_db} dB: achieved {:.2} dB, FFR energy ratio {:.3}, HFR energy ratio {:.3}",
                row.line, s.achieved_snr_db, s.ffr_energy_ratio, s.hfr_energy_ratio
            );
        }
    }
    record.write(&dir.join("simulate.run.json"))
}

fn load_model(path: &Path) -> Result<ToyGeneratorModel, CliError> {
    ToyGeneratorModel::load(path).map_err(|e| {
        let e = twomask_core::Error::from(e);
        CliError { code: CliError::from(e).code, message: format!("model {}: cannot load", path.display()) }
    })
}

pub async fn enhance(
    ctx: &Context,
    input: &Path,
    output: &Path,
    generator: &str,
    streaming: bool,
) -> Result<(), CliError> {
    let audio = read(input)?;
    let mut record = ctx.manifest(if streaming { "enhance --streaming" } else { "enhance" });
    record.input(input)?;
    let generator = match generator.split_once(':') {
        None if generator == "identity" => GeneratorDto::Identity,
        Some(("oracle", target)) => {
            let target_path = Path::new(target);
            let t = read(target_path)?;
            record.input(target_path)?;
            GeneratorDto::Oracle { target: (&t).into() }
        }
        None if generator == "toy" => {
            let path =
                ctx.config.model_path.clone().ok_or_else(|| {
                    CliError::validation("toy generator needs toy:<model> or model_path in the config")
                })?;
            record.input(&path).map_err(|_| CliError::io(format!("model {} not found", path.display())))?;
            GeneratorDto::Toy { model_b64: encode_model(&load_model(&path)?) }
        }
        Some(("toy", path)) => {
            let path = Path::new(path);
            record.input(path).map_err(|_| CliError::io(format!("model {} not found", path.display())))?;
            GeneratorDto::Toy { model_b64: encode_model(&load_model(path)?) }
        }
        _ => return Err(CliError::validation(format!("unknown generator {generator:?}"))),
    };

    let enhanced = if streaming {
        stream_through_session(ctx, &audio, generator).await?
    } else {
        let resp = ctx
            .client
            .enhance(&EnhanceRequest { audio: (&audio).into(), generator, streaming: false, config: ctx.config() })
            .await?;
        waveform(resp.audio)?
    };
    write(output, &enhanced)?;
    record.output(output);
    record.write(&sidecar_for(output))
}

/// Pushes the file through a service-side stream session one buffer at a
/// time. The last partial buffer is zero-padded and the output trimmed.
async fn stream_through_session(
    ctx: &Context,
    audio: &Waveform,
    generator: GeneratorDto,
) -> Result<Waveform, CliError> {
    let info = ctx
        .client
        .create_session(&CreateSessionRequest { generator, sample_rate: audio.sample_rate(), config: ctx.config() })
        .await?;
    let result = async {
        let mut out = Vec::with_capacity(audio.len() + info.block_len);
        for chunk in audio.samples().chunks(info.buffer_len) {
            let mut buffer = chunk.to_vec();
            buffer.resize(info.buffer_len, 0.0);
            if let Some(block) = ctx.client.push_buffer(&info.session_id, buffer).await?.emitted {
                out.extend(block.samples);
            }
        }
        if let Some(block) = ctx.client.flush(&info.session_id).await?.emitted {
            out.extend(block.samples);
        }
        out.truncate(audio.len());
        waveform(WaveformDto { sample_rate: audio.sample_rate(), samples: out })
    }
    .await;
    ctx.client.delete_session(&info.session_id).await?;
    result
}

pub async fn train_toy(
    ctx: &Context,
    data: &Path,
    model: Option<&Path>,
    epochs: Option<usize>,
) -> Result<(), CliError> {
    let model_path: PathBuf = model
        .map(Path::to_owned)
        .or_else(|| ctx.config.model_path.clone())
        .ok_or_else(|| CliError::validation("give --model <path> or set model_path in the config"))?;
    let entries = std::fs::read_dir(data).map_err(|e| CliError::io(format!("{}: {e}", data.display())))?;
    let mut distortions: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".distortion.wav"))
        .collect();
    distortions.sort();
    if distortions.is_empty() {
        return Err(CliError::validation(format!("{} holds no *.distortion.wav files", data.display())));
    }
    let mut record = ctx.manifest("train-toy");
    let mut pairs = Vec::with_capacity(distortions.len());
    for d in &distortions {
        let name = d.to_string_lossy();
        let t = PathBuf::from(format!("{}.target.wav", &name[..name.len() - ".distortion.wav".len()]));
        if !t.exists() {
            return Err(CliError::validation(format!("{} has no matching {}", d.display(), t.display())));
        }
        pairs.push(TrainPair { distortion: (&read(d)?).into(), target: (&read(&t)?).into() });
        record.input(d)?;
        record.input(&t)?;
    }
    let mut config = ctx.config.clone();
    if let Some(n) = epochs {
        config.train.epochs = n;
    }
    let resp = ctx.client.train(&TrainRequest { pairs, config: Some(config) }).await?;
    for (epoch, loss) in resp.losses.iter().enumerate() {
        println!("{}\t{loss:.9e}", epoch + 1);
    }
    let model =
        decode_model(&resp.model_b64).map_err(|e| CliError::io(format!("service returned a bad model: {e}")))?;
    model.save(&model_path).map_err(|e| CliError::io(format!("{}: {e}", model_path.display())))?;
    record.output(&model_path);
    record.write(&sidecar_for(&model_path))
}

fn dto(t: Transcript) -> TranscriptDto {
    TranscriptDto { text: t.text(), utterance_id: t.utterance_id }
}

pub async fn eval(
    ctx: &Context,
    reference: &Path,
    hypothesis: Option<&Path>,
    asr_audio: Option<&Path>,
    asr_command: Option<&str>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let eval_err = |e| CliError::from(twomask_core::Error::Eval(e));
    let mut record = ctx.manifest("eval");
    let references = read_transcripts(reference).map_err(eval_err)?;
    record.input(reference)?;
    let hypotheses = match (hypothesis, asr_audio) {
        (Some(h), _) => {
            record.input(h)?;
            read_transcripts(h).map_err(eval_err)?
        }
        (None, Some(dir)) => {
            let template = asr_command
                .map(str::to_owned)
                .or_else(|| ctx.config.asr_command.clone())
                .ok_or_else(|| CliError::validation("give --asr-command or set asr_command in the config"))?;
            let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
            let mut wavs: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "wav"))
                .collect();
            wavs.sort();
            let mut out = Vec::with_capacity(wavs.len());
            for w in &wavs {
                record.input(w)?;
                out.push(run_asr(w, &template).map_err(|e| CliError::from(twomask_core::Error::Eval(e)))?);
            }
            out
        }
        (None, None) => return Err(CliError::validation("give --hypothesis or --asr-audio")),
    };
    let report = ctx
        .client
        .wer(&WerRequest {
            references: references.into_iter().map(dto).collect(),
            hypotheses: hypotheses.into_iter().map(dto).collect(),
        })
        .await?;
    print!("{}", report.text);
    if let Some(dir) = out {
        let dir = out_dir(Some(dir))?;
        for (name, body) in [("wer_report.csv", &report.csv), ("wer_report.txt", &report.text)] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            record.output(&path);
        }
        record.write(&dir.join("eval.run.json"))?;
    }
    Ok(())
}

pub async fn quality(ctx: &Context, estimate: &Path, reference: &Path) -> Result<(), CliError> {
    let resp = ctx
        .client
        .quality(&QualityRequest {
            estimate: (&read(estimate)?).into(),
            reference: (&read(reference)?).into(),
            config: ctx.config(),
        })
        .await?;
    println!("{:.6}", resp.score);
    Ok(())
}
