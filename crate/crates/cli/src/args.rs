use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "twomask", version, about = "Restore oversubtracted speech and evaluate the result")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Pipeline configuration (TOML). Unknown keys are rejected.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `seed` and `train.seed` from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for commands that write several files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Use a running service instead of an embedded one.
    #[arg(long, global = true, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mix, oversubtract and write distortion/target/mixture WAV trios.
    Simulate {
        /// CSV rows `human,ego,snr_db`; paths relative to the manifest.
        #[arg(long)]
        manifest: PathBuf,
        /// Ignore each row's SNR and write all nine standard levels.
        #[arg(long)]
        snr_sweep: bool,
    },
    /// Enhance one WAV file.
    Enhance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// `identity`, `oracle:<target.wav>`, or `toy[:<model>]`.
        #[arg(long, default_value = "identity")]
        generator: String,
        /// Stream 170 ms buffers through the incremental processor.
        #[arg(long)]
        streaming: bool,
    },
    /// Train the toy generator on `*.distortion.wav` / `*.target.wav` pairs.
    TrainToy {
        #[arg(long)]
        data: PathBuf,
        /// Where to write the model; defaults to `model_path` from the config.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Overrides `train.epochs`.
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Score hypotheses against references and report WER statistics.
    Eval {
        /// `<id><TAB><text>` lines.
        #[arg(long)]
        reference: PathBuf,
        /// Hypothesis transcripts in the same format.
        #[arg(long, conflicts_with = "asr_audio")]
        hypothesis: Option<PathBuf>,
        /// Transcribe every WAV in this directory with the ASR command instead.
        #[arg(long, required_unless_present = "hypothesis")]
        asr_audio: Option<PathBuf>,
        /// Command template with `{audio}`; defaults to `asr_command` from the config.
        #[arg(long)]
        asr_command: Option<String>,
    },
    /// Reference-based quality score in [0, 1].
    Quality {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
    /// Run the HTTP service in the foreground.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Print the effective configuration as TOML.
    DumpConfig,
}
