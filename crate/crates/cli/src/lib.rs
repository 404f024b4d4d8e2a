//! The `twomask` command line. Every pipeline operation is a request to
//! the service; without `--server`, an embedded instance is started on a
//! loopback port for the duration of the command.

pub mod args;
mod commands;
mod error;
mod run_manifest;

pub use args::{Cli, Command};
pub use error::CliError;

use commands::Context;
use twomask_client::Client;
use twomask_core::config::PipelineConfig;

pub fn effective_config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut config = match &cli.global.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| CliError::from(twomask_core::Error::from(e)))?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        config.seed = seed;
        config.train.seed = seed;
    }
    Ok(config)
}

pub async fn run(cli: Cli) -> Result<(), CliError> {
    let config = effective_config(&cli)?;
    match &cli.command {
        Command::DumpConfig => {
            print!("{}", config.to_toml());
            return Ok(());
        }
        Command::Serve { bind } => {
            let listener =
                tokio::net::TcpListener::bind(bind).await.map_err(|e| CliError::io(format!("{bind}: {e}")))?;
            let addr = listener.local_addr().map_err(|e| CliError::io(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            return twomask_server::serve(listener).await.map_err(|e| CliError::io(e.to_string()));
        }
        _ => {}
    }
    let base = match &cli.global.server {
        Some(url) => url.clone(),
        None => {
            let addr = twomask_server::spawn("127.0.0.1:0")
                .await
                .map_err(|e| CliError::io(format!("cannot start embedded service: {e}")))?;
            format!("http://{addr}")
        }
    };
    let ctx = Context { client: Client::new(base), config };
    let out = cli.global.out.as_deref();
    match &cli.command {
        Command::Simulate { manifest, snr_sweep } => commands::simulate(&ctx, manifest, *snr_sweep, out).await,
        Command::Enhance { input, output, generator, streaming } => {
            commands::enhance(&ctx, input, output, generator, *streaming).await
        }
        Command::TrainToy { data, model, epochs } => commands::train_toy(&ctx, data, model.as_deref(), *epochs).await,
        Command::Eval { reference, hypothesis, asr_audio, asr_command } => {
            commands::eval(&ctx, reference, hypothesis.as_deref(), asr_audio.as_deref(), asr_command.as_deref(), out)
                .await
        }
        Command::Quality { estimate, reference } => commands::quality(&ctx, estimate, reference).await,
        Command::DumpConfig | Command::Serve { .. } => unreachable!("handled above"),
    }
}
