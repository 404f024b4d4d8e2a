use std::path::Path;
use std::process::Command;

use super::{EvalError, Transcript};

/// Replaced by the audio path in each argument of the command template.
pub const AUDIO_PLACEHOLDER: &str = "{audio}";

/// Runs an external recognizer on one file. The template is split with
/// shell quoting rules and executed directly, without a shell. The
/// transcript's id is the file stem.
pub fn run_asr(audio_path: &Path, template: &str) -> Result<Transcript, EvalError> {
    let words = shell_words::split(template).map_err(|e| EvalError::AsrTemplate(e.to_string()))?;
    if !words.iter().any(|w| w.contains(AUDIO_PLACEHOLDER)) {
        return Err(EvalError::AsrTemplate(format!("missing {AUDIO_PLACEHOLDER} placeholder")));
    }
    let audio = audio_path.to_string_lossy();
    let mut args = words.iter().map(|w| w.replace(AUDIO_PLACEHOLDER, &audio));
    let program = args.next().ok_or_else(|| EvalError::AsrTemplate("empty command".into()))?;
    let output = Command::new(&program).args(args).output().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => EvalError::AsrNotFound(program.clone()),
        _ => EvalError::Io(format!("spawning {program}: {e}")),
    })?;
    if !output.status.success() {
        return Err(EvalError::AsrFailed {
            code: output.status.code(),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_owned(),
        });
    }
    let text = String::from_utf8_lossy(&output.stdout);
    let id = audio_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let transcript = Transcript::new(id, &text);
    if transcript.tokens.is_empty() {
        return Err(EvalError::AsrEmptyOutput);
    }
    Ok(transcript)
}
