//! Word error rate, corpus statistics in the style of the results table,
//! and a subprocess adapter for an external recognizer.

mod aggregate;
mod asr;
mod transcript;
mod wer;

pub use aggregate::{aggregate, evaluate_pairs, WerReport, WerSummary, WER_THRESHOLD};
pub use asr::{run_asr, AUDIO_PLACEHOLDER};
pub use transcript::{normalize, parse_transcripts, read_transcripts, Transcript};
pub use wer::{edit_distance, wer};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("reference transcript is empty")]
    EmptyReference,
    #[error("cannot aggregate an empty list")]
    EmptyList,
    #[error("invalid WER value {0}")]
    InvalidWer(f64),
    #[error("unmatched utterance ids: {}", .0.join(", "))]
    UnmatchedIds(Vec<String>),
    #[error("reference and hypothesis share no utterance ids")]
    EmptyIntersection,
    #[error("transcript line {line}: {message}")]
    TranscriptFormat { line: usize, message: String },
    #[error("ASR command template: {0}")]
    AsrTemplate(String),
    #[error("ASR command not found: {0}")]
    AsrNotFound(String),
    #[error("ASR command exited with {code:?}: {stderr}")]
    AsrFailed { code: Option<i32>, stderr: String },
    #[error("ASR command produced no output")]
    AsrEmptyOutput,
    #[error("{0}")]
    Io(String),
}
