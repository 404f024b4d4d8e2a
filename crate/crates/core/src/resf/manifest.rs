//! Batch manifest: comma-separated `human,ego,snr_db` rows. Blank lines and
//! `#` comments are skipped, as is an optional `human,ego,snr_db` header.
//! Relative paths resolve against the manifest's directory.

use std::path::{Path, PathBuf};

use super::ResfError;

/// The global SNR levels of the noisy evaluation sweep, in dB.
pub const NINE_GLOBAL_SNRS_DB: [f64; 9] = [40.0, 35.0, 30.0, 25.0, 20.0, 15.0, 10.0, 5.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub line: usize,
    pub human: PathBuf,
    pub ego: PathBuf,
    pub snr_db: f64,
}

pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestRow>, ResfError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if rows.is_empty() && fields == ["human", "ego", "snr_db"] {
            continue;
        }
        let err = |message: String| ResfError::Manifest { line, message };
        if fields.len() != 3 {
            return Err(err(format!("expected 3 comma-separated fields, found {}", fields.len())));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(err("empty path".into()));
        }
        let snr_db: f64 = fields[2].parse().map_err(|_| err(format!("invalid SNR '{}'", fields[2])))?;
        if !snr_db.is_finite() {
            return Err(err(format!("invalid SNR '{}'", fields[2])));
        }
        rows.push(ManifestRow { line, human: base_dir.join(fields[0]), ego: base_dir.join(fields[1]), snr_db });
    }
    Ok(rows)
}
