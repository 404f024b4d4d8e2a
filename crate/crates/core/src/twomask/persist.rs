//! Toy model file format, all integers and floats little-endian:
//!
//! ```text
//! magic   4 bytes  "TMGM"
//! version u32      1
//! bins    u32      F
//! hfr     u32      bins above the FFR
//! ffr_lo  u32      first FFR bin
//! ffr_hi  u32      last FFR bin (inclusive)
//! weights f64 × (ffr_hi − ffr_lo + 1)·(hfr + 1)
//! gains   f64 × F
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::{ToyGeneratorModel, TwoMaskError};

pub const MODEL_MAGIC: [u8; 4] = *b"TMGM";
pub const MODEL_VERSION: u32 = 1;

const HEADER_LEN: usize = 4 + 5 * 4;

impl ToyGeneratorModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * (self.weights().len() + self.gains().len()));
        out.extend_from_slice(&MODEL_MAGIC);
        for v in [
            MODEL_VERSION,
            self.bins() as u32,
            self.hfr_count() as u32,
            *self.ffr_bins().start() as u32,
            *self.ffr_bins().end() as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.weights().iter().chain(self.gains()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TwoMaskError> {
        let bad = |m: &str| TwoMaskError::ModelFormat(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("truncated header"));
        }
        if bytes[..4] != MODEL_MAGIC {
            return Err(bad("bad magic"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
        let (version, bins, hfr, lo, hi) = (word(0), word(1), word(2), word(3), word(4));
        if version != MODEL_VERSION as usize {
            return Err(TwoMaskError::ModelFormat(format!("unsupported version {version}")));
        }
        if lo > hi || hi >= bins || hfr != bins - hi - 1 {
            return Err(TwoMaskError::ModelFormat(format!(
                "inconsistent header: bins {bins}, hfr {hfr}, FFR {lo}..={hi}"
            )));
        }
        let n_weights = (hi - lo + 1) * (hfr + 1);
        let expected = HEADER_LEN + 8 * (n_weights + bins);
        if bytes.len() != expected {
            return Err(TwoMaskError::ModelFormat(format!("expected {expected} bytes, found {}", bytes.len())));
        }
        let floats: Vec<f64> =
            bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let (weights, gains) = floats.split_at(n_weights);
        Self::from_parts(bins, lo..=hi, weights.to_vec(), gains.to_vec())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Ok(Self::from_bytes(&bytes)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] TwoMaskError),
}
