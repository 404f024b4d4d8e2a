use std::collections::HashMap;

use super::{wer, EvalError, Transcript};

/// Files at or below this WER count as usable.
pub const WER_THRESHOLD: f64 = 0.20;

/// Corpus statistics, all in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WerSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub pct_le_20: f64,
}

impl WerSummary {
    /// Values rounded to the reported two decimals.
    pub fn formatted(&self) -> (String, String, String) {
        (format!("{:.2}", self.mean), format!("{:.2}", self.std), format!("{:.2}", self.pct_le_20))
    }
}

pub fn aggregate(wers: &[f64]) -> Result<WerSummary, EvalError> {
    if wers.is_empty() {
        return Err(EvalError::EmptyList);
    }
    if let Some(&bad) = wers.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(EvalError::InvalidWer(bad));
    }
    let n = wers.len() as f64;
    let mean = wers.iter().sum::<f64>() / n;
    let var = wers.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
    let ok = wers.iter().filter(|&&w| w <= WER_THRESHOLD).count() as f64;
    Ok(WerSummary { mean: 100.0 * mean, std: 100.0 * var.sqrt(), pct_le_20: 100.0 * ok / n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WerReport {
    /// (utterance id, WER ratio) in reference order.
    pub per_file: Vec<(String, f64)>,
    pub summary: WerSummary,
}

impl WerReport {
    pub fn from_per_file(per_file: Vec<(String, f64)>) -> Result<Self, EvalError> {
        let wers: Vec<f64> = per_file.iter().map(|(_, w)| *w).collect();
        let summary = aggregate(&wers)?;
        Ok(Self { per_file, summary })
    }

    /// Human-readable table: one row per file, then the summary.
    pub fn to_text(&self) -> String {
        let mut out = String::from("utterance_id\twer_pct\n");
        for (id, w) in &self.per_file {
            out.push_str(&format!("{id}\t{:.2}\n", 100.0 * w));
        }
        let (mean, std, pct) = self.summary.formatted();
        out.push_str(&format!("# mean {mean}  std {std}  <=20 {pct}\n"));
        out
    }

    /// Machine-readable table with summary rows keyed MEAN, STD, PCT_LE_20.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = self.per_file.iter().map(|(id, v)| (id.clone(), format!("{:.2}", 100.0 * v))).chain([
            ("MEAN".to_owned(), format!("{:.2}", self.summary.mean)),
            ("STD".to_owned(), format!("{:.2}", self.summary.std)),
            ("PCT_LE_20".to_owned(), format!("{:.2}", self.summary.pct_le_20)),
        ]);
        w.write_record(["utterance_id", "wer_pct"]).expect("in-memory write");
        for (id, v) in rows {
            w.write_record([id, v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// Scores every hypothesis against its reference by utterance id. Any id
/// present on one side only is an error.
pub fn evaluate_pairs(references: &[Transcript], hypotheses: &[Transcript]) -> Result<WerReport, EvalError> {
    let hyp: HashMap<&str, &Transcript> = hypotheses.iter().map(|t| (t.utterance_id.as_str(), t)).collect();
    let refs: HashMap<&str, &Transcript> = references.iter().map(|t| (t.utterance_id.as_str(), t)).collect();
    let mut unmatched: Vec<String> = references
        .iter()
        .filter(|r| !hyp.contains_key(r.utterance_id.as_str()))
        .chain(hypotheses.iter().filter(|h| !refs.contains_key(h.utterance_id.as_str())))
        .map(|t| t.utterance_id.clone())
        .collect();
    let matched = references.len() + hypotheses.len() - unmatched.len();
    if matched == 0 {
        return Err(EvalError::EmptyIntersection);
    }
    if !unmatched.is_empty() {
        unmatched.sort();
        return Err(EvalError::UnmatchedIds(unmatched));
    }
    let per_file = references
        .iter()
        .map(|r| Ok((r.utterance_id.clone(), wer(r, hyp[r.utterance_id.as_str()])?)))
        .collect::<Result<Vec<_>, EvalError>>()?;
    WerReport::from_per_file(per_file)
}
