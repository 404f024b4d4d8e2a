use std::collections::HashSet;
use std::path::Path;

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub utterance_id: String,
    pub tokens: Vec<String>,
}

impl Transcript {
    /// Normalizes `text` into tokens.
    pub fn new(utterance_id: impl Into<String>, text: &str) -> Self {
        Self { utterance_id: utterance_id.into(), tokens: normalize(text) }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercases, drops punctuation (apostrophes survive only between two
/// alphanumerics) and splits on whitespace.
pub fn normalize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut cleaned = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else if c.is_whitespace() {
            cleaned.push(' ');
        } else if is_apostrophe(c) {
            let before = i > 0 && chars[i - 1].is_alphanumeric();
            let after = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if before && after {
                cleaned.push('\'');
            }
        }
    }
    cleaned.split_whitespace().map(str::to_owned).collect()
}

/// Parses `<id><TAB><text>` lines. Blank lines are skipped; an id may only
/// appear once.
pub fn parse_transcripts(text: &str) -> Result<Vec<Transcript>, EvalError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| EvalError::TranscriptFormat { line: line_no, message: "expected <id><TAB><text>".into() })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(EvalError::TranscriptFormat { line: line_no, message: "empty utterance id".into() });
        }
        if !seen.insert(id.to_owned()) {
            return Err(EvalError::TranscriptFormat { line: line_no, message: format!("duplicate id {id}") });
        }
        out.push(Transcript::new(id, body));
    }
    Ok(out)
}

pub fn read_transcripts(path: impl AsRef<Path>) -> Result<Vec<Transcript>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
    parse_transcripts(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize("Hello,   World!"), ["hello", "world"]);
        assert_eq!(normalize("Don't 'quote' me"), ["don't", "quote", "me"]);
        assert_eq!(normalize("it\u{2019}s"), ["it's"]);
        assert_eq!(normalize("  \t "), Vec::<String>::new());
        assert_eq!(normalize("e.g. 3.5"), ["eg", "35"]);
    }

    #[test]
    fn parses_transcript_files() {
        let t = parse_transcripts("u1\tHello there\n\nu2\tGeneral Kenobi.\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].utterance_id, "u2");
        assert_eq!(t[1].tokens, ["general", "kenobi"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert_eq!(
            parse_transcripts("u1\tok\nno tab here\n"),
            Err(EvalError::TranscriptFormat { line: 2, message: "expected <id><TAB><text>".into() })
        );
        assert!(matches!(parse_transcripts("a\tx\na\ty\n"), Err(EvalError::TranscriptFormat { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "[a-zA-Z0-9 ,.!?'\u{2019}\t-]{0,40}") {
            let once = normalize(&s).join(" ");
            prop_assert_eq!(normalize(&once).join(" "), once);
        }
    }
}
