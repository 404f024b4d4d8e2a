use super::{EvalError, Transcript};

/// Word-level Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=hypothesis.len()).collect();
    let mut cur = vec![0; hypothesis.len() + 1];
    for (i, r) in reference.iter().enumerate() {
        cur[0] = i + 1;
        for (j, h) in hypothesis.iter().enumerate() {
            let sub = prev[j] + usize::from(r != h);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[hypothesis.len()]
}

pub fn wer(reference: &Transcript, hypothesis: &Transcript) -> Result<f64, EvalError> {
    if reference.tokens.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    Ok(edit_distance(&reference.tokens, &hypothesis.tokens) as f64 / reference.tokens.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Transcript {
        Transcript::new("u", s)
    }

    #[test]
    fn worked_examples() {
        assert_eq!(wer(&t("a b c d"), &t("a b c d")).unwrap(), 0.0);
        assert_eq!(wer(&t("a b c d"), &t("a x c d")).unwrap(), 0.25);
        assert_eq!(wer(&t("a b c d"), &t("")).unwrap(), 1.0);
        let reference = t("one two three four five six seven eight nine ten");
        let hypothesis = t("one two three four five six seven eight nein and ten");
        assert_eq!(wer(&reference, &hypothesis).unwrap(), 0.20);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert_eq!(wer(&t(""), &t("a")), Err(EvalError::EmptyReference));
    }

    #[test]
    fn insertions_can_exceed_one() {
        assert_eq!(wer(&t("a"), &t("b c d")).unwrap(), 3.0);
    }
}
