use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::{check_lengths, EvalReport, MetricError, RecordScore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecognitionScore {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// Lowercase, punctuation removed, whitespace collapsed.
fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut gap = false;
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if gap && !out.is_empty() {
                out.push(' ');
            }
            gap = false;
            out.push(c);
        } else if c.is_whitespace() {
            gap = true;
        }
    }
    out
}

fn is_correct(pred: &str, gold: &str) -> bool {
    normalize(pred).contains(&normalize(gold))
}

/// Counts predictions that contain their gold after normalization.
pub fn text_recognition_score<P: AsRef<str>, G: AsRef<str>>(
    preds: &[P],
    golds: &[G],
) -> Result<RecognitionScore, MetricError> {
    check_lengths(preds.len(), golds.len())?;
    let correct = preds
        .iter()
        .zip(golds)
        .filter(|(p, g)| is_correct(p.as_ref(), g.as_ref()))
        .count();
    let total = golds.len();
    Ok(RecognitionScore {
        correct,
        total,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
    })
}

/// Per-record report; the aggregate is the correct count.
pub fn recognition_report(ids: &[String], preds: &[String], golds: &[String]) -> Result<EvalReport, MetricError> {
    check_lengths(preds.len(), golds.len())?;
    check_lengths(ids.len(), golds.len())?;
    let per_record: alloc::vec::Vec<RecordScore> = ids
        .iter()
        .zip(preds.iter().zip(golds))
        .map(|(id, (p, g))| RecordScore {
            id: id.clone(),
            score: if is_correct(p, g) { 1.0 } else { 0.0 },
            diagnostics: BTreeMap::new(),
        })
        .collect();
    let count = per_record.iter().filter(|r| r.score == 1.0).count();
    Ok(EvalReport {
        metric_name: "text_recognition".into(),
        config: BTreeMap::new(),
        aggregate: count as f64,
        per_record,
        notes: alloc::vec!["aggregate is the number of correct records".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let golds = ["Hello", "42"];
        let s = text_recognition_score(&golds, &golds).unwrap();
        assert_eq!((s.correct, s.accuracy), (2, 1.0));
        let s = text_recognition_score(&["The total is 42."], &["42"]).unwrap();
        assert_eq!(s.correct, 1);
        let s = text_recognition_score(&["abc", "def"], &["xyz", "uvw"]).unwrap();
        assert_eq!((s.correct, s.accuracy), (0, 0.0));
        assert!(text_recognition_score(&["a"], &["a", "b"]).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize("  Hello,  WORLD!\n"), "hello world");
        assert!(is_correct("…he said: \"New  York!\" ", "new york"));
        assert!(is_correct("e-mail", "email"));
    }
}
