//! Scoring of predictions against gold.
//!
//! All functions are pure. Prediction-side parse failures score zero rather
//! than erroring, so a weak model never aborts an evaluation run; gold-side
//! failures are errors because they indicate a broken dataset.

mod ap;
mod code;
mod edit;
mod kie;
mod recognition;
mod tokens;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ap::{ap_suite, structural_ap, structural_ap_detail, ApConfig, ApScore};
pub use code::{code_similarity, code_tokens};
pub use edit::{levenshtein, normalize_text, normalized_edit_distance};
pub use kie::{flatten_fields, kie_f1, FieldMatch, KieScore};
pub use recognition::{recognition_report, text_recognition_score, RecognitionScore};
pub use tokens::{
    token_stats, DefaultTokenizer, TextTokenizer, TokenCounts, TokenReport, DEFAULT_TOKENS_PER_TILE, MAX_TILES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("{preds} predictions for {golds} gold records")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("gold is not parseable: {0}")]
    GoldUnparseable(String),
    #[error("record {index} has {tiles} tiles; allowed 1..=12")]
    TileOutOfRange { index: usize, tiles: u32 },
    #[error("invalid metric config: {0}")]
    InvalidConfig(String),
}

pub(crate) fn check_lengths(preds: usize, golds: usize) -> Result<(), MetricError> {
    if preds != golds {
        return Err(MetricError::LengthMismatch { preds, golds });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordScore {
    pub id: String,
    pub score: f64,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

/// A scored evaluation run. `aggregate` is the mean of the per-record scores,
/// except for counting metrics where it is their sum; `config` records every
/// threshold used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(rename = "metric")]
    pub metric_name: String,
    pub config: BTreeMap<String, f64>,
    pub aggregate: f64,
    pub per_record: Vec<RecordScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EvalReport {
    /// Builds a report whose aggregate is the mean score (0 when empty).
    pub fn mean(metric_name: &str, config: BTreeMap<String, f64>, per_record: Vec<RecordScore>) -> Self {
        let aggregate = mean(per_record.iter().map(|r| r.score));
        EvalReport {
            metric_name: metric_name.into(),
            config,
            aggregate,
            per_record,
            notes: Vec::new(),
        }
    }

    /// Mean of one diagnostic over the records that carry it.
    pub fn mean_diagnostic(&self, key: &str) -> Option<f64> {
        let values: Vec<f64> = self
            .per_record
            .iter()
            .filter_map(|r| r.diagnostics.get(key).copied())
            .collect();
        (!values.is_empty()).then(|| mean(values.into_iter()))
    }
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Scores aligned predictions with `score`, labelling records by `ids`.
pub fn score_records(
    metric_name: &str,
    ids: &[String],
    preds: &[String],
    golds: &[String],
    score: impl Fn(&str, &str) -> f64,
) -> Result<EvalReport, MetricError> {
    check_lengths(preds.len(), golds.len())?;
    check_lengths(ids.len(), golds.len())?;
    let per_record = ids
        .iter()
        .zip(preds.iter().zip(golds))
        .map(|(id, (p, g))| RecordScore {
            id: id.clone(),
            score: score(p, g),
            diagnostics: BTreeMap::new(),
        })
        .collect();
    Ok(EvalReport::mean(metric_name, BTreeMap::new(), per_record))
}
