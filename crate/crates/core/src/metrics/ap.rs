//! Structural extraction precision for chart-to-table outputs.
//!
//! The gold chart is split into cells: one string cell each for title,
//! source and y-axis, and one value cell per (series, category). A value
//! cell matches when the prediction has the same series and category labels
//! (compared after whitespace collapsing and lowercasing) and
//! `|pred - gold| <= tol * max(|gold|, 1e-9)`. The score is the matched
//! fraction of gold cells.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_lengths, EvalReport, MetricError, RecordScore};
use crate::convert::{json_to_chart_meta, ChartMeta};
use crate::html::collapse_whitespace;

const EPSILON: f64 = 1e-9;

/// Relative-error thresholds, nested: strict ≤ slight ≤ high.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApConfig {
    pub tol_strict: f64,
    pub tol_slight: f64,
    pub tol_high: f64,
}

impl Default for ApConfig {
    fn default() -> Self {
        ApConfig {
            tol_strict: 0.0,
            tol_slight: 0.05,
            tol_high: 0.10,
        }
    }
}

impl ApConfig {
    pub fn check(&self) -> Result<(), MetricError> {
        let t = [self.tol_strict, self.tol_slight, self.tol_high];
        if t.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MetricError::InvalidConfig(
                "tolerances must be finite and non-negative".into(),
            ));
        }
        if !(t[0] <= t[1] && t[1] <= t[2]) {
            return Err(MetricError::InvalidConfig(
                "tolerances must satisfy strict <= slight <= high".into(),
            ));
        }
        Ok(())
    }

    pub fn levels(&self) -> [(&'static str, f64); 3] {
        [
            ("ap_strict", self.tol_strict),
            ("ap_slight", self.tol_slight),
            ("ap_high", self.tol_high),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ApScore {
    pub matched_cells: usize,
    pub total_cells: usize,
    pub matched_values: usize,
    pub total_values: usize,
}

impl ApScore {
    pub fn score(&self) -> f64 {
        ratio(self.matched_cells, self.total_cells)
    }

    pub fn value_score(&self) -> f64 {
        ratio(self.matched_values, self.total_values)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

fn norm(s: &str) -> String {
    collapse_whitespace(s).to_lowercase()
}

fn within(pred: f64, gold: f64, tol: f64) -> bool {
    (pred - gold).abs() <= tol * gold.abs().max(EPSILON)
}

fn count_matches(pred: Option<&ChartMeta>, gold: &ChartMeta, tol: f64) -> ApScore {
    let total_values = gold.series().len() * gold.x_axis().len();
    let mut s = ApScore {
        matched_cells: 0,
        total_cells: 3 + total_values,
        matched_values: 0,
        total_values,
    };
    let Some(pred) = pred else { return s };
    for (p, g) in [
        (pred.title(), gold.title()),
        (pred.source(), gold.source()),
        (pred.y_axis(), gold.y_axis()),
    ] {
        if norm(p) == norm(g) {
            s.matched_cells += 1;
        }
    }
    let pred_cols: Vec<String> = pred.x_axis().iter().map(|c| norm(c)).collect();
    for gs in gold.series() {
        let name = norm(&gs.name);
        let Some(ps) = pred.series().iter().find(|ps| norm(&ps.name) == name) else {
            continue;
        };
        for (gc, gv) in gold.x_axis().iter().zip(&gs.values) {
            let col = norm(gc);
            let Some(pc) = pred_cols.iter().position(|c| *c == col) else {
                continue;
            };
            if within(ps.values[pc], *gv, tol) {
                s.matched_values += 1;
            }
        }
    }
    s.matched_cells += s.matched_values;
    s
}

/// Cell counts of `pred` against `gold` at tolerance `tol`.
pub fn structural_ap_detail(pred: &str, gold: &str, tol: f64) -> Result<ApScore, MetricError> {
    let gold = json_to_chart_meta(gold).map_err(|e| MetricError::GoldUnparseable(alloc::format!("{}", e)))?;
    let pred = json_to_chart_meta(pred).ok();
    Ok(count_matches(pred.as_ref(), &gold, tol))
}

pub fn structural_ap(pred: &str, gold: &str, tol: f64) -> Result<f64, MetricError> {
    Ok(structural_ap_detail(pred, gold, tol)?.score())
}

/// Mean structural AP at each of the three tolerances. Per-record
/// diagnostics carry the cell counts and the value-cell-only score.
pub fn ap_suite(
    ids: &[String],
    preds: &[String],
    golds: &[String],
    cfg: &ApConfig,
) -> Result<[EvalReport; 3], MetricError> {
    cfg.check()?;
    check_lengths(preds.len(), golds.len())?;
    check_lengths(ids.len(), golds.len())?;
    let mut parsed = Vec::with_capacity(golds.len());
    for (p, g) in preds.iter().zip(golds) {
        let gold = json_to_chart_meta(g).map_err(|e| MetricError::GoldUnparseable(alloc::format!("{}", e)))?;
        parsed.push((json_to_chart_meta(p).ok(), gold));
    }
    let mut config = BTreeMap::new();
    config.insert("tol_strict".into(), cfg.tol_strict);
    config.insert("tol_slight".into(), cfg.tol_slight);
    config.insert("tol_high".into(), cfg.tol_high);

    Ok(cfg.levels().map(|(name, tol)| {
        let per_record = ids
            .iter()
            .zip(&parsed)
            .map(|(id, (p, g))| {
                let s = count_matches(p.as_ref(), g, tol);
                let mut diagnostics = BTreeMap::new();
                diagnostics.insert("matched_cells".into(), s.matched_cells as f64);
                diagnostics.insert("total_cells".into(), s.total_cells as f64);
                diagnostics.insert("value_score".into(), s.value_score());
                diagnostics.insert("pred_parsed".into(), if p.is_some() { 1.0 } else { 0.0 });
                RecordScore {
                    id: id.clone(),
                    score: s.score(),
                    diagnostics,
                }
            })
            .collect();
        let mut r = EvalReport::mean(name, config.clone(), per_record);
        r.config.insert("tol".into(), tol);
        r
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLD: &str = r#"{"title": "T", "source": "S", "x-axis": ["a"], "y-axis": "Y", "value": {"s": [100]}}"#;

    #[test]
    fn self_match_and_unparseable() {
        for tol in [0.0, 0.05, 0.1] {
            assert_eq!(structural_ap(GOLD, GOLD, tol).unwrap(), 1.0);
        }
        assert_eq!(structural_ap("not json", GOLD, 0.1).unwrap(), 0.0);
        assert!(matches!(
            structural_ap(GOLD, "nope", 0.1),
            Err(MetricError::GoldUnparseable(_))
        ));
    }

    #[test]
    fn seven_percent_off() {
        let pred = GOLD.replace("[100]", "[107]");
        let scores: Vec<f64> = [0.0, 0.05, 0.10]
            .iter()
            .map(|t| structural_ap_detail(&pred, GOLD, *t).unwrap().value_score())
            .collect();
        assert_eq!(scores, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn labels_are_normalized() {
        let pred = r#"{"title": " t ", "source": "s", "x-axis": ["A"], "y-axis": "y", "value": {"S": [100]}}"#;
        assert_eq!(structural_ap(pred, GOLD, 0.0).unwrap(), 1.0);
        let missing = r#"{"title": "T", "source": "S", "x-axis": ["b"], "y-axis": "Y", "value": {"s": [100]}}"#;
        assert_eq!(structural_ap(missing, GOLD, 0.0).unwrap(), 0.75);
    }

    #[test]
    fn config_checks() {
        let bad = ApConfig {
            tol_strict: 0.2,
            ..ApConfig::default()
        };
        assert!(ap_suite(&[], &[], &[], &bad).is_err());
        let ids = alloc::vec![String::from("r")];
        let g = alloc::vec![String::from(GOLD)];
        let reports = ap_suite(&ids, &g, &g, &ApConfig::default()).unwrap();
        assert!(reports.iter().all(|r| r.aggregate == 1.0));
        assert_eq!(reports[1].config["tol"], 0.05);
    }
}
