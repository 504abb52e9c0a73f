//! `evaluate`: score predictions `{id, output}` against gold records.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use mlgen_core::metrics::{
    ap_suite, code_similarity, kie_f1, normalized_edit_distance, recognition_report, score_records, ApConfig,
    EvalReport, RecordScore,
};
use mlgen_core::synth::Category;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::io::{read_jsonl, write_json};
use crate::records::GoldLine;

/// Note attached to code-similarity reports: the image-similarity half of
/// the TikZ score needs rendered images, which this tool does not produce.
pub const IMAGE_HALF_NOTE: &str = "image half unavailable: score is code similarity only";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Metric {
    /// Structural AP at the three tolerances (chart records).
    Ap,
    /// Field F1 on JSON key-value output (receipt records).
    Kie,
    /// Gold-in-prediction containment count.
    Recognition,
    /// Normalized character edit distance (lower is better).
    Edit,
    /// Token-level code similarity.
    Code,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ap => "ap",
            Metric::Kie => "kie",
            Metric::Recognition => "recognition",
            Metric::Edit => "edit",
            Metric::Code => "code",
        }
    }

    /// Category scored when none is given.
    pub fn default_category(self) -> Option<Category> {
        match self {
            Metric::Ap => Some(Category::Chart),
            Metric::Kie => Some(Category::Receipt),
            _ => None,
        }
    }
}

pub fn eval_file_name(metric: Metric) -> String {
    format!("eval_{}.json", metric.name())
}

fn kie_report(ids: &[String], preds: &[String], golds: &[String]) -> Result<EvalReport> {
    let mut per_record = Vec::with_capacity(ids.len());
    for (id, (p, g)) in ids.iter().zip(preds.iter().zip(golds)) {
        let s = kie_f1(p, g)?;
        per_record.push(RecordScore {
            id: id.clone(),
            score: s.f1,
            diagnostics: BTreeMap::from([("precision".into(), s.precision), ("recall".into(), s.recall)]),
        });
    }
    Ok(EvalReport::mean("kie_f1", BTreeMap::new(), per_record))
}

fn code_report(golds: &[&GoldLine], preds: &[String]) -> EvalReport {
    let per_record = golds
        .iter()
        .zip(preds)
        .map(|(g, p)| RecordScore {
            id: g.id.clone(),
            score: code_similarity(p, &g.body, Some(g.kind)),
            diagnostics: BTreeMap::new(),
        })
        .collect();
    let mut r = EvalReport::mean("code_similarity", BTreeMap::new(), per_record);
    r.notes.push(IMAGE_HALF_NOTE.into());
    r
}

/// Scores the gold records of `category` (or the metric's default). A gold
/// record without a prediction is scored against empty output.
pub fn cmd_evaluate(
    pred_path: &Path,
    gold_path: &Path,
    metric: Metric,
    category: Option<Category>,
    ap: &ApConfig,
    out: &Path,
) -> Result<Vec<EvalReport>> {
    ap.check().map_err(|e| PipelineError::Usage(e.to_string()))?;
    let all_golds: Vec<GoldLine> = read_jsonl(gold_path)?;
    let preds: Vec<Prediction> = read_jsonl(pred_path)?;
    let mut by_id: HashMap<&str, &str> = HashMap::with_capacity(preds.len());
    for p in &preds {
        if by_id.insert(&p.id, &p.output).is_some() {
            return Err(PipelineError::Data(format!("duplicate prediction id {}", p.id)));
        }
    }
    let category = category.or(metric.default_category());
    let golds: Vec<&GoldLine> = all_golds
        .iter()
        .filter(|g| category.is_none() || g.category == category)
        .collect();
    let ids: Vec<String> = golds.iter().map(|g| g.id.clone()).collect();
    let gold_bodies: Vec<String> = golds.iter().map(|g| g.body.clone()).collect();
    let outputs: Vec<String> = ids
        .iter()
        .map(|id| by_id.get(id.as_str()).copied().unwrap_or("").to_string())
        .collect();
    let missing = ids.iter().filter(|id| !by_id.contains_key(id.as_str())).count();
    let unmatched = preds.len() - (ids.len() - missing);

    let mut reports = match metric {
        Metric::Ap => ap_suite(&ids, &outputs, &gold_bodies, ap)?.to_vec(),
        Metric::Kie => vec![kie_report(&ids, &outputs, &gold_bodies)?],
        Metric::Recognition => vec![recognition_report(&ids, &outputs, &gold_bodies)?],
        Metric::Edit => vec![score_records(
            "edit_distance",
            &ids,
            &outputs,
            &gold_bodies,
            normalized_edit_distance,
        )?],
        Metric::Code => vec![code_report(&golds, &outputs)],
    };
    for r in &mut reports {
        if missing > 0 {
            r.notes.push(format!(
                "{} gold records had no prediction and were scored as empty output",
                missing
            ));
        }
        if unmatched > 0 {
            r.notes
                .push(format!("{} predictions matched no scored gold record", unmatched));
        }
    }
    write_json(&out.join(eval_file_name(metric)), &reports)?;
    Ok(reports)
}
