//! `package`: annotate every question of every gold record and export the
//! two-round conversation records plus a sidecar of rejected questions.

use std::collections::BTreeMap;
use std::path::Path;

use mlgen_core::cot::{annotate_context_capped, package_record, AnnotatorClient, ConversationRecord, CotError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::io::{read_jsonl, write_json};
use crate::records::{export_jsonl, GoldLine, RejectedRecord};

pub const COT_FILE: &str = "cot.jsonl";
pub const SUMMARY_FILE: &str = "package_summary.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageSummary {
    pub gold_records: usize,
    pub questions: usize,
    pub packaged: usize,
    pub rejected: usize,
    pub reasons: BTreeMap<String, usize>,
}

enum Outcome {
    Packaged(ConversationRecord),
    Rejected(RejectedRecord),
}

fn process(line: &GoldLine, k: usize, client: &(dyn AnnotatorClient + Sync), cap: usize) -> Result<Outcome> {
    let qa = &line.qa[k];
    let id = format!("{}-q{}", line.id, k);
    let image_ref = line.image_ref();
    let reject = |reason: String| {
        Outcome::Rejected(RejectedRecord {
            id: id.clone(),
            image_ref: image_ref.clone(),
            markup_kind: line.kind,
            source_qa: qa.clone(),
            reason,
        })
    };
    let gold = match line.markup() {
        Ok(g) => g,
        Err(e) => return Ok(reject(e.to_string())),
    };
    let annotation = match annotate_context_capped(&gold, qa, client, cap) {
        Ok(a) => a,
        // an unreachable annotator aborts the run; the cache keeps finished work
        Err(e @ CotError::Client(_)) => return Err(PipelineError::Cot(e)),
        Err(e) => return Ok(reject(e.to_string())),
    };
    Ok(match package_record(id.clone(), image_ref.clone(), qa, &annotation) {
        Ok(r) => Outcome::Packaged(r),
        Err(CotError::UnclearContext) => reject("unclear".into()),
        Err(e) => reject(e.to_string()),
    })
}

pub fn cmd_package(
    input: &Path,
    out: &Path,
    client: &(dyn AnnotatorClient + Sync),
    context_cap: usize,
    pool: &rayon::ThreadPool,
) -> Result<PackageSummary> {
    let lines: Vec<GoldLine> = read_jsonl(input)?;
    let jobs: Vec<(usize, usize)> = lines
        .iter()
        .enumerate()
        .flat_map(|(i, l)| (0..l.qa.len()).map(move |k| (i, k)))
        .collect();
    let outcomes: Vec<Outcome> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, k)| process(&lines[i], k, client, context_cap))
            .collect::<Result<_>>()
    })?;

    let mut packaged = Vec::new();
    let mut rejected = Vec::new();
    let mut reasons = BTreeMap::new();
    for o in outcomes {
        match o {
            Outcome::Packaged(r) => packaged.push(r),
            Outcome::Rejected(r) => {
                *reasons.entry(r.reason.clone()).or_insert(0) += 1;
                rejected.push(r);
            }
        }
    }
    let path = out.join(COT_FILE);
    export_jsonl(&packaged, &rejected, &path)?;
    let summary = PackageSummary {
        gold_records: lines.len(),
        questions: jobs.len(),
        packaged: packaged.len(),
        rejected: rejected.len(),
        reasons,
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}
