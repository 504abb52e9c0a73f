//! `validate`: structural checks on every gold record, plus the optional
//! compiler check for TikZ; writes kept and rejected lines and a report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mlgen_core::markup::MarkupKind;
use mlgen_core::validate::{validate_body, ValidationReport, Violation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compile::{compile_check_tikz, CompileError, CompileOutcome, TikzCompiler};
use crate::error::Result;
use crate::io::{read_jsonl, write_json, write_jsonl};
use crate::records::GoldLine;

pub const REPORT_FILE: &str = "filter_report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedLine {
    #[serde(flatten)]
    pub record: GoldLine,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CompileCounts {
    pub passed: usize,
    pub failed: usize,
    pub timed_out: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: PathBuf,
    pub total: usize,
    pub kept: usize,
    pub rejected: usize,
    /// Rejections per violation code (a record counts once per code).
    pub by_code: BTreeMap<String, usize>,
    pub compile: CompileCounts,
    pub rejected_ids: Vec<String>,
}

enum Compiled {
    NotTikz,
    Outcome(CompileOutcome),
    Timeout,
}

fn check(line: &GoldLine, compiler: Option<&TikzCompiler>) -> Result<(ValidationReport, Compiled)> {
    let mut report = validate_body(line.kind, &line.body);
    if line.kind != MarkupKind::Tikz {
        return Ok((report, Compiled::NotTikz));
    }
    if !report.ok {
        return Ok((report, Compiled::Outcome(CompileOutcome::Skipped)));
    }
    let compiled = match compile_check_tikz(&line.body, compiler) {
        Ok(CompileOutcome::Fail(reason)) => {
            report.violations.push(Violation {
                code: "CompileFailed".into(),
                message: reason.clone(),
                byte_offset: None,
            });
            Compiled::Outcome(CompileOutcome::Fail(reason))
        }
        Ok(outcome) => Compiled::Outcome(outcome),
        Err(CompileError::Timeout(d)) => {
            report.violations.push(Violation {
                code: "CompilerTimeout".into(),
                message: format!("no result after {:?}", d),
                byte_offset: None,
            });
            Compiled::Timeout
        }
        Err(e @ CompileError::Spawn(_)) => return Err(crate::error::PipelineError::Data(e.to_string())),
    };
    report.ok = report.violations.is_empty();
    Ok((report, compiled))
}

/// `dir/name.jsonl` → `out/name.{suffix}.jsonl`.
fn derived(input: &Path, out: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.join(format!("{}.{}.jsonl", stem, suffix))
}

pub fn cmd_validate(
    input: &Path,
    out: &Path,
    compiler: Option<&TikzCompiler>,
    pool: &rayon::ThreadPool,
) -> Result<FilterReport> {
    let lines: Vec<GoldLine> = read_jsonl(input)?;
    let checked: Vec<(ValidationReport, Compiled)> =
        pool.install(|| lines.par_iter().map(|l| check(l, compiler)).collect::<Result<_>>())?;

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    let mut by_code = BTreeMap::new();
    let mut compile = CompileCounts::default();
    for (line, (report, compiled)) in lines.into_iter().zip(checked) {
        match compiled {
            Compiled::NotTikz => {}
            Compiled::Outcome(CompileOutcome::Pass) => compile.passed += 1,
            Compiled::Outcome(CompileOutcome::Fail(_)) => compile.failed += 1,
            Compiled::Outcome(CompileOutcome::Skipped) => compile.skipped += 1,
            Compiled::Timeout => compile.timed_out += 1,
        }
        if report.ok {
            kept.push(line);
        } else {
            let mut codes: Vec<&str> = report.codes();
            codes.sort_unstable();
            codes.dedup();
            for c in codes {
                *by_code.entry(c.to_string()).or_insert(0) += 1;
            }
            rejected.push(RejectedLine { record: line, report });
        }
    }
    let report = FilterReport {
        input: input.into(),
        total: kept.len() + rejected.len(),
        kept: kept.len(),
        rejected: rejected.len(),
        by_code,
        compile,
        rejected_ids: rejected.iter().map(|r| r.record.id.clone()).collect(),
    };
    write_jsonl(&derived(input, out, "kept"), &kept)?;
    write_jsonl(&derived(input, out, "rejected"), &rejected)?;
    write_json(&out.join(REPORT_FILE), &report)?;
    Ok(report)
}
