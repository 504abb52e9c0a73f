//! Per-kind structural validation and dataset filtering.
//!
//! [`validate`] never fails: every problem becomes a [`Violation`] with a
//! stable code. Codes in use:
//!
//! | kind | codes |
//! |---|---|
//! | all | `EmbeddedFrameToken` |
//! | json | `NotJson` |
//! | md | `RaggedTable`, `UnclosedFence` |
//! | latex | `UnbalancedBraces`, `EnvMismatch`, `UnclosedEnv`, `UnexpectedEnd`, `UnterminatedMath`, `BadEnvName` |
//! | html | `UnterminatedTag`, `UnterminatedComment`, `UnexpectedEndTag`, `MismatchedEndTag`, `UnclosedElement`, `BadTag` |
//! | tikz | the latex codes, `MissingTikzPicture`, `MissingSemicolon` |
//! | txt_gd | `BadGroundingBox`, `CoordinateOutOfRange` |

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::convert::{parse_grounded_text, GroundedTextError};
use crate::html::{self, HtmlError};
use crate::json;
use crate::latex::{self, check_structure};
use crate::markup::{find_framing_token, MarkupKind, TaggedMarkup};
use crate::synth::{rng_for, SynthRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
    pub byte_offset: Option<usize>,
}

impl Violation {
    fn new(code: &str, message: impl Into<String>, byte_offset: Option<usize>) -> Self {
        Violation {
            code: code.into(),
            message: message.into(),
            byte_offset,
        }
    }
}

/// Outcome of [`validate`]; `ok` holds exactly when `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub kind: MarkupKind,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn codes(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.code.as_str()).collect()
    }
}

pub fn validate(m: &TaggedMarkup) -> ValidationReport {
    validate_body(m.kind(), m.body())
}

/// Validates a raw body, which unlike a [`TaggedMarkup`] may contain framing
/// tokens (for example when read from an external file).
pub fn validate_body(kind: MarkupKind, body: &str) -> ValidationReport {
    let mut v = Vec::new();
    if let Some((token, offset)) = find_framing_token(body) {
        v.push(Violation::new(
            "EmbeddedFrameToken",
            alloc::format!("framing token `{}` inside the body", token),
            Some(offset),
        ));
    }
    match kind {
        MarkupKind::Txt => {}
        MarkupKind::TxtGd => check_grounded(body, &mut v),
        MarkupKind::Md => check_markdown(body, &mut v),
        MarkupKind::Latex => {
            check_latex(body, &mut v);
        }
        MarkupKind::Html => {
            if let Err(e) = html::parse(body) {
                v.push(Violation::new(html_code(&e), e.to_string(), Some(e.offset())));
            }
        }
        MarkupKind::Json => {
            if let Err(e) = json::parse(body) {
                v.push(Violation::new("NotJson", e.to_string(), Some(e.offset)));
            }
        }
        MarkupKind::Tikz => {
            if check_latex(body, &mut v) {
                check_tikz(body, &mut v);
            }
        }
    }
    ValidationReport {
        ok: v.is_empty(),
        kind,
        violations: v,
    }
}

fn html_code(e: &HtmlError) -> &'static str {
    match e {
        HtmlError::UnterminatedTag(_) => "UnterminatedTag",
        HtmlError::UnterminatedComment(_) => "UnterminatedComment",
        HtmlError::UnexpectedEndTag { .. } => "UnexpectedEndTag",
        HtmlError::MismatchedEndTag { .. } => "MismatchedEndTag",
        HtmlError::UnclosedElement { .. } => "UnclosedElement",
        HtmlError::BadTag(_) => "BadTag",
    }
}

/// Returns whether the structure is sound.
fn check_latex(body: &str, v: &mut Vec<Violation>) -> bool {
    match check_structure(body) {
        Ok(()) => true,
        Err(e) => {
            v.push(Violation::new(e.code(), e.to_string(), Some(e.offset())));
            false
        }
    }
}

fn check_grounded(body: &str, v: &mut Vec<Violation>) {
    if let Err(e) = parse_grounded_text(body) {
        let code = match e {
            GroundedTextError::BoxOutOfRange(_) => "CoordinateOutOfRange",
            _ => "BadGroundingBox",
        };
        v.push(Violation::new(code, e.to_string(), Some(e.offset())));
    }
}

fn check_markdown(body: &str, v: &mut Vec<Violation>) {
    let mut fence: Option<usize> = None;
    let mut table_width: Option<usize> = None;
    let mut offset = 0;
    for line in body.split('\n') {
        let start = offset;
        offset += line.len() + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
            fence = match fence {
                Some(_) => None,
                None => Some(start),
            };
            table_width = None;
            continue;
        }
        if fence.is_some() {
            continue;
        }
        if trimmed.starts_with('|') {
            let w = pipe_cells(trimmed);
            match table_width {
                None => table_width = Some(w),
                Some(expected) if expected != w => {
                    v.push(Violation::new(
                        "RaggedTable",
                        alloc::format!("table row has {} cells, expected {}", w, expected),
                        Some(start),
                    ));
                    // one report per table
                    table_width = Some(usize::MAX);
                }
                Some(_) => {}
            }
        } else {
            table_width = None;
        }
    }
    if let Some(start) = fence {
        v.push(Violation::new(
            "UnclosedFence",
            "code fence is never closed",
            Some(start),
        ));
    }
}

/// Cell count of a pipe-table row; `\|` does not separate cells.
fn pipe_cells(row: &str) -> usize {
    let row = row.trim_end();
    let mut pipes = 0usize;
    let mut escaped = false;
    for c in row.chars() {
        match c {
            '\\' if !escaped => escaped = true,
            '|' if !escaped => pipes += 1,
            _ => escaped = false,
        }
    }
    // both outer pipes present in well-formed rows
    let closing = row.len() > 1 && row.ends_with('|') && !row.ends_with("\\|");
    if closing {
        pipes.saturating_sub(1).max(1)
    } else {
        pipes
    }
}

const TIKZ_STATEMENTS: &[&str] = &[
    "draw",
    "fill",
    "filldraw",
    "path",
    "node",
    "coordinate",
    "shade",
    "shadedraw",
    "clip",
    "pic",
    "matrix",
];

fn check_tikz(body: &str, v: &mut Vec<Violation>) {
    let src = latex::blank_comments(body);
    let mut found = false;
    let mut rest_start = 0;
    while let Some(pos) = src[rest_start..].find("\\begin{tikzpicture}") {
        found = true;
        let inner_start = rest_start + pos + "\\begin{tikzpicture}".len();
        let inner_end = src[inner_start..]
            .find("\\end{tikzpicture}")
            .map(|e| inner_start + e)
            .unwrap_or(src.len());
        check_statements(&src[inner_start..inner_end], inner_start, v);
        rest_start = inner_end;
    }
    if !found {
        v.push(Violation::new("MissingTikzPicture", "no tikzpicture environment", None));
    }
}

/// Every drawing statement must end with `;` at its own brace depth before
/// the next statement starts or the picture ends.
fn check_statements(picture: &str, base: usize, v: &mut Vec<Violation>) {
    let bytes = picture.as_bytes();
    let mut pending: Option<(usize, usize)> = None; // (offset, depth)
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                let name_len = bytes[i + 1..].iter().take_while(|c| c.is_ascii_alphabetic()).count();
                if name_len == 0 {
                    i += 2;
                    continue;
                }
                let name = &picture[i + 1..i + 1 + name_len];
                if TIKZ_STATEMENTS.contains(&name) {
                    if let Some((at, d)) = pending {
                        if d == depth {
                            v.push(missing_semicolon(base + at));
                            return;
                        }
                    }
                    if pending.is_none() {
                        pending = Some((i, depth));
                    }
                }
                i += 1 + name_len;
                continue;
            }
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            b';' if pending.is_some_and(|(_, d)| d == depth) => pending = None,
            _ => {}
        }
        i += 1;
    }
    if let Some((at, _)) = pending {
        v.push(missing_semicolon(base + at));
    }
}

fn missing_semicolon(offset: usize) -> Violation {
    Violation::new(
        "MissingSemicolon",
        "drawing statement does not end with `;`",
        Some(offset),
    )
}

/// Wraps a picture in a minimal standalone document, unless it already is a
/// full document.
pub fn standalone_tikz_document(body: &str) -> String {
    if body.contains("\\documentclass") {
        return body.to_string();
    }
    alloc::format!(
        "\\documentclass[tikz]{{standalone}}\n\\begin{{document}}\n{}\n\\end{{document}}\n",
        body
    )
}

/// A record whose gold can be validated.
pub trait GoldSource {
    fn record_id(&self) -> &str;
    fn gold_kind(&self) -> MarkupKind;
    fn gold_body(&self) -> &str;
}

impl GoldSource for SynthRecord {
    fn record_id(&self) -> &str {
        &self.id
    }
    fn gold_kind(&self) -> MarkupKind {
        self.gold.kind()
    }
    fn gold_body(&self) -> &str {
        self.gold.body()
    }
}

/// A gold record read from an external source, not yet known to be valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportedRecord {
    pub id: String,
    pub kind: MarkupKind,
    pub body: String,
}

impl GoldSource for ImportedRecord {
    fn record_id(&self) -> &str {
        &self.id
    }
    fn gold_kind(&self) -> MarkupKind {
        self.kind
    }
    fn gold_body(&self) -> &str {
        &self.body
    }
}

impl From<&SynthRecord> for ImportedRecord {
    fn from(r: &SynthRecord) -> Self {
        ImportedRecord {
            id: r.id.clone(),
            kind: r.gold.kind(),
            body: r.gold.body().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome<R> {
    pub kept: Vec<R>,
    pub rejected: Vec<(R, ValidationReport)>,
}

/// Splits records into valid and invalid, preserving input order on each side.
pub fn filter_dataset<R: GoldSource>(records: impl IntoIterator<Item = R>) -> FilterOutcome<R> {
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for r in records {
        let report = validate_body(r.gold_kind(), r.gold_body());
        if report.ok {
            kept.push(r);
        } else {
            rejected.push((r, report));
        }
    }
    FilterOutcome { kept, rejected }
}

/// Breaks a valid body of `kind` so that [`validate_body`] rejects it.
pub fn corrupt_body(kind: MarkupKind, body: &str) -> String {
    let mut out = body.to_string();
    match kind {
        MarkupKind::Json => {
            if out.pop().is_none() || out.trim().is_empty() {
                out.push('{');
            }
        }
        MarkupKind::Md => out.push_str("\n```\nunclosed"),
        MarkupKind::Latex | MarkupKind::Tikz => out.push('{'),
        MarkupKind::Html => out.push_str("<div>"),
        MarkupKind::Txt => out.push_str("<txt>"),
        MarkupKind::TxtGd => out.push_str("<box>(1,2)"),
    }
    out
}

/// Corrupts exactly `count` records chosen by `seed` and returns their
/// indices.
pub fn inject_corruption(records: &mut [ImportedRecord], count: usize, seed: u64) -> BTreeSet<usize> {
    let count = count.min(records.len());
    let mut rng = rng_for(seed);
    let chosen: BTreeSet<usize> = index::sample(&mut rng, records.len(), count).into_iter().collect();
    for &i in &chosen {
        records[i].body = corrupt_body(records[i].kind, &records[i].body);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(kind: MarkupKind, body: &str) -> Vec<String> {
        validate_body(kind, body)
            .violations
            .into_iter()
            .map(|v| v.code)
            .collect()
    }

    #[test]
    fn examples() {
        assert!(validate_body(MarkupKind::Json, "{\"a\":1}").ok);
        assert_eq!(
            codes(
                MarkupKind::Tikz,
                "\\begin{tikzpicture}\\draw (0,0) -- (1,1)\\end{tikzpicture}"
            ),
            ["MissingSemicolon"]
        );
        assert_eq!(
            codes(MarkupKind::Latex, "\\begin{align}x\\end{aligned}"),
            ["EnvMismatch"]
        );
    }

    #[test]
    fn tikz_rules() {
        let ok = "\\begin{tikzpicture}\n\\draw (0,0) -- (1,1);\n\\node at (0,0) {a; b};\n\\foreach \\x in {1,2} {\\fill (\\x,0) circle (1pt);}\n\\end{tikzpicture}";
        assert!(
            validate_body(MarkupKind::Tikz, ok).ok,
            "{:?}",
            codes(MarkupKind::Tikz, ok)
        );
        assert_eq!(codes(MarkupKind::Tikz, "\\draw (0,0);"), ["MissingTikzPicture"]);
        let two = "\\begin{tikzpicture}\\draw (0,0) -- (1,1) \\draw (1,1);\\end{tikzpicture}";
        assert_eq!(codes(MarkupKind::Tikz, two), ["MissingSemicolon"]);
        let commented = "\\begin{tikzpicture}\\draw (0,0); % \\draw\n\\end{tikzpicture}";
        assert!(validate_body(MarkupKind::Tikz, commented).ok);
        assert_eq!(
            codes(MarkupKind::Tikz, "\\begin{tikzpicture}{\\end{tikzpicture}"),
            ["UnbalancedBraces"]
        );
    }

    #[test]
    fn markdown_rules() {
        assert!(validate_body(MarkupKind::Md, "| a | b |\n| --- | --- |\n| 1 | x\\|y |").ok);
        assert_eq!(codes(MarkupKind::Md, "| a | b |\n| --- |"), ["RaggedTable"]);
        assert_eq!(codes(MarkupKind::Md, "text\n```\ncode"), ["UnclosedFence"]);
        assert!(validate_body(MarkupKind::Md, "```\n| a |\n| b | c |\n```").ok);
        assert!(validate_body(MarkupKind::Md, "| a |\n\n| b | c |").ok);
    }

    #[test]
    fn other_kinds() {
        assert_eq!(codes(MarkupKind::Html, "<p><b>x</p>"), ["MismatchedEndTag"]);
        assert!(validate_body(MarkupKind::Html, "<p>a<br>b</p>").ok);
        assert_eq!(codes(MarkupKind::Txt, "a <md> b"), ["EmbeddedFrameToken"]);
        assert!(validate_body(MarkupKind::TxtGd, "a<box>(1,2),(3,4)</box>").ok);
        assert_eq!(
            codes(MarkupKind::TxtGd, "a<box>(1,2),(3,4000)</box>"),
            ["CoordinateOutOfRange"]
        );
        assert_eq!(codes(MarkupKind::TxtGd, "a<box>(1,2)"), ["BadGroundingBox"]);
        assert_eq!(codes(MarkupKind::Json, "{\"a\":"), ["NotJson"]);
    }

    #[test]
    fn corruption_is_detected_for_every_kind() {
        let samples = [
            (MarkupKind::Txt, "hello"),
            (MarkupKind::TxtGd, "a<box>(1,2),(3,4)</box>"),
            (MarkupKind::Md, "| a |\n| --- |"),
            (MarkupKind::Latex, "x^{2}"),
            (MarkupKind::Html, "<p>x</p>"),
            (MarkupKind::Json, "{}"),
            (MarkupKind::Tikz, "\\begin{tikzpicture}\\draw (0,0);\\end{tikzpicture}"),
        ];
        for (kind, body) in samples {
            assert!(validate_body(kind, body).ok, "{:?}", kind);
            assert!(!validate_body(kind, &corrupt_body(kind, body)).ok, "{:?}", kind);
        }
    }

    #[test]
    fn filter_partitions_in_order() {
        let recs: Vec<ImportedRecord> = ["{}", "{", "[1]", "nope"]
            .iter()
            .enumerate()
            .map(|(i, b)| ImportedRecord {
                id: alloc::format!("r{}", i),
                kind: MarkupKind::Json,
                body: b.to_string(),
            })
            .collect();
        let out = filter_dataset(recs);
        let kept: Vec<_> = out.kept.iter().map(|r| r.id.as_str()).collect();
        let rejected: Vec<_> = out.rejected.iter().map(|(r, _)| r.id.as_str()).collect();
        assert_eq!(kept, ["r0", "r2"]);
        assert_eq!(rejected, ["r1", "r3"]);
        assert_eq!(out.rejected[0].1.codes(), ["NotJson"]);
    }

    #[test]
    fn standalone_wrapper() {
        let doc = standalone_tikz_document("\\begin{tikzpicture}\\end{tikzpicture}");
        assert!(doc.starts_with("\\documentclass[tikz]{standalone}"));
        assert!(check_structure(&doc).is_ok());
    }
}
