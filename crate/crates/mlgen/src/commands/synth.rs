//! `synth`: generate the configured records and write gold, specs and a
//! summary.

use std::path::Path;

use mlgen_core::markup::MarkupKind;
use mlgen_core::synth::{
    record_seed, synth_chart, synth_formula, synth_page, synth_receipt, synth_table, Category, SynthRecord,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::io::{write_json, write_jsonl};
use crate::manifest::Manifest;
use crate::records::{GoldLine, SpecFile};

pub const GOLD_FILE: &str = "gold.jsonl";
pub const SPEC_DIR: &str = "specs";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: Category,
    pub kind: MarkupKind,
    pub count: u64,
    /// Fraction of all records, rounded to four decimals.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub master_seed: u64,
    pub total: u64,
    pub categories: Vec<CategoryCount>,
}

impl SynthSummary {
    /// Plain-text distribution table.
    pub fn table(&self) -> String {
        let mut out = format!("{:<10} {:<6} {:>8} {:>7}\n", "category", "kind", "count", "share");
        for c in &self.categories {
            out.push_str(&format!(
                "{:<10} {:<6} {:>8} {:>6.2}%\n",
                c.category.name(),
                c.kind.tag(),
                c.count,
                c.share * 100.0
            ));
        }
        out.push_str(&format!("{:<10} {:<6} {:>8}\n", "total", "", self.total));
        out
    }
}

/// Dataset id of record `index` in `category`.
pub fn record_id(category: Category, index: u64) -> String {
    format!("{}-{:06}", category.name(), index)
}

fn generate(m: &Manifest, templates: &[String], category: Category, seed: u64) -> Result<SynthRecord> {
    let c = &m.configs;
    let rec = match category {
        Category::Chart => synth_chart(seed, &c.chart),
        Category::Table => synth_table(seed, &c.table),
        Category::Formula => synth_formula(seed, templates),
        Category::Receipt => synth_receipt(seed, &c.receipt),
        Category::Page => synth_page(seed, &c.page),
    };
    // every generator error stems from the manifest
    rec.map_err(|e| PipelineError::Usage(format!("{} config: {}", category.name(), e)))
}

pub fn cmd_synth(manifest: &Manifest, out: &Path, pool: &rayon::ThreadPool) -> Result<SynthSummary> {
    let templates = manifest.configs.formula.templates();
    let jobs: Vec<(Category, u64)> = Category::ALL
        .into_iter()
        .flat_map(|c| (0..manifest.counts.get(c)).map(move |i| (c, i)))
        .collect();
    let records: Vec<(String, u64, SynthRecord)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, i)| {
                let seed = record_seed(manifest.master_seed, c, i);
                generate(manifest, &templates, c, seed).map(|r| (record_id(c, i), seed, r))
            })
            .collect::<Result<_>>()
    })?;

    let spec_dir = out.join(SPEC_DIR);
    let mut lines = Vec::with_capacity(records.len());
    for (n, (id, seed, rec)) in records.into_iter().enumerate() {
        write_json(
            &spec_dir.join(format!("{}.json", id)),
            &SpecFile {
                id: id.clone(),
                seed,
                spec: rec.spec,
            },
        )?;
        lines.push(GoldLine {
            category: Some(jobs[n].0),
            kind: rec.gold.kind(),
            body: rec.gold.into_body(),
            image_ref: Some(format!("images/{}.png", id)),
            qa: rec.qa,
            id,
        });
        if (n + 1) % 1000 == 0 {
            eprintln!("synth: {} / {} records", n + 1, jobs.len());
        }
    }
    write_jsonl(&out.join(GOLD_FILE), &lines)?;

    let total = manifest.counts.total();
    let summary = SynthSummary {
        master_seed: manifest.master_seed,
        total,
        categories: Category::ALL
            .into_iter()
            .map(|c| {
                let count = manifest.counts.get(c);
                let share = if total == 0 { 0.0 } else { count as f64 / total as f64 };
                CategoryCount {
                    category: c,
                    kind: c.gold_kind(),
                    count,
                    share: (share * 10_000.0).round() / 10_000.0,
                }
            })
            .collect(),
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}
