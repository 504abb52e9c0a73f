//! `stats`: token accounting over packaged conversation records.

use std::collections::BTreeMap;
use std::path::Path;

use mlgen_core::metrics::{token_stats, DefaultTokenizer, TokenReport};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::io::{read_json, write_json};
use crate::records::import_jsonl;

pub const STATS_FILE: &str = "stats.json";

/// Where per-record tile counts come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tiles {
    /// The same count for every record.
    Uniform(u32),
    /// A JSON object mapping record id to tile count.
    File(std::path::PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Means {
    pub image_tokens: f64,
    pub context_tokens: f64,
    pub qa_tokens: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    #[serde(flatten)]
    pub report: TokenReport,
    pub means: Means,
}

impl StatsFile {
    pub fn table(&self) -> String {
        let t = &self.report.totals;
        let m = &self.means;
        let mut out = format!("{:<10} {:>14} {:>12}\n", "tokens", "total", "mean");
        for (name, total, mean) in [
            ("image", t.image_tokens, m.image_tokens),
            ("context", t.context_tokens, m.context_tokens),
            ("qa", t.qa_tokens, m.qa_tokens),
        ] {
            out.push_str(&format!("{:<10} {:>14} {:>12.2}\n", name, total, mean));
        }
        out.push_str(&format!("{:<10} {:>14}\n", "records", self.report.per_record.len()));
        out
    }
}

pub fn cmd_stats(cot_path: &Path, tiles: &Tiles, tokens_per_tile: u64, out: &Path) -> Result<StatsFile> {
    let records = import_jsonl(cot_path)?;
    let counts: Vec<u32> = match tiles {
        Tiles::Uniform(n) => vec![*n; records.len()],
        Tiles::File(path) => {
            let map: BTreeMap<String, u32> = read_json(path)?;
            records
                .iter()
                .map(|r| {
                    map.get(r.id()).copied().ok_or_else(|| {
                        PipelineError::Data(format!("{}: no tile count for record {}", path.display(), r.id()))
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let report = token_stats(&records, &counts, tokens_per_tile, &DefaultTokenizer)?;
    let (image_tokens, context_tokens, qa_tokens) = report.means();
    let stats = StatsFile {
        report,
        means: Means {
            image_tokens,
            context_tokens,
            qa_tokens,
        },
    };
    write_json(&out.join(STATS_FILE), &stats)?;
    Ok(stats)
}
