use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::words::{self, pick};
use super::{qa, rng_for, CountRange, DocSpec, SynthError, SynthRecord};
use crate::html::escape_text;
use crate::markup::{MarkupKind, TaggedMarkup};

/// A rectangular table. Row 0 is the header; every cell is non-empty text
/// with single spaces and no surrounding whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Seed for the cosmetic choices of [`TableSpec::html_twin`].
    pub twin_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TableConfig {
    /// Total rows including the header.
    pub rows: CountRange,
    pub cols: CountRange,
    /// Use positional labels `c{row}{col}` instead of sampled content.
    pub plain_cells: bool,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            rows: CountRange::new(2, 8),
            cols: CountRange::new(2, 6),
            plain_cells: false,
        }
    }
}

impl TableSpec {
    /// Pipe-table Markdown, built directly from the cells.
    pub fn gold(&self) -> TaggedMarkup {
        let mut out = String::new();
        md_row(&mut out, &self.header);
        out.push_str("\n|");
        for _ in &self.header {
            out.push_str(" --- |");
        }
        for row in &self.rows {
            out.push('\n');
            md_row(&mut out, row);
        }
        TaggedMarkup::new(MarkupKind::Md, out).expect("cells never contain framing tokens")
    }

    /// An HTML rendering of the same table with randomized but
    /// content-preserving markup: optional `thead`/`tbody`, inline tags,
    /// attributes and insignificant whitespace.
    pub fn html_twin(&self) -> String {
        let mut rng = rng_for(self.twin_seed);
        let sections = rng.random_bool(0.5);
        let ws =
            |rng: &mut rand_chacha::ChaCha8Rng| -> &'static str { ["", "\n", "\n  ", " "][rng.random_range(0..4)] };
        let mut out = String::new();
        if rng.random_bool(0.5) {
            out.push_str("<div class=\"table-wrap\">");
        }
        out.push_str(if rng.random_bool(0.3) {
            "<table border=\"1\">"
        } else {
            "<table>"
        });
        out.push_str(ws(&mut rng));
        if sections {
            out.push_str("<thead>");
        }
        twin_row(&mut out, &mut rng, &self.header, "th");
        if sections {
            out.push_str("</thead>");
            out.push_str(ws(&mut rng));
            out.push_str("<tbody>");
        }
        for row in &self.rows {
            out.push_str(ws(&mut rng));
            twin_row(&mut out, &mut rng, row, "td");
        }
        if sections {
            out.push_str("</tbody>");
        }
        out.push_str(ws(&mut rng));
        out.push_str("</table>");
        if out.starts_with("<div") {
            out.push_str("</div>");
        }
        out
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&str> {
        self.rows.get(row)?.get(col).map(String::as_str)
    }
}

fn md_row(out: &mut String, cells: &[String]) {
    out.push('|');
    for c in cells {
        out.push(' ');
        for ch in c.chars() {
            if ch == '|' {
                out.push('\\');
            }
            out.push(ch);
        }
        out.push_str(" |");
    }
}

fn twin_row(out: &mut String, rng: &mut rand_chacha::ChaCha8Rng, cells: &[String], tag: &str) {
    out.push_str("<tr>");
    for c in cells {
        out.push('<');
        out.push_str(tag);
        if rng.random_bool(0.2) {
            out.push_str(" class=\"cell\"");
        }
        out.push('>');
        if rng.random_bool(0.3) {
            out.push_str("  ");
        }
        let text = escape_text(c);
        match rng.random_range(0..6) {
            0 => {
                out.push_str("<b>");
                out.push_str(&text);
                out.push_str("</b>");
            }
            1 => {
                out.push_str("<span>");
                out.push_str(&text);
                out.push_str("</span>");
            }
            2 => out.push_str(&text.replacen(' ', "\n ", 1)),
            _ => out.push_str(&text),
        }
        if rng.random_bool(0.3) {
            out.push('\n');
        }
        out.push_str("</");
        out.push_str(tag);
        out.push('>');
    }
    out.push_str("</tr>");
}

const SPECIAL_CELLS: &[&str] = &["A & B", "x < y", "in|out", "Müller", "n/a", "R&D", "≥ 5"];

fn data_cell(rng: &mut rand_chacha::ChaCha8Rng) -> String {
    match rng.random_range(0..10) {
        0..=2 => rng.random_range(0..100_000u32).to_string(),
        3 => {
            let v = rng.random_range(1_000..10_000_000u32);
            group_thousands(v)
        }
        4 => alloc::format!("{}.{}%", rng.random_range(0..100u32), rng.random_range(0..10u32)),
        5 => SPECIAL_CELLS[rng.random_range(0..SPECIAL_CELLS.len())].to_string(),
        6 => words::capitalize(pick(rng, words::NOUNS)),
        7 => pick(rng, words::PLACES).to_string(),
        _ => alloc::format!("{} {}", pick(rng, words::ADJECTIVES), pick(rng, words::NOUNS)),
    }
}

fn group_thousands(v: u32) -> String {
    let digits = v.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

pub fn synth_table(seed: u64, config: &TableConfig) -> Result<SynthRecord, SynthError> {
    config.rows.check("rows", 1)?;
    config.cols.check("cols", 1)?;
    let mut rng = rng_for(seed);
    let n_rows = config.rows.sample(&mut rng) as usize;
    let n_cols = config.cols.sample(&mut rng) as usize;

    let label = |r: usize, c: usize| alloc::format!("c{}{}", r, c);
    let header: Vec<String> = if config.plain_cells {
        (0..n_cols).map(|c| label(0, c)).collect()
    } else {
        let mut pool = words::pick_distinct(&mut rng, words::NOUNS, n_cols)
            .into_iter()
            .map(words::capitalize)
            .collect::<Vec<_>>();
        // pools hold fewer entries than very wide tables need
        for c in pool.len()..n_cols {
            pool.push(alloc::format!("Col {}", c + 1));
        }
        pool
    };
    let rows: Vec<Vec<String>> = (1..n_rows)
        .map(|r| {
            (0..n_cols)
                .map(|c| {
                    if config.plain_cells {
                        label(r, c)
                    } else {
                        data_cell(&mut rng)
                    }
                })
                .collect()
        })
        .collect();

    let mut qa_pairs = Vec::new();
    let candidates: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|r| (0..n_cols).map(move |c| (r, c)))
        .filter(|&(r, c)| !rows[r][c].contains('|') && !header[c].contains('|'))
        .collect();
    if !candidates.is_empty() {
        let (r, c) = candidates[rng.random_range(0..candidates.len())];
        qa_pairs.push(qa(
            alloc::format!("What is the entry in row {} of the {} column?", r + 1, header[c]),
            rows[r][c].clone(),
        ));
    }

    let spec = TableSpec {
        header,
        rows,
        twin_seed: rng.random(),
    };
    Ok(SynthRecord::new("table", seed, DocSpec::Table(spec), qa_pairs))
}
