//! Seeded generators of document specs paired with gold markup.
//!
//! Every generator is a pure function of `(seed, config)`: the same inputs
//! give byte-identical records on every platform. Randomness comes from
//! ChaCha8 seeded with the record seed; integer sampling is used wherever a
//! float would otherwise be drawn, so nothing depends on platform float
//! behaviour.
//!
//! Dataset builds derive per-record seeds with [`record_seed`], which makes
//! each record independent of every other and of generation order.

mod chart;
mod formula;
mod page;
mod prompts;
mod receipt;
mod table;
mod words;

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chart::{synth_chart, ChartConfig, ChartSpec, ChartStyle, ChartType};
pub use formula::{
    default_corpus, instantiate_template, instantiate_with, synth_formula, Augment, FormulaSpec, Placeholder,
};
pub use page::{synth_page, PageConfig, PageSection, PageSpec};
pub use prompts::{sample_prompt, PromptTask};
pub use receipt::{synth_receipt, Cents, ReceiptConfig, ReceiptItem, ReceiptSpec};
pub use table::{synth_table, TableConfig, TableSpec};

use crate::cot::QaPair;
use crate::markup::{MarkupKind, TaggedMarkup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("formula corpus is empty")]
    EmptyCorpus,
    #[error("template `{0}` has unbalanced structure")]
    InvalidTemplate(String),
    #[error("unknown prompt task `{0}`")]
    UnknownTask(String),
}

/// Inclusive integer range used by the generator configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub const fn new(min: u32, max: u32) -> Self {
        CountRange { min, max }
    }

    pub(crate) fn check(&self, what: &str, floor: u32) -> Result<(), SynthError> {
        if self.min > self.max {
            return Err(SynthError::InvalidConfig(alloc::format!(
                "{} range {}..={} is inverted",
                what,
                self.min,
                self.max
            )));
        }
        if self.min < floor {
            return Err(SynthError::InvalidConfig(alloc::format!(
                "{} must be at least {}",
                what,
                floor
            )));
        }
        Ok(())
    }

    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        use rand::Rng;
        rng.random_range(self.min..=self.max)
    }
}

/// Record categories, each with a fixed gold kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Chart,
    Table,
    Formula,
    Receipt,
    Page,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Chart,
        Category::Table,
        Category::Formula,
        Category::Receipt,
        Category::Page,
    ];

    pub fn gold_kind(self) -> MarkupKind {
        match self {
            Category::Chart | Category::Receipt => MarkupKind::Json,
            Category::Formula => MarkupKind::Latex,
            Category::Table => MarkupKind::Md,
            Category::Page => MarkupKind::Html,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Chart => "chart",
            Category::Table => "table",
            Category::Formula => "formula",
            Category::Receipt => "receipt",
            Category::Page => "page",
        }
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "category", content = "spec", rename_all = "lowercase")]
pub enum DocSpec {
    Chart(ChartSpec),
    Formula(FormulaSpec),
    Table(TableSpec),
    Receipt(ReceiptSpec),
    Page(PageSpec),
}

impl DocSpec {
    pub fn category(&self) -> Category {
        match self {
            DocSpec::Chart(_) => Category::Chart,
            DocSpec::Formula(_) => Category::Formula,
            DocSpec::Table(_) => Category::Table,
            DocSpec::Receipt(_) => Category::Receipt,
            DocSpec::Page(_) => Category::Page,
        }
    }

    /// Regenerates the gold markup from the spec alone.
    pub fn gold(&self) -> TaggedMarkup {
        match self {
            DocSpec::Chart(s) => s.gold(),
            DocSpec::Formula(s) => s.gold(),
            DocSpec::Table(s) => s.gold(),
            DocSpec::Receipt(s) => s.gold(),
            DocSpec::Page(s) => s.gold(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRecord {
    pub id: String,
    pub spec: DocSpec,
    pub gold: TaggedMarkup,
    /// Programmatic question-answer pairs; empty when the category has none.
    pub qa: Vec<QaPair>,
}

impl SynthRecord {
    pub(crate) fn new(prefix: &str, seed: u64, spec: DocSpec, qa: Vec<QaPair>) -> Self {
        SynthRecord {
            id: alloc::format!("{}-{:016x}", prefix, seed),
            gold: spec.gold(),
            spec,
            qa,
        }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of record `index` in `category` for a dataset built from `master`:
/// `splitmix64(splitmix64(master ^ salt) + index)` with salt the category's
/// 1-based position in [`Category::ALL`].
pub fn record_seed(master: u64, category: Category, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ category.salt()).wrapping_add(index))
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn qa(question: String, answer: String) -> QaPair {
    QaPair::new(question, answer).expect("generated questions and answers are non-empty and unframed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_seeds_differ_across_categories_and_indices() {
        let mut seen = alloc::collections::BTreeSet::new();
        for c in Category::ALL {
            for i in 0..100 {
                assert!(seen.insert(record_seed(7, c, i)));
            }
        }
        assert_eq!(record_seed(7, Category::Chart, 3), record_seed(7, Category::Chart, 3));
        assert_ne!(record_seed(7, Category::Chart, 3), record_seed(8, Category::Chart, 3));
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs of the reference SplitMix64 generator seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn range_checks() {
        assert!(CountRange::new(3, 2).check("x", 0).is_err());
        assert!(CountRange::new(0, 2).check("x", 1).is_err());
        assert!(CountRange::new(1, 1).check("x", 1).is_ok());
    }
}
