//! The build manifest: one JSON document from which every command takes its
//! configuration. All randomness flows from `master_seed`.

use std::path::{Path, PathBuf};

use mlgen_core::metrics::ApConfig;
use mlgen_core::synth::{default_corpus, Category, ChartConfig, PageConfig, ReceiptConfig, TableConfig};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

/// Records to generate per category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    pub chart: u64,
    pub table: u64,
    pub formula: u64,
    pub receipt: u64,
    pub page: u64,
}

impl Counts {
    pub fn get(&self, c: Category) -> u64 {
        match c {
            Category::Chart => self.chart,
            Category::Table => self.table,
            Category::Formula => self.formula,
            Category::Receipt => self.receipt,
            Category::Page => self.page,
        }
    }

    pub fn total(&self) -> u64 {
        Category::ALL.iter().map(|c| self.get(*c)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormulaConfig {
    /// Expression templates; the built-in corpus when absent.
    pub corpus: Option<Vec<String>>,
}

impl FormulaConfig {
    pub fn templates(&self) -> Vec<String> {
        self.corpus.clone().unwrap_or_else(default_corpus)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfigs {
    pub chart: ChartConfig,
    pub table: TableConfig,
    pub formula: FormulaConfig,
    pub receipt: ReceiptConfig,
    pub page: PageConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AnnotatorKind {
    #[default]
    Stub,
    Http,
}

/// Annotator selection. The HTTP key is only ever read from the
/// environment, never from the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotatorConfig {
    pub kind: AnnotatorKind,
    /// Chat-completions URL; `MLGEN_ANNOTATOR_ENDPOINT` when absent.
    pub endpoint: Option<String>,
    /// Model name; `MLGEN_ANNOTATOR_MODEL` when absent.
    pub model: Option<String>,
    pub timeout_secs: u64,
    pub attempts: u32,
    pub max_in_flight: usize,
    /// Longest accepted context in bytes.
    pub context_cap: usize,
    /// Annotation cache file, relative to the output directory.
    pub cache: Option<PathBuf>,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig {
            kind: AnnotatorKind::Stub,
            endpoint: None,
            model: None,
            timeout_secs: 60,
            attempts: 3,
            max_in_flight: 4,
            context_cap: mlgen_core::cot::DEFAULT_CONTEXT_CAP,
            cache: None,
        }
    }
}

/// External TikZ compiler hook. `command` is split on whitespace; `{input}`
/// is replaced by the path of the standalone `.tex` file and `{dir}` by its
/// directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompilerConfig {
    pub command: String,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
}

impl Default for CompilerConfig {
    fn default() -> Self {
        CompilerConfig {
            command: String::new(),
            timeout_secs: 20,
            max_in_flight: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Manifest {
    pub master_seed: u64,
    pub counts: Counts,
    pub configs: SynthConfigs,
    pub ap: ApConfig,
    pub annotator: AnnotatorConfig,
    pub compiler: Option<CompilerConfig>,
    /// Image tiles assumed per record when no tile counts are given.
    pub default_tiles: u32,
    pub tokens_per_tile: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            master_seed: 0,
            counts: Counts::default(),
            configs: SynthConfigs::default(),
            ap: ApConfig::default(),
            annotator: AnnotatorConfig::default(),
            compiler: None,
            default_tiles: 1,
            tokens_per_tile: mlgen_core::metrics::DEFAULT_TOKENS_PER_TILE,
            out_dir: None,
        }
    }
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Usage(format!("cannot read manifest {}: {}", path.display(), e)))?;
        let m: Manifest = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Usage(format!("manifest {}: {}", path.display(), e)))?;
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<()> {
        let usage = |s: &str| Err(PipelineError::Usage(s.into()));
        self.ap.check().map_err(|e| PipelineError::Usage(e.to_string()))?;
        if !(1..=mlgen_core::metrics::MAX_TILES).contains(&self.default_tiles) {
            return usage("default_tiles must be within 1..=12");
        }
        if self.tokens_per_tile == 0 {
            return usage("tokens_per_tile must be at least 1");
        }
        let a = &self.annotator;
        if a.max_in_flight == 0 || a.attempts == 0 || a.timeout_secs == 0 || a.context_cap == 0 {
            return usage("annotator limits must be positive");
        }
        if let Some(c) = &self.compiler {
            c.check()?;
        }
        Ok(())
    }
}

impl CompilerConfig {
    pub fn check(&self) -> Result<()> {
        if !self.command.contains("{input}") {
            return Err(PipelineError::Usage("compiler command must contain {input}".into()));
        }
        if self.timeout_secs == 0 || self.max_in_flight == 0 {
            return Err(PipelineError::Usage("compiler limits must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let m: Manifest = serde_json::from_str(r#"{"master_seed": 5, "counts": {"chart": 2}}"#).unwrap();
        assert_eq!(m.master_seed, 5);
        assert_eq!(m.counts.total(), 2);
        assert_eq!(m.tokens_per_tile, 256);
        assert_eq!(m.default_tiles, 1);
        assert!(m.check().is_ok());
    }

    #[test]
    fn unknown_fields_and_bad_limits_are_usage_errors() {
        assert!(serde_json::from_str::<Manifest>(r#"{"seed": 1}"#).is_err());
        let m: Manifest =
            serde_json::from_str(r#"{"ap": {"tol_strict": 0.2, "tol_slight": 0.1, "tol_high": 0.3}}"#).unwrap();
        assert_eq!(m.check().unwrap_err().exit_code(), 2);
        let m: Manifest = serde_json::from_str(r#"{"compiler": {"command": "pdflatex x.tex"}}"#).unwrap();
        assert_eq!(m.check().unwrap_err().exit_code(), 2);
    }
}
