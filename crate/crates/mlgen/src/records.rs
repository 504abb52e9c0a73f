//! On-disk record formats: gold lines, spec files and CoT exports.

use std::path::{Path, PathBuf};

use mlgen_core::cot::{ConversationRecord, QaPair};
use mlgen_core::markup::{MarkupKind, TaggedMarkup};
use mlgen_core::synth::{Category, DocSpec};
use mlgen_core::validate::GoldSource;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::io::{read_jsonl, write_jsonl};

/// One line of `gold.jsonl`. `category` and `qa` are absent for records
/// imported from elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    pub kind: MarkupKind,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qa: Vec<QaPair>,
}

impl GoldLine {
    pub fn image_ref(&self) -> String {
        self.image_ref
            .clone()
            .unwrap_or_else(|| format!("images/{}.png", self.id))
    }

    /// The body as framed markup; fails when it holds a framing token.
    pub fn markup(&self) -> Result<TaggedMarkup> {
        TaggedMarkup::new(self.kind, self.body.clone())
            .map_err(|e| PipelineError::Data(format!("record {}: {}", self.id, e)))
    }
}

impl GoldSource for GoldLine {
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

/// Contents of `specs/{id}.json`: the renderer's input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub id: String,
    pub seed: u64,
    #[serde(flatten)]
    pub spec: DocSpec,
}

/// A question that was not packaged, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRecord {
    pub id: String,
    pub image_ref: String,
    pub markup_kind: MarkupKind,
    pub source_qa: QaPair,
    pub reason: String,
}

/// `dir/name.jsonl` → `dir/name.rejected.jsonl`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{}.rejected.jsonl", stem))
}

/// Writes packaged records to `path` and rejected ones to its sidecar;
/// returns the number of packaged lines.
pub fn export_jsonl(records: &[ConversationRecord], rejected: &[RejectedRecord], path: &Path) -> Result<usize> {
    write_jsonl(&sidecar_path(path), rejected)?;
    write_jsonl(path, records)
}

/// Reads packaged records; each line is checked against the record grammar.
pub fn import_jsonl(path: &Path) -> Result<Vec<ConversationRecord>> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_names() {
        assert_eq!(
            sidecar_path(Path::new("out/cot.jsonl")),
            Path::new("out/cot.rejected.jsonl")
        );
    }

    #[test]
    fn gold_line_optional_fields() {
        let g: GoldLine = serde_json::from_str(r#"{"id": "x", "kind": "txt_gd", "body": "a"}"#).unwrap();
        assert_eq!(g.category, None);
        assert_eq!(g.image_ref(), "images/x.png");
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"id":"x","kind":"txt_gd","body":"a"}"#
        );
    }
}
