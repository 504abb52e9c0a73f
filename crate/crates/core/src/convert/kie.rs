use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::html::collapse_whitespace;
use crate::json::{self, Value};
use crate::markup::{MarkupError, MarkupKind, TaggedMarkup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KieError {
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("empty key")]
    EmptyKey,
    #[error(transparent)]
    Markup(#[from] MarkupError),
}

/// One key-value field of a key information extraction record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KieField {
    pub key: String,
    pub value: String,
}

impl KieField {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Result<Self, KieError> {
        let key = key.into();
        if key.trim().is_empty() {
            return Err(KieError::EmptyKey);
        }
        Ok(KieField {
            key,
            value: value.into(),
        })
    }
}

/// Trimmed, whitespace-collapsed, lowercased key.
pub fn normalize_key(key: &str) -> String {
    collapse_whitespace(key).to_lowercase()
}

/// Fields as a canonical JSON object, keys in input order.
pub fn kie_fields_to_json(fields: &[KieField]) -> Result<TaggedMarkup, KieError> {
    let mut seen: Vec<String> = Vec::with_capacity(fields.len());
    let mut members = Vec::with_capacity(fields.len());
    for f in fields {
        let norm = normalize_key(&f.key);
        if norm.is_empty() {
            return Err(KieError::EmptyKey);
        }
        if seen.contains(&norm) {
            return Err(KieError::DuplicateKey(f.key.clone()));
        }
        seen.push(norm);
        members.push((f.key.clone(), Value::String(f.value.clone())));
    }
    let body = json::to_canonical_string(&Value::Object(members));
    Ok(TaggedMarkup::new(MarkupKind::Json, body)?)
}
