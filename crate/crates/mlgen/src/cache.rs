//! Annotation cache: replies keyed by a digest of everything that shapes
//! them, so reruns and interrupted runs skip repeated annotator calls.
//!
//! The file is a JSON object sorted by key and is rewritten atomically on
//! every flush.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use mlgen_core::cot::AnnotationRequest;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::{read_json, write_json};

#[derive(Debug)]
pub struct AnnotationCache {
    path: Option<PathBuf>,
    entries: Mutex<BTreeMap<String, String>>,
}

/// Hex SHA-256 over the annotator identity and the full prompt (system text,
/// then the user text holding kind, gold body, question and answer), each
/// field terminated by a NUL byte.
pub fn cache_key(annotator: &str, request: &AnnotationRequest) -> String {
    let mut h = Sha256::new();
    for part in [annotator, &request.system, &request.user] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{:02x}", b)).collect()
}

impl AnnotationCache {
    /// A cache that never touches disk.
    pub fn in_memory() -> Self {
        AnnotationCache {
            path: None,
            entries: Mutex::new(BTreeMap::new()),
        }
    }

    /// Opens `path`, starting empty when the file does not exist yet.
    pub fn open(path: &Path) -> Result<Self> {
        let entries = if path.exists() {
            read_json(path)?
        } else {
            BTreeMap::new()
        };
        Ok(AnnotationCache {
            path: Some(path.into()),
            entries: Mutex::new(entries),
        })
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, key: String, reply: String) {
        self.entries.lock().expect("cache lock").insert(key, reply);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the whole cache to its file; a no-op for in-memory caches.
    pub fn flush(&self) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let entries = self.entries.lock().expect("cache lock");
        write_json(path, &*entries)
    }
}
