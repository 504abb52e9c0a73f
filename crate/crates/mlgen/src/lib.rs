//! Dataset pipeline around `mlgen-core`: manifests, atomic file output,
//! JSON Lines record formats, the annotation cache, the HTTP annotator, the
//! optional TikZ compiler hook and the five commands behind the `mlgen`
//! binary.

pub mod annotator;
pub mod cache;
pub mod commands;
pub mod compile;
pub mod error;
pub mod io;
pub mod manifest;
pub mod records;

pub use error::{PipelineError, Result};
pub use manifest::Manifest;
