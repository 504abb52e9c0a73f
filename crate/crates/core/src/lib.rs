//! Core building blocks for markup-grounded document datasets.
//!
//! Everything in this crate is a pure function over owned values and builds
//! under `no_std` with `alloc`. File formats, process execution, HTTP and the
//! command line live in the `mlgen` companion crate.
//!
//! Layout:
//!
//! - [`markup`]: markup kinds, `<kind>…</kind>` framing, boxes and text spans.
//! - [`convert`]: deterministic cross-format converters.
//! - [`synth`]: seeded generators of document specs with gold markup.
//! - [`validate`]: per-kind structural validation and dataset filtering.
//! - [`cot`]: two-round chain-of-thought record construction.
//! - [`metrics`]: scoring of predictions against gold.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod convert;
pub mod cot;
pub mod html;
pub mod json;
pub mod latex;
pub mod markup;
pub mod metrics;
pub mod synth;
pub mod validate;

pub use markup::{detect_kind, parse_tagged, wrap_tagged, BBox, MarkupError, MarkupKind, TaggedMarkup, TextSpan};
