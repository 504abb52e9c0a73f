//! Deterministic cross-format conversion.

mod chart;
mod kie;
mod latex_md;
mod number;
mod reading_order;
mod summarize;
mod table;

pub use chart::{chart_meta_to_json, json_to_chart_meta, ChartMeta, ChartMetaError, Series};
pub use kie::{kie_fields_to_json, normalize_key, KieError, KieField};
pub use latex_md::{latex_to_markdown, LatexConversion, LatexError};
pub use number::normalize_number;
pub use reading_order::{
    group_lines, order_text_spans, parse_grounded_text, spans_to_grounded_text, GroundedTextError,
};
pub use summarize::html_summarize;
pub use table::{html_table_to_markdown, TableError};
