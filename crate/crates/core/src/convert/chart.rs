//! Chart metadata and its gold JSON form.
//!
//! The JSON object has exactly the keys `title`, `source`, `x-axis`,
//! `y-axis` and `value`, in that order; `value` maps each series name to its
//! value list.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::normalize_number;
use crate::json::{self, Value};
use crate::markup::{MarkupKind, TaggedMarkup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartMeta {
    title: String,
    source: String,
    x_axis: Vec<String>,
    y_axis: String,
    series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartMetaError {
    #[error("series `{series}` has {got} values for {expected} categories")]
    RaggedSeries {
        series: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate series name `{0}`")]
    DuplicateSeries(String),
    #[error("duplicate category label `{0}`")]
    DuplicateCategory(String),
    #[error("empty category label")]
    EmptyCategory,
    #[error("non-finite value in series `{0}`")]
    NonFinite(String),
    #[error("not JSON: {0}")]
    NotJson(json::JsonError),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}

impl ChartMeta {
    pub fn new(
        title: impl Into<String>,
        source: impl Into<String>,
        x_axis: Vec<String>,
        y_axis: impl Into<String>,
        series: Vec<Series>,
    ) -> Result<Self, ChartMetaError> {
        for (i, label) in x_axis.iter().enumerate() {
            if label.is_empty() {
                return Err(ChartMetaError::EmptyCategory);
            }
            if x_axis[..i].contains(label) {
                return Err(ChartMetaError::DuplicateCategory(label.clone()));
            }
        }
        for (i, s) in series.iter().enumerate() {
            if s.values.len() != x_axis.len() {
                return Err(ChartMetaError::RaggedSeries {
                    series: s.name.clone(),
                    expected: x_axis.len(),
                    got: s.values.len(),
                });
            }
            if series[..i].iter().any(|p| p.name == s.name) {
                return Err(ChartMetaError::DuplicateSeries(s.name.clone()));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(ChartMetaError::NonFinite(s.name.clone()));
            }
        }
        Ok(ChartMeta {
            title: title.into(),
            source: source.into(),
            x_axis,
            y_axis: y_axis.into(),
            series,
        })
    }

    pub fn title(&self) -> &str {
        &self.title
    }
    pub fn source(&self) -> &str {
        &self.source
    }
    pub fn x_axis(&self) -> &[String] {
        &self.x_axis
    }
    pub fn y_axis(&self) -> &str {
        &self.y_axis
    }
    pub fn series(&self) -> &[Series] {
        &self.series
    }

    /// Value of `series` at `category`, by exact label.
    pub fn value(&self, series: &str, category: &str) -> Option<f64> {
        let col = self.x_axis.iter().position(|c| c == category)?;
        self.series.iter().find(|s| s.name == series).map(|s| s.values[col])
    }
}

impl<'de> Deserialize<'de> for ChartMeta {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            title: String,
            source: String,
            x_axis: Vec<String>,
            y_axis: String,
            series: Vec<Series>,
        }
        let r = Raw::deserialize(deserializer)?;
        ChartMeta::new(r.title, r.source, r.x_axis, r.y_axis, r.series).map_err(serde::de::Error::custom)
    }
}

pub fn chart_meta_to_json(meta: &ChartMeta) -> TaggedMarkup {
    let value = Value::Object(
        meta.series
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    Value::Array(s.values.iter().map(|v| json::number(*v)).collect()),
                )
            })
            .collect(),
    );
    let doc = Value::Object(alloc::vec![
        ("title".into(), Value::String(meta.title.clone())),
        ("source".into(), Value::String(meta.source.clone())),
        (
            "x-axis".into(),
            Value::Array(meta.x_axis.iter().map(|c| Value::String(c.clone())).collect()),
        ),
        ("y-axis".into(), Value::String(meta.y_axis.clone())),
        ("value".into(), value),
    ]);
    // text holding a framing token is written with `<` escaped as \u003c
    let body = json::to_canonical_string(&doc);
    match TaggedMarkup::new(MarkupKind::Json, body) {
        Ok(m) => m,
        Err(_) => {
            let escaped = json::to_canonical_string(&doc).replace('<', "\\u003c");
            TaggedMarkup::new(MarkupKind::Json, escaped).expect("no '<' left")
        }
    }
}

/// Reads chart JSON, tolerant of key order, whitespace and formatted numbers.
pub fn json_to_chart_meta(body: &str) -> Result<ChartMeta, ChartMetaError> {
    let doc = json::parse(body).map_err(ChartMetaError::NotJson)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| ChartMetaError::SchemaMismatch("top level is not an object".into()))?;
    let field = |key: &str| -> Result<&Value, ChartMetaError> {
        obj.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| ChartMetaError::SchemaMismatch(alloc::format!("missing key `{}`", key)))
    };
    let text = |key: &str| -> Result<String, ChartMetaError> {
        match field(key)? {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.literal.clone()),
            Value::Null => Ok(String::new()),
            _ => Err(ChartMetaError::SchemaMismatch(alloc::format!(
                "`{}` is not a string",
                key
            ))),
        }
    };
    let title = text("title")?;
    let source = text("source")?;
    let y_axis = text("y-axis")?;
    let x_axis = field("x-axis")?
        .as_array()
        .ok_or_else(|| ChartMetaError::SchemaMismatch("`x-axis` is not an array".into()))?
        .iter()
        .map(|v| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.literal.clone()),
            _ => Err(ChartMetaError::SchemaMismatch("`x-axis` label is not a string".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let values = field("value")?
        .as_object()
        .ok_or_else(|| ChartMetaError::SchemaMismatch("`value` is not an object".into()))?;
    let mut series = Vec::with_capacity(values.len());
    for (name, list) in values {
        let items = list
            .as_array()
            .ok_or_else(|| ChartMetaError::SchemaMismatch(alloc::format!("series `{}` is not an array", name)))?;
        let values = items
            .iter()
            .map(|v| match v {
                Value::Number(n) => Ok(n.value),
                Value::String(s) => normalize_number(s)
                    .ok_or_else(|| ChartMetaError::SchemaMismatch(alloc::format!("`{}` is not a number", s))),
                _ => Err(ChartMetaError::SchemaMismatch(alloc::format!(
                    "non-numeric value in `{}`",
                    name
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        series.push(Series {
            name: name.clone(),
            values,
        });
    }
    ChartMeta::new(title, source, x_axis, y_axis, series).map_err(|e| match e {
        e @ (ChartMetaError::SchemaMismatch(_) | ChartMetaError::NotJson(_)) => e,
        other => ChartMetaError::SchemaMismatch(other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn meta(title: &str, source: &str, x: &[&str], y: &str, series: &[(&str, &[f64])]) -> ChartMeta {
        ChartMeta::new(
            title,
            source,
            x.iter().map(|s| s.to_string()).collect(),
            y,
            series
                .iter()
                .map(|(n, v)| Series {
                    name: n.to_string(),
                    values: v.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn gold_layout() {
        let m = meta("T", "S", &["a"], "Y", &[("s1", &[1.0])]);
        assert_eq!(
            chart_meta_to_json(&m).body(),
            r#"{"title": "T", "source": "S", "x-axis": ["a"], "y-axis": "Y", "value": {"s1": [1]}}"#
        );
        let empty = meta("", "", &["a"], "", &[("s", &[2.5])]);
        assert_eq!(
            chart_meta_to_json(&empty).body(),
            r#"{"title": "", "source": "", "x-axis": ["a"], "y-axis": "", "value": {"s": [2.5]}}"#
        );
    }

    #[test]
    fn reader_is_tolerant() {
        let body = r#"{ "value": {"s1": ["1,234", "56%", "$12"], "s2": [1, 2, 3]},
            "y-axis": "Y", "x-axis": ["a", "b", 2020], "source": null, "title": "T", "extra": true }"#;
        let m = json_to_chart_meta(body).unwrap();
        assert_eq!(m.x_axis(), ["a", "b", "2020"]);
        assert_eq!(m.series()[0].values, vec![1234.0, 56.0, 12.0]);
        assert_eq!(m.source(), "");
        assert_eq!(m.value("s2", "b"), Some(2.0));
    }

    #[test]
    fn reader_errors() {
        assert!(matches!(
            json_to_chart_meta("{}"),
            Err(ChartMetaError::SchemaMismatch(_))
        ));
        assert!(matches!(json_to_chart_meta("nope"), Err(ChartMetaError::NotJson(_))));
        let ragged = r#"{"title": "", "source": "", "x-axis": ["a", "b"], "y-axis": "", "value": {"s": [1]}}"#;
        assert!(matches!(
            json_to_chart_meta(ragged),
            Err(ChartMetaError::SchemaMismatch(_))
        ));
        let dup = r#"{"title": "", "source": "", "x-axis": ["a"], "y-axis": "", "value": {"s": [1], "s": [2]}}"#;
        assert!(matches!(
            json_to_chart_meta(dup),
            Err(ChartMetaError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn invariants_enforced() {
        let x = vec!["a".to_string(), "a".to_string()];
        assert!(matches!(
            ChartMeta::new("", "", x, "", vec![]),
            Err(ChartMetaError::DuplicateCategory(_))
        ));
        let s = vec![Series {
            name: "s".into(),
            values: vec![f64::NAN],
        }];
        assert!(matches!(
            ChartMeta::new("", "", vec!["a".into()], "", s),
            Err(ChartMetaError::NonFinite(_))
        ));
    }

    #[test]
    fn framing_text_is_escaped() {
        let m = meta("<md>", "", &["a"], "", &[("s", &[1.0])]);
        let g = chart_meta_to_json(&m);
        assert_eq!(json_to_chart_meta(g.body()).unwrap(), m);
    }
}
