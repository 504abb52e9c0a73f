//! Field-level F1 for key information extraction.
//!
//! Both sides are read as JSON objects. Nested objects and arrays are
//! flattened into dotted paths (`items.0.price`), so a receipt with line
//! items scores per field. Keys compare after whitespace collapsing and
//! lowercasing; values compare as numbers when both parse as formatted
//! numbers (`"1,000"` equals `1000`), otherwise as whitespace-collapsed text.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::convert::{normalize_key, normalize_number};
use crate::html::collapse_whitespace;
use crate::json::{self, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMatch {
    pub key: String,
    pub gold: Option<String>,
    pub pred: Option<String>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KieScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_field: Vec<FieldMatch>,
}

/// Flattens a JSON object into `(normalized path, scalar text)` pairs in
/// document order. The first occurrence of a path wins. Returns `None` when
/// the document is not an object.
pub fn flatten_fields(doc: &Value) -> Option<Vec<(String, String)>> {
    let obj = doc.as_object()?;
    let mut out: Vec<(String, String)> = Vec::new();
    for (k, v) in obj {
        flatten_into(&normalize_key(k), v, &mut out);
    }
    Some(out)
}

fn flatten_into(path: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let mut leaf = |text: String| {
        if !out.iter().any(|(k, _)| k == path) {
            out.push((path.to_string(), text));
        }
    };
    match v {
        Value::Object(members) => {
            for (k, child) in members {
                flatten_into(&alloc::format!("{}.{}", path, normalize_key(k)), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten_into(&alloc::format!("{}.{}", path, i), child, out);
            }
        }
        Value::String(s) => leaf(s.clone()),
        Value::Number(n) => leaf(n.literal.clone()),
        Value::Bool(b) => leaf(b.to_string()),
        Value::Null => leaf(String::new()),
    }
}

fn values_match(a: &str, b: &str) -> bool {
    match (normalize_number(a), normalize_number(b)) {
        (Some(x), Some(y)) => x == y,
        _ => collapse_whitespace(a) == collapse_whitespace(b),
    }
}

pub fn kie_f1(pred_json: &str, gold_json: &str) -> Result<KieScore, MetricError> {
    let gold_doc = json::parse(gold_json).map_err(|e| MetricError::GoldUnparseable(e.to_string()))?;
    let gold = flatten_fields(&gold_doc).ok_or_else(|| MetricError::GoldUnparseable("gold is not an object".into()))?;
    let pred = json::parse(pred_json).ok().and_then(|d| flatten_fields(&d));
    let pred_parsed = pred.is_some();
    let pred = pred.unwrap_or_default();

    let mut per_field = Vec::with_capacity(gold.len());
    let mut tp = 0usize;
    for (k, gv) in &gold {
        let pv = pred.iter().find(|(pk, _)| pk == k).map(|(_, v)| v.clone());
        let matched = pv.as_deref().is_some_and(|p| values_match(p, gv));
        tp += usize::from(matched);
        per_field.push(FieldMatch {
            key: k.clone(),
            gold: Some(gv.clone()),
            pred: pv,
            matched,
        });
    }
    for (k, pv) in &pred {
        if !gold.iter().any(|(gk, _)| gk == k) {
            per_field.push(FieldMatch {
                key: k.clone(),
                gold: None,
                pred: Some(pv.clone()),
                matched: false,
            });
        }
    }

    let (precision, recall) = if !pred_parsed {
        (0.0, 0.0)
    } else {
        let p = if pred.is_empty() {
            if gold.is_empty() {
                1.0
            } else {
                0.0
            }
        } else {
            tp as f64 / pred.len() as f64
        };
        let r = if gold.is_empty() {
            if pred.is_empty() {
                1.0
            } else {
                0.0
            }
        } else {
            tp as f64 / gold.len() as f64
        };
        (p, r)
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(KieScore {
        precision,
        recall,
        f1,
        per_field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let gold = r#"{"store": "A", "total": "5.00"}"#;
        let s = kie_f1(gold, gold).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));

        let s = kie_f1(r#"{"total": "5", "extra": "x"}"#, r#"{"total": "5"}"#).unwrap();
        assert_eq!((s.precision, s.recall), (0.5, 1.0));
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);

        let s = kie_f1(r#"{"amount": "1,000"}"#, r#"{"amount": "1000"}"#).unwrap();
        assert_eq!(s.f1, 1.0);
    }

    #[test]
    fn edge_cases() {
        assert_eq!(kie_f1("{}", "{}").unwrap().f1, 1.0);
        assert_eq!(kie_f1("garbage", r#"{"a": "1"}"#).unwrap().f1, 0.0);
        assert_eq!(kie_f1(r#"{"b": "1"}"#, r#"{"a": "1"}"#).unwrap().f1, 0.0);
        assert!(kie_f1("{}", "[").is_err());
        assert!(kie_f1("{}", "[1]").is_err());
    }

    #[test]
    fn nested_and_keys_normalized() {
        let gold = r#"{"Items": [{"name": "Tea", "price": 1.50}], "Total": 1.50}"#;
        let pred = r#"{"total": "$1.50", "items": [{"NAME": "Tea", "price": "1.5"}]}"#;
        let s = kie_f1(pred, gold).unwrap();
        assert_eq!(s.f1, 1.0, "{:?}", s.per_field);
        let keys: Vec<&str> = s.per_field.iter().map(|f| f.key.as_str()).collect();
        assert_eq!(keys, ["items.0.name", "items.0.price", "total"]);
    }
}
