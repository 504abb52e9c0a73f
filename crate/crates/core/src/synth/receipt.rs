use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::words::{self, pick};
use super::{qa, rng_for, CountRange, DocSpec, SynthError, SynthRecord};
use crate::json::{self, Number, Value};
use crate::markup::{MarkupKind, TaggedMarkup};

/// A money amount in hundredths. All receipt arithmetic is done on these
/// integers; floats only appear when a JSON value is built for output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cents(pub u64);

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Cents {
    fn to_json(self) -> Value {
        Value::Number(Number {
            literal: self.to_string(),
            value: self.0 as f64 / 100.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiptItem {
    pub name: String,
    pub qty: u32,
    pub unit_price: Cents,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiptSpec {
    pub store: String,
    /// ISO date, `YYYY-MM-DD`.
    pub date: String,
    pub items: Vec<ReceiptItem>,
    /// Tax rate in basis points of the subtotal.
    pub tax_rate_bp: u32,
}

impl ReceiptSpec {
    pub fn subtotal(&self) -> Cents {
        Cents(self.items.iter().map(|i| i.qty as u64 * i.unit_price.0).sum())
    }

    /// Subtotal times the rate, rounded half up to the cent.
    pub fn tax(&self) -> Cents {
        Cents((self.subtotal().0 * self.tax_rate_bp as u64 + 5_000) / 10_000)
    }

    pub fn total(&self) -> Cents {
        Cents(self.subtotal().0 + self.tax().0)
    }

    /// JSON with keys `store`, `date`, `items`, `subtotal`, `tax`, `total`;
    /// amounts are number literals with exactly two decimals.
    pub fn gold(&self) -> TaggedMarkup {
        let items = self
            .items
            .iter()
            .map(|i| {
                Value::Object(alloc::vec![
                    ("name".into(), Value::String(i.name.clone())),
                    ("qty".into(), json::number(i.qty as f64)),
                    ("price".into(), i.unit_price.to_json()),
                ])
            })
            .collect();
        let doc = Value::Object(alloc::vec![
            ("store".into(), Value::String(self.store.clone())),
            ("date".into(), Value::String(self.date.clone())),
            ("items".into(), Value::Array(items)),
            ("subtotal".into(), self.subtotal().to_json()),
            ("tax".into(), self.tax().to_json()),
            ("total".into(), self.total().to_json()),
        ]);
        TaggedMarkup::new(MarkupKind::Json, json::to_canonical_string(&doc)).expect("no framing tokens in receipts")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReceiptConfig {
    pub items: CountRange,
    pub qty: CountRange,
    pub price_cents: CountRange,
    pub tax_rate_bp: CountRange,
}

impl Default for ReceiptConfig {
    fn default() -> Self {
        ReceiptConfig {
            items: CountRange::new(1, 6),
            qty: CountRange::new(1, 5),
            price_cents: CountRange::new(50, 5_000),
            tax_rate_bp: CountRange::new(0, 1_200),
        }
    }
}

pub fn synth_receipt(seed: u64, config: &ReceiptConfig) -> Result<SynthRecord, SynthError> {
    config.items.check("items", 1)?;
    config.qty.check("qty", 1)?;
    config.price_cents.check("price_cents", 0)?;
    config.tax_rate_bp.check("tax_rate_bp", 0)?;
    if config.tax_rate_bp.max > 10_000 {
        return Err(SynthError::InvalidConfig("tax rate above 100%".into()));
    }
    let mut rng = rng_for(seed);
    let n = config.items.sample(&mut rng) as usize;
    let items = words::pick_distinct(&mut rng, words::PRODUCTS, n)
        .into_iter()
        .map(|name| ReceiptItem {
            name: name.to_string(),
            qty: config.qty.sample(&mut rng),
            unit_price: Cents(config.price_cents.sample(&mut rng) as u64),
        })
        .collect();
    let spec = ReceiptSpec {
        store: pick(&mut rng, words::STORES).to_string(),
        date: alloc::format!(
            "{}-{:02}-{:02}",
            rng.random_range(2018..=2025u32),
            rng.random_range(1..=12u32),
            rng.random_range(1..=28u32)
        ),
        items,
        tax_rate_bp: config.tax_rate_bp.sample(&mut rng),
    };
    let pairs = alloc::vec![
        qa(
            "What is the total amount on the receipt?".into(),
            spec.total().to_string()
        ),
        qa("Which store issued this receipt?".into(), spec.store.clone()),
        qa("How much tax was charged?".into(), spec.tax().to_string()),
    ];
    Ok(SynthRecord::new("receipt", seed, DocSpec::Receipt(spec), pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_example() {
        let spec = ReceiptSpec {
            store: "S".into(),
            date: "2024-01-01".into(),
            items: alloc::vec![ReceiptItem {
                name: "x".into(),
                qty: 2,
                unit_price: Cents(150),
            }],
            tax_rate_bp: 0,
        };
        assert_eq!(spec.subtotal().to_string(), "3.00");
        assert_eq!(spec.total().to_string(), "3.00");
        assert_eq!(
            spec.gold().body(),
            r#"{"store": "S", "date": "2024-01-01", "items": [{"name": "x", "qty": 2, "price": 1.50}], "subtotal": 3.00, "tax": 0.00, "total": 3.00}"#
        );
    }

    #[test]
    fn tax_rounds_half_up() {
        let mut spec = ReceiptSpec {
            store: "S".into(),
            date: "d".into(),
            items: alloc::vec![ReceiptItem {
                name: "x".into(),
                qty: 1,
                unit_price: Cents(50),
            }],
            tax_rate_bp: 1_000,
        };
        assert_eq!(spec.tax(), Cents(5));
        spec.items[0].unit_price = Cents(25);
        // 2.5 cents rounds up
        assert_eq!(spec.tax(), Cents(3));
        spec.items[0].unit_price = Cents(24);
        assert_eq!(spec.tax(), Cents(2));
    }

    #[test]
    fn gold_parses_and_is_deterministic() {
        let c = ReceiptConfig::default();
        for seed in 0..50 {
            let r = synth_receipt(seed, &c).unwrap();
            assert!(json::parse(r.gold.body()).is_ok());
            assert_eq!(r, synth_receipt(seed, &c).unwrap());
        }
    }
}
