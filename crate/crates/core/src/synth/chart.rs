use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::words::{self, pick};
use super::{qa, rng_for, CountRange, DocSpec, SynthError, SynthRecord};
use crate::convert::{chart_meta_to_json, ChartMeta, Series};
use crate::json::{format_number, quantize};
use crate::markup::TaggedMarkup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartType {
    Bar,
    Scatter,
    Line,
    Dot,
}

impl ChartType {
    pub const ALL: [ChartType; 4] = [ChartType::Bar, ChartType::Scatter, ChartType::Line, ChartType::Dot];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartStyle {
    pub font_name: String,
    pub color_palette: Vec<[u8; 3]>,
    pub width_px: u32,
    pub height_px: u32,
}

/// Everything a renderer needs to draw the chart. Serialized field names
/// are the interchange schema consumed by the plotting side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub meta: ChartMeta,
    pub chart_type: ChartType,
    pub style: ChartStyle,
    pub seed: u64,
}

impl ChartSpec {
    pub fn gold(&self) -> TaggedMarkup {
        chart_meta_to_json(&self.meta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChartConfig {
    pub series: CountRange,
    pub categories: CountRange,
    pub value_min: f64,
    pub value_max: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            series: CountRange::new(2, 5),
            categories: CountRange::new(3, 8),
            value_min: 0.0,
            value_max: 1000.0,
        }
    }
}

/// Values are drawn as whole hundredths, so the range is bounded to keep
/// them within the gold formatter's six significant digits.
const VALUE_LIMIT: f64 = 9999.99;
const MAX_SERIES: u32 = 10;

impl ChartConfig {
    fn check(&self) -> Result<(), SynthError> {
        self.series.check("series", 1)?;
        self.categories.check("categories", 1)?;
        if self.series.max > MAX_SERIES {
            return Err(SynthError::InvalidConfig(alloc::format!(
                "at most {} series",
                MAX_SERIES
            )));
        }
        let max_categories = words::CATEGORY_SETS.iter().map(|s| s.len()).min().unwrap_or(0) as u32;
        if self.categories.max > max_categories {
            return Err(SynthError::InvalidConfig(alloc::format!(
                "at most {} categories",
                max_categories
            )));
        }
        let finite = self.value_min.is_finite() && self.value_max.is_finite();
        if !finite || self.value_min > self.value_max {
            return Err(SynthError::InvalidConfig(
                "value range must be finite and ordered".into(),
            ));
        }
        if self.value_min < -VALUE_LIMIT || self.value_max > VALUE_LIMIT {
            return Err(SynthError::InvalidConfig(alloc::format!(
                "values must lie within ±{}",
                VALUE_LIMIT
            )));
        }
        let (lo, hi) = self.cent_bounds();
        if lo > hi {
            return Err(SynthError::InvalidConfig("value range contains no hundredth".into()));
        }
        Ok(())
    }

    fn cent_bounds(&self) -> (i64, i64) {
        (
            libm::ceil(self.value_min * 100.0) as i64,
            libm::floor(self.value_max * 100.0) as i64,
        )
    }
}

pub fn synth_chart(seed: u64, config: &ChartConfig) -> Result<SynthRecord, SynthError> {
    config.check()?;
    let mut rng = rng_for(seed);
    let n_series = config.series.sample(&mut rng) as usize;
    let n_cat = config.categories.sample(&mut rng) as usize;

    let set = words::CATEGORY_SETS[rng.random_range(0..words::CATEGORY_SETS.len())];
    let categories: Vec<String> = words::pick_distinct(&mut rng, set, n_cat)
        .into_iter()
        .map(str::to_string)
        .collect();
    let names: Vec<String> = words::pick_distinct(&mut rng, words::PLACES, n_series)
        .into_iter()
        .map(str::to_string)
        .collect();

    let (lo, hi) = config.cent_bounds();
    let series: Vec<Series> = names
        .into_iter()
        .map(|name| Series {
            name,
            values: (0..n_cat)
                .map(|_| quantize(rng.random_range(lo..=hi) as f64 / 100.0))
                .collect(),
        })
        .collect();

    let title = alloc::format!(
        "{} {}",
        words::capitalize(pick(&mut rng, words::ADJECTIVES)),
        pick(&mut rng, words::NOUNS)
    );
    let source = if rng.random_bool(0.7) {
        pick(&mut rng, words::SOURCES)
    } else {
        ""
    };
    let y_axis = pick(&mut rng, words::UNITS);
    let meta = ChartMeta::new(title, source, categories, y_axis, series).expect("generator keeps labels unique");

    let chart_type = ChartType::ALL[rng.random_range(0..ChartType::ALL.len())];
    let palette_len = n_series + rng.random_range(0..=2usize);
    let style = ChartStyle {
        font_name: pick(&mut rng, words::FONTS).to_string(),
        color_palette: (0..palette_len)
            .map(|_| [rng.random(), rng.random(), rng.random()])
            .collect(),
        width_px: 320 + 32 * rng.random_range(0..=20u32),
        height_px: 240 + 24 * rng.random_range(0..=20u32),
    };

    let s = &meta.series()[rng.random_range(0..n_series)];
    let c = rng.random_range(0..n_cat);
    let category = &meta.x_axis()[c];
    let lookup = qa(
        alloc::format!("What is the value of {} at {}?", s.name, category),
        format_number(s.values[c]),
    );
    let argmax = qa(
        alloc::format!("Which category has the highest value for {}?", s.name),
        meta.x_axis()[first_max(&s.values)].clone(),
    );

    let spec = ChartSpec {
        meta,
        chart_type,
        style,
        seed,
    };
    Ok(SynthRecord::new(
        "chart",
        seed,
        DocSpec::Chart(spec),
        alloc::vec![lookup, argmax],
    ))
}

fn first_max(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
