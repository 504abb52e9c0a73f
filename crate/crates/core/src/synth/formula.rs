use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rng_for, DocSpec, SynthError, SynthRecord};
use crate::latex::check_structure;
use crate::markup::{MarkupKind, TaggedMarkup};

/// Template placeholders. In a template, `N`, `V` and `G` are placeholders
/// only when standalone: not preceded by an alphanumeric character or a
/// backslash and not followed by a letter, so `\Gamma` or `\mathbf{E}`
/// stay untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placeholder {
    /// `N`: a digit from 1 to 9.
    Number,
    /// `V`: a Latin variable letter.
    Variable,
    /// `G`: a Greek letter command.
    Greek,
}

impl Placeholder {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'N' => Some(Placeholder::Number),
            'V' => Some(Placeholder::Variable),
            'G' => Some(Placeholder::Greek),
            _ => None,
        }
    }
}

const VARIABLES: &[&str] = &["x", "y", "z", "a", "b", "t", "u", "r"];
const GREEK: &[&str] = &[
    "\\alpha", "\\beta", "\\gamma", "\\theta", "\\lambda", "\\mu", "\\sigma", "\\phi", "\\omega",
];

const TEMPLATES: &[&str] = &[
    "x^{N}",
    "\\frac{V}{N} + \\frac{N}{V}",
    "\\sum_{i=1}^{N} V_{i}^{N}",
    "\\int_{0}^{N} V^{N} \\, \\mathrm{d}V",
    "\\sqrt{V^{2} + N}",
    "(V + N)^{N} = \\sum_{k=0}^{N} \\binom{N}{k} V^{k} N^{N-k}",
    "\\sin^{2} G + \\cos^{2} G = 1",
    "f(V) = N V^{2} + N V + N",
    "\\left( \\frac{V}{N} \\right)^{N}",
    "\\begin{cases} V & V > 0 \\\\ -V & V \\le 0 \\end{cases}",
    "\\vec{V} \\cdot \\vec{V} = N",
    "\\log_{N} V = \\frac{\\ln V}{\\ln N}",
    "\\prod_{i=1}^{N} (1 + G_{i})",
    "\\begin{pmatrix} V & N \\\\ N & V \\end{pmatrix}",
    "\\lim_{V \\to \\infty} \\left(1 + \\frac{N}{V}\\right)^{V}",
    "e^{i G} = \\cos G + i \\sin G",
    "V_{n+1} = N V_{n} - N",
    "\\Delta V = N G^{2}",
];

/// The built-in template corpus.
pub fn default_corpus() -> Vec<String> {
    TEMPLATES.iter().map(|t| t.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Augment {
    /// Degrees, within [-5, 5].
    pub rotate_deg: f64,
    /// Horizontal shear factor, within [-0.1, 0.1].
    pub shear: f64,
    /// Standard deviation of additive pixel noise, at least 0.
    pub noise_sigma: f64,
}

impl Augment {
    pub const ROTATE_LIMIT: f64 = 5.0;
    pub const SHEAR_LIMIT: f64 = 0.1;
    pub const SIGMA_MAX: f64 = 10.0;

    // Drawn on integer grids so values are exact decimal fractions.
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        Augment {
            rotate_deg: rng.random_range(-500..=500i32) as f64 / 100.0,
            shear: rng.random_range(-100..=100i32) as f64 / 1000.0,
            noise_sigma: rng.random_range(0..=100i32) as f64 / 10.0,
        }
    }

    pub fn in_range(&self) -> bool {
        self.rotate_deg.abs() <= Self::ROTATE_LIMIT
            && self.shear.abs() <= Self::SHEAR_LIMIT
            && (0.0..=Self::SIGMA_MAX).contains(&self.noise_sigma)
    }
}

/// A rendered-formula job: one math expression plus augmentation. Serialized
/// field names are the interchange schema consumed by the renderer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaSpec {
    pub latex: String,
    pub augment: Augment,
    pub seed: u64,
}

impl FormulaSpec {
    pub fn gold(&self) -> TaggedMarkup {
        TaggedMarkup::new(MarkupKind::Latex, self.latex.clone()).expect("templates never contain framing tokens")
    }
}

/// Replaces each standalone placeholder with `pick(placeholder)`.
pub fn instantiate_with(template: &str, mut pick: impl FnMut(Placeholder) -> String) -> String {
    let chars: Vec<char> = template.chars().collect();
    let mut out = String::with_capacity(template.len());
    for (i, &c) in chars.iter().enumerate() {
        let standalone = Placeholder::from_char(c).filter(|_| {
            let prev_ok = i == 0 || !(chars[i - 1].is_alphanumeric() || chars[i - 1] == '\\');
            let next_ok = chars.get(i + 1).is_none_or(|n| !n.is_alphabetic());
            prev_ok && next_ok
        });
        match standalone {
            Some(p) => out.push_str(&pick(p)),
            None => out.push(c),
        }
    }
    out
}

/// Instantiates every placeholder with a seeded draw.
pub fn instantiate_template(template: &str, rng: &mut ChaCha8Rng) -> String {
    instantiate_with(template, |p| match p {
        Placeholder::Number => rng.random_range(1..=9u32).to_string(),
        Placeholder::Variable => VARIABLES[rng.random_range(0..VARIABLES.len())].to_string(),
        Placeholder::Greek => GREEK[rng.random_range(0..GREEK.len())].to_string(),
    })
}

pub fn synth_formula<S: AsRef<str>>(seed: u64, corpus: &[S]) -> Result<SynthRecord, SynthError> {
    if corpus.is_empty() {
        return Err(SynthError::EmptyCorpus);
    }
    if let Some(bad) = corpus.iter().find(|t| check_structure(t.as_ref()).is_err()) {
        return Err(SynthError::InvalidTemplate(bad.as_ref().to_string()));
    }
    let mut rng = rng_for(seed);
    let template = corpus[rng.random_range(0..corpus.len())].as_ref();
    let latex = instantiate_template(template, &mut rng);
    let augment = Augment::sample(&mut rng);
    let spec = FormulaSpec { latex, augment, seed };
    if TaggedMarkup::new(MarkupKind::Latex, spec.latex.as_str()).is_err() {
        return Err(SynthError::InvalidTemplate(template.to_string()));
    }
    Ok(SynthRecord::new("formula", seed, DocSpec::Formula(spec), Vec::new()))
}
