use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::words::{self, pick};
use super::{qa, rng_for, CountRange, DocSpec, SynthError, SynthRecord};
use crate::html::escape_text;
use crate::markup::{MarkupKind, TaggedMarkup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSection {
    pub heading: String,
    pub paragraphs: Vec<String>,
}

/// A simple web page: title, optional navigation, sections of headed
/// paragraphs and an optional footer. Navigation and footer are noise that a
/// summary must leave out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub title: String,
    pub nav: Vec<String>,
    pub sections: Vec<PageSection>,
    pub footer: Option<String>,
}

impl PageSpec {
    /// The document inside the root element. The `html` framing tokens
    /// double as the root tags, so the wrapped gold is the full page.
    pub fn html(&self) -> String {
        let mut out = String::from("<head><title>");
        out.push_str(&escape_text(&self.title));
        out.push_str("</title></head><body>\n");
        if !self.nav.is_empty() {
            out.push_str("<nav><ul>");
            for item in &self.nav {
                out.push_str("<li><a href=\"/");
                out.push_str(&item.to_lowercase());
                out.push_str("\">");
                out.push_str(&escape_text(item));
                out.push_str("</a></li>");
            }
            out.push_str("</ul></nav>\n");
        }
        for s in &self.sections {
            out.push_str("<section>\n<h2>");
            out.push_str(&escape_text(&s.heading));
            out.push_str("</h2>\n");
            for p in &s.paragraphs {
                out.push_str("<p>");
                out.push_str(&escape_text(p));
                out.push_str("</p>\n");
            }
            out.push_str("</section>\n");
        }
        if let Some(f) = &self.footer {
            out.push_str("<footer><p>");
            out.push_str(&escape_text(f));
            out.push_str("</p></footer>\n");
        }
        out.push_str("</body>");
        out
    }

    pub fn gold(&self) -> TaggedMarkup {
        TaggedMarkup::new(MarkupKind::Html, self.html()).expect("page text never contains framing tokens")
    }

    /// The expected summary: title, then each heading followed by its
    /// paragraphs, one per line.
    pub fn summary(&self) -> String {
        let mut lines: Vec<&str> = alloc::vec![self.title.as_str()];
        for s in &self.sections {
            lines.push(&s.heading);
            lines.extend(s.paragraphs.iter().map(String::as_str));
        }
        lines.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageConfig {
    pub sections: CountRange,
    pub paragraphs: CountRange,
    /// Chance of a navigation bar, in percent.
    pub nav_percent: u8,
    /// Chance of a footer, in percent.
    pub footer_percent: u8,
}

impl Default for PageConfig {
    fn default() -> Self {
        PageConfig {
            sections: CountRange::new(1, 5),
            paragraphs: CountRange::new(1, 3),
            nav_percent: 50,
            footer_percent: 50,
        }
    }
}

fn paragraph(rng: &mut rand_chacha::ChaCha8Rng) -> String {
    let n = rng.random_range(6..=16usize);
    let mut text = words::capitalize(&words::phrase(rng, n));
    if rng.random_bool(0.25) {
        text.push_str(" & ");
        text.push_str(&words::phrase(rng, 3));
    }
    text.push('.');
    text
}

pub fn synth_page(seed: u64, config: &PageConfig) -> Result<SynthRecord, SynthError> {
    config.sections.check("sections", 1)?;
    config.paragraphs.check("paragraphs", 1)?;
    if config.sections.max as usize > words::HEADINGS.len() {
        return Err(SynthError::InvalidConfig(alloc::format!(
            "at most {} sections",
            words::HEADINGS.len()
        )));
    }
    if config.nav_percent > 100 || config.footer_percent > 100 {
        return Err(SynthError::InvalidConfig("percentages above 100".into()));
    }
    let mut rng = rng_for(seed);
    let topic = pick(&mut rng, words::TOPICS);
    let title = alloc::format!("{} {}", topic, rng.random_range(2018..=2025u32));
    let nav = if rng.random_range(0..100u8) < config.nav_percent {
        let n = rng.random_range(3..=words::NAV.len());
        words::pick_distinct(&mut rng, words::NAV, n)
            .into_iter()
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };
    let n_sections = config.sections.sample(&mut rng) as usize;
    let sections: Vec<PageSection> = words::pick_distinct(&mut rng, words::HEADINGS, n_sections)
        .into_iter()
        .map(|heading| {
            let n = config.paragraphs.sample(&mut rng) as usize;
            PageSection {
                heading: heading.to_string(),
                paragraphs: (0..n).map(|_| paragraph(&mut rng)).collect(),
            }
        })
        .collect();
    let footer = (rng.random_range(0..100u8) < config.footer_percent).then(|| alloc::format!("© {} {}", 2025, topic));

    let k = rng.random_range(0..sections.len());
    let pairs = alloc::vec![
        qa("What is the title of this webpage?".into(), title.clone()),
        qa(
            alloc::format!("What is the heading of section {} on this page?", k + 1),
            sections[k].heading.clone(),
        ),
    ];
    let spec = PageSpec {
        title,
        nav,
        sections,
        footer,
    };
    Ok(SynthRecord::new("page", seed, DocSpec::Page(spec), pairs))
}
