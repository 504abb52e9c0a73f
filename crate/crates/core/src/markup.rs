//! Markup kinds and the `<kind>body</kind>` framing used in answer fields.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The seven structured representations a document can be parsed into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkupKind {
    Txt,
    TxtGd,
    Md,
    Latex,
    Html,
    Json,
    Tikz,
}

/// (kind, tag, open token, close token). Tags are the lowercase variant names.
const TAG_TABLE: [(MarkupKind, &str, &str, &str); 7] = [
    (MarkupKind::Txt, "txt", "<txt>", "</txt>"),
    (MarkupKind::TxtGd, "txt_gd", "<txt_gd>", "</txt_gd>"),
    (MarkupKind::Md, "md", "<md>", "</md>"),
    (MarkupKind::Latex, "latex", "<latex>", "</latex>"),
    (MarkupKind::Html, "html", "<html>", "</html>"),
    (MarkupKind::Json, "json", "<json>", "</json>"),
    (MarkupKind::Tikz, "tikz", "<tikz>", "</tikz>"),
];

impl MarkupKind {
    pub const ALL: [MarkupKind; 7] = [
        MarkupKind::Txt,
        MarkupKind::TxtGd,
        MarkupKind::Md,
        MarkupKind::Latex,
        MarkupKind::Html,
        MarkupKind::Json,
        MarkupKind::Tikz,
    ];

    fn entry(self) -> &'static (MarkupKind, &'static str, &'static str, &'static str) {
        &TAG_TABLE[self as usize]
    }

    pub fn tag(self) -> &'static str {
        self.entry().1
    }

    pub fn open_token(self) -> &'static str {
        self.entry().2
    }

    pub fn close_token(self) -> &'static str {
        self.entry().3
    }

    pub fn from_tag(tag: &str) -> Option<MarkupKind> {
        TAG_TABLE.iter().find(|e| e.1 == tag).map(|e| e.0)
    }
}

impl fmt::Display for MarkupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MarkupKind {
    type Err = MarkupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MarkupKind::from_tag(s).ok_or_else(|| MarkupError::UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkupError {
    #[error("unknown markup tag `{0}`")]
    UnknownTag(String),
    #[error("frame opened with <{open}> but closed with </{close}>")]
    MismatchedTag { open: MarkupKind, close: MarkupKind },
    #[error("content after the closing tag at byte {0}")]
    TrailingContent(usize),
    #[error("input is not framed by <kind>…</kind>")]
    MissingFrame,
    #[error("body contains the framing token `{token}` at byte {offset}")]
    EmbeddedTag { token: &'static str, offset: usize },
    #[error("bounding box ({x1},{y1}),({x2},{y2}) is outside the 0..=1000 grid or inverted")]
    InvalidBox { x1: u32, y1: u32, x2: u32, y2: u32 },
    #[error("text span is empty")]
    EmptySpan,
    #[error("text span contains a line break")]
    MultilineSpan,
}

/// Returns the first framing token of any kind found in `s`, with its offset.
pub fn find_framing_token(s: &str) -> Option<(&'static str, usize)> {
    let mut best: Option<(&'static str, usize)> = None;
    for (_, _, open, close) in TAG_TABLE.iter() {
        for token in [*open, *close] {
            if let Some(pos) = s.find(token) {
                if best.is_none_or(|(_, b)| pos < b) {
                    best = Some((token, pos));
                }
            }
        }
    }
    best
}

/// A markup payload together with its kind. The body never contains a framing
/// token of any kind, so the frame produced by [`wrap_tagged`] is unambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TaggedMarkup {
    kind: MarkupKind,
    body: String,
}

impl TaggedMarkup {
    pub fn new(kind: MarkupKind, body: impl Into<String>) -> Result<Self, MarkupError> {
        let body = body.into();
        if let Some((token, offset)) = find_framing_token(&body) {
            return Err(MarkupError::EmbeddedTag { token, offset });
        }
        Ok(TaggedMarkup { kind, body })
    }

    pub fn kind(&self) -> MarkupKind {
        self.kind
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn into_body(self) -> String {
        self.body
    }

    pub fn wrap(&self) -> String {
        wrap_tagged(self)
    }
}

impl<'de> Deserialize<'de> for TaggedMarkup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: MarkupKind,
            body: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        TaggedMarkup::new(raw.kind, raw.body).map_err(serde::de::Error::custom)
    }
}

pub fn wrap_tagged(m: &TaggedMarkup) -> String {
    let mut out = String::with_capacity(m.body.len() + 2 * m.kind.tag().len() + 5);
    out.push_str(m.kind.open_token());
    out.push_str(&m.body);
    out.push_str(m.kind.close_token());
    out
}

/// Inverse of [`wrap_tagged`].
///
/// Error classes: a missing leading `<` or `>`, a leading close tag, or no
/// closing tag at all is `MissingFrame`; a leading tag outside the seven
/// kinds is `UnknownTag`; a closing tag of another kind is `MismatchedTag`;
/// anything after the first matching close tag is `TrailingContent`.
pub fn parse_tagged(s: &str) -> Result<TaggedMarkup, MarkupError> {
    if !s.starts_with('<') {
        return Err(MarkupError::MissingFrame);
    }
    let gt = s.find('>').ok_or(MarkupError::MissingFrame)?;
    let name = &s[1..gt];
    // a close tag where the frame should open
    if name.starts_with('/') {
        return Err(MarkupError::MissingFrame);
    }
    let kind = MarkupKind::from_tag(name).ok_or_else(|| MarkupError::UnknownTag(name.to_string()))?;
    let rest_start = gt + 1;
    let rest = &s[rest_start..];

    match rest.find(kind.close_token()) {
        Some(pos) => {
            let end = pos + kind.close_token().len();
            let body = &rest[..pos];
            // a foreign close tag before ours means the frame was swapped
            if let Some(other) = first_close_token(body) {
                return Err(MarkupError::MismatchedTag {
                    open: kind,
                    close: other,
                });
            }
            if end != rest.len() {
                return Err(MarkupError::TrailingContent(rest_start + end));
            }
            TaggedMarkup::new(kind, body).map_err(|e| match e {
                MarkupError::EmbeddedTag { token, offset } => MarkupError::EmbeddedTag {
                    token,
                    offset: offset + rest_start,
                },
                other => other,
            })
        }
        None => match first_close_token(rest) {
            Some(other) => Err(MarkupError::MismatchedTag {
                open: kind,
                close: other,
            }),
            None => Err(MarkupError::MissingFrame),
        },
    }
}

fn first_close_token(s: &str) -> Option<MarkupKind> {
    TAG_TABLE
        .iter()
        .filter_map(|(k, _, _, close)| s.find(close).map(|p| (p, *k)))
        .min_by_key(|(p, _)| *p)
        .map(|(_, k)| k)
}

const HTML_TAG_NAMES: &[&str] = &[
    "html",
    "head",
    "body",
    "title",
    "meta",
    "link",
    "div",
    "span",
    "p",
    "a",
    "table",
    "thead",
    "tbody",
    "tfoot",
    "tr",
    "td",
    "th",
    "ul",
    "ol",
    "li",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "nav",
    "footer",
    "header",
    "main",
    "section",
    "article",
    "aside",
    "img",
    "br",
    "hr",
    "form",
    "input",
    "button",
    "script",
    "style",
    "pre",
    "code",
    "em",
    "strong",
    "b",
    "i",
    "blockquote",
    "figure",
    "svg",
];

/// Best-guess kind of an unframed body. Total and deterministic.
///
/// Rules in order: a JSON object or array is `json`; a tikzpicture
/// environment is `tikz`; a leading HTML tag (or doctype) is `html`; at least
/// one LaTeX signal per 40 characters is `latex`; Markdown headings, pipe
/// table rows or list items are `md`; grounded `<box>` fragments are
/// `txt_gd`; everything else is `txt`.
pub fn detect_kind(body: &str) -> MarkupKind {
    let trimmed = body.trim();
    if (trimmed.starts_with('{') || trimmed.starts_with('[')) && crate::json::parse(trimmed).is_ok() {
        return MarkupKind::Json;
    }
    if body.contains("\\begin{tikzpicture}") {
        return MarkupKind::Tikz;
    }
    if looks_like_html(trimmed) {
        return MarkupKind::Html;
    }
    let signals = latex_signal_count(body);
    if signals > 0 && signals * 40 >= body.chars().count() {
        return MarkupKind::Latex;
    }
    if body.lines().any(is_markdown_marker_line) {
        return MarkupKind::Md;
    }
    if body.contains("<box>(") {
        return MarkupKind::TxtGd;
    }
    MarkupKind::Txt
}

fn looks_like_html(s: &str) -> bool {
    let Some(rest) = s.strip_prefix('<') else {
        return false;
    };
    if rest.len() >= 8 && rest[..8].eq_ignore_ascii_case("!doctype") {
        return true;
    }
    let name: String = rest
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    HTML_TAG_NAMES.contains(&name.as_str())
}

fn latex_signal_count(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut count = 0;
    let mut dollars = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' if bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphabetic()) => {
                count += 1;
                i += 1;
                while bytes.get(i).is_some_and(|b| b.is_ascii_alphabetic()) {
                    i += 1;
                }
                continue;
            }
            b'^' | b'_' if bytes.get(i + 1) == Some(&b'{') => count += 1,
            b'$' => dollars += 1,
            _ => {}
        }
        i += 1;
    }
    count + dollars / 2
}

fn is_markdown_marker_line(line: &str) -> bool {
    let l = line.trim_start();
    if l.starts_with('#') {
        let hashes = l.chars().take_while(|&c| c == '#').count();
        return hashes <= 6 && l[hashes..].starts_with(' ');
    }
    if l.starts_with('|') && l.trim_end().ends_with('|') && l.trim_end().len() > 1 {
        return true;
    }
    if l.starts_with("- ") || l.starts_with("* ") {
        return true;
    }
    let digits = l.chars().take_while(|c| c.is_ascii_digit()).count();
    digits > 0 && l[digits..].starts_with(". ")
}

/// A box on the 0–1000 normalized grid, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct BBox {
    x1: u16,
    y1: u16,
    x2: u16,
    y2: u16,
}

pub const GRID_MAX: u32 = 1000;

impl BBox {
    pub fn new(x1: u32, y1: u32, x2: u32, y2: u32) -> Result<Self, MarkupError> {
        if x1 > x2 || y1 > y2 || x2 > GRID_MAX || y2 > GRID_MAX {
            return Err(MarkupError::InvalidBox { x1, y1, x2, y2 });
        }
        Ok(BBox {
            x1: x1 as u16,
            y1: y1 as u16,
            x2: x2 as u16,
            y2: y2 as u16,
        })
    }

    pub fn x1(&self) -> u32 {
        self.x1.into()
    }
    pub fn y1(&self) -> u32 {
        self.y1.into()
    }
    pub fn x2(&self) -> u32 {
        self.x2.into()
    }
    pub fn y2(&self) -> u32 {
        self.y2.into()
    }
    pub fn height(&self) -> u32 {
        self.y2() - self.y1()
    }
}

impl TryFrom<[u32; 4]> for BBox {
    type Error = MarkupError;

    fn try_from(v: [u32; 4]) -> Result<Self, Self::Error> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [u32; 4] {
    fn from(b: BBox) -> Self {
        [b.x1(), b.y1(), b.x2(), b.y2()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TextSpan {
    text: String,
    bbox: BBox,
}

impl TextSpan {
    pub fn new(text: impl Into<String>, bbox: BBox) -> Result<Self, MarkupError> {
        let text = text.into();
        if text.is_empty() {
            return Err(MarkupError::EmptySpan);
        }
        if text.contains(['\n', '\r']) {
            return Err(MarkupError::MultilineSpan);
        }
        Ok(TextSpan { text, bbox })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }
}

impl<'de> Deserialize<'de> for TextSpan {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            text: String,
            bbox: BBox,
        }
        let raw = Raw::deserialize(deserializer)?;
        TextSpan::new(raw.text, raw.bbox).map_err(serde::de::Error::custom)
    }
}
