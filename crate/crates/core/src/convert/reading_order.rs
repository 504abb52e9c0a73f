//! Reading order for OCR spans: left to right, top to bottom.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use crate::markup::{BBox, MarkupError, MarkupKind, TaggedMarkup, TextSpan};

/// Two spans share a line iff their vertical overlap is non-negative and at
/// least half the height of the shorter one.
fn same_line(a: &BBox, b: &BBox) -> bool {
    let overlap = a.y2().min(b.y2()) as i64 - a.y1().max(b.y1()) as i64;
    if overlap < 0 {
        return false;
    }
    let shorter = a.height().min(b.height()) as i64;
    2 * overlap >= shorter
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups spans into ordered lines.
///
/// Lines are the connected components of the same-line relation, so the
/// grouping does not depend on input order. Lines are sorted by top edge,
/// spans within a line by left edge; remaining ties fall back to the full
/// box and then the text.
pub fn group_lines(spans: &[TextSpan]) -> Vec<Vec<&TextSpan>> {
    let n = spans.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if same_line(&spans[i].bbox(), &spans[j].bbox()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<&TextSpan>)> = Vec::new();
    for (i, span) in spans.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(span),
            None => groups.push((root, alloc::vec![span])),
        }
    }
    let mut lines: Vec<Vec<&TextSpan>> = groups
        .into_iter()
        .map(|(_, mut members)| {
            members.sort_by(|a, b| {
                let (ba, bb) = (a.bbox(), b.bbox());
                (ba.x1(), ba.y1(), ba.x2(), ba.y2(), a.text()).cmp(&(bb.x1(), bb.y1(), bb.x2(), bb.y2(), b.text()))
            });
            members
        })
        .collect();
    lines.sort_by_key(|line| {
        let top = line.iter().map(|s| s.bbox().y1()).min().unwrap_or(0);
        // first member is the leftmost, with full tie-breaking already applied
        let first = line[0];
        let b = first.bbox();
        (top, b.x1(), b.y1(), b.x2(), b.y2(), String::from(first.text()))
    });
    lines
}

/// Plain text in reading order: spans joined by single spaces, lines by
/// newlines.
pub fn order_text_spans(spans: &[TextSpan]) -> String {
    render(spans, |out, span| out.push_str(span.text()))
}

fn render(spans: &[TextSpan], mut emit: impl FnMut(&mut String, &TextSpan)) -> String {
    let mut out = String::new();
    for (li, line) in group_lines(spans).iter().enumerate() {
        if li > 0 {
            out.push('\n');
        }
        for (si, span) in line.iter().enumerate() {
            if si > 0 {
                out.push(' ');
            }
            emit(&mut out, span);
        }
    }
    out
}

/// Grounded text: each span as `text<box>(x1,y1),(x2,y2)</box>`, in reading
/// order. Fails only if a span's text contains a framing token.
pub fn spans_to_grounded_text(spans: &[TextSpan]) -> Result<TaggedMarkup, MarkupError> {
    let body = render(spans, |out, span| {
        let b = span.bbox();
        let _ = write!(
            out,
            "{}<box>({},{}),({},{})</box>",
            span.text(),
            b.x1(),
            b.y1(),
            b.x2(),
            b.y2()
        );
    });
    TaggedMarkup::new(MarkupKind::TxtGd, body)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundedTextError {
    #[error("malformed box at byte {0}")]
    MalformedBox(usize),
    #[error("box at byte {0} is outside the grid or inverted")]
    BoxOutOfRange(usize),
    #[error("box at byte {0} has no text before it")]
    MissingText(usize),
    #[error("stray </box> at byte {0}")]
    StrayClose(usize),
}

impl GroundedTextError {
    pub fn offset(&self) -> usize {
        match self {
            GroundedTextError::MalformedBox(o)
            | GroundedTextError::BoxOutOfRange(o)
            | GroundedTextError::MissingText(o)
            | GroundedTextError::StrayClose(o) => *o,
        }
    }
}

/// Parses grounded text back into lines of spans.
pub fn parse_grounded_text(body: &str) -> Result<Vec<Vec<TextSpan>>, GroundedTextError> {
    let mut lines = Vec::new();
    let mut line_start = 0;
    for line in body.split('\n') {
        lines.push(parse_grounded_line(line, line_start)?);
        line_start += line.len() + 1;
    }
    if body.is_empty() {
        lines.clear();
    }
    Ok(lines)
}

fn parse_grounded_line(line: &str, base: usize) -> Result<Vec<TextSpan>, GroundedTextError> {
    let mut spans = Vec::new();
    let mut rest = line;
    let mut pos = base;
    while !rest.is_empty() {
        let Some(open) = rest.find("<box>") else {
            if let Some(c) = rest.find("</box>") {
                return Err(GroundedTextError::StrayClose(pos + c));
            }
            // trailing text without a box is not part of the grammar
            return Err(GroundedTextError::MalformedBox(pos));
        };
        if let Some(c) = rest[..open].find("</box>") {
            return Err(GroundedTextError::StrayClose(pos + c));
        }
        let text = rest[..open]
            .strip_prefix(' ')
            .filter(|_| !spans.is_empty())
            .unwrap_or(&rest[..open]);
        if text.is_empty() {
            return Err(GroundedTextError::MissingText(pos + open));
        }
        let after = &rest[open + 5..];
        let close = after
            .find("</box>")
            .ok_or(GroundedTextError::MalformedBox(pos + open))?;
        let coords = parse_coords(&after[..close]).ok_or(GroundedTextError::MalformedBox(pos + open))?;
        let bbox = BBox::new(coords[0], coords[1], coords[2], coords[3])
            .map_err(|_| GroundedTextError::BoxOutOfRange(pos + open))?;
        let span = TextSpan::new(text, bbox).map_err(|_| GroundedTextError::MissingText(pos + open))?;
        spans.push(span);
        let consumed = open + 5 + close + 6;
        rest = &rest[consumed..];
        pos += consumed;
    }
    Ok(spans)
}

/// `(x1,y1),(x2,y2)` with unsigned integers and no spaces.
fn parse_coords(s: &str) -> Option<[u32; 4]> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once("),(")?;
    let (x1, y1) = a.split_once(',')?;
    let (x2, y2) = b.split_once(',')?;
    let num = |t: &str| -> Option<u32> {
        if t.is_empty() || t.len() > 4 || !t.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    Some([num(x1)?, num(y1)?, num(x2)?, num(y2)?])
}
