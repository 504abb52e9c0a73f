//! Strict HTML element-tree builder.
//!
//! Tags must balance into a tree. Void elements (`br`, `img`, …) and
//! self-closed tags (`<x/>`) need no end tag. Comments, doctypes and
//! processing instructions are dropped. `script`/`style` bodies are raw text.
//! This is not an HTML5 parser: optional end tags are not inferred.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

pub const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    /// Byte offset of the start tag.
    pub offset: usize,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    /// Concatenated text of all descendants.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        collect_text(&self.children, &mut out);
        out
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }
}

fn collect_text(nodes: &[Node], out: &mut String) {
    for n in nodes {
        match n {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => collect_text(&e.children, out),
        }
    }
}

/// Depth-first pre-order search over `nodes` for elements named `name`.
pub fn find_all<'a>(nodes: &'a [Node], name: &str, out: &mut Vec<&'a Element>) {
    for n in nodes {
        if let Node::Element(e) = n {
            if e.name == name {
                out.push(e);
            }
            find_all(&e.children, name, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HtmlError {
    #[error("unterminated tag at byte {0}")]
    UnterminatedTag(usize),
    #[error("unterminated comment at byte {0}")]
    UnterminatedComment(usize),
    #[error("end tag </{name}> at byte {offset} has no open element")]
    UnexpectedEndTag { name: String, offset: usize },
    #[error("end tag </{found}> at byte {offset} closes <{expected}>")]
    MismatchedEndTag {
        expected: String,
        found: String,
        offset: usize,
    },
    #[error("<{name}> opened at byte {offset} is never closed")]
    UnclosedElement { name: String, offset: usize },
    #[error("malformed tag at byte {0}")]
    BadTag(usize),
}

impl HtmlError {
    pub fn offset(&self) -> usize {
        match self {
            HtmlError::UnterminatedTag(o) | HtmlError::UnterminatedComment(o) | HtmlError::BadTag(o) => *o,
            HtmlError::UnexpectedEndTag { offset, .. }
            | HtmlError::MismatchedEndTag { offset, .. }
            | HtmlError::UnclosedElement { offset, .. } => *offset,
        }
    }
}

/// Parses a fragment or document into its top-level nodes.
pub fn parse(src: &str) -> Result<Vec<Node>, HtmlError> {
    let mut stack: Vec<Element> = Vec::new();
    let mut roots: Vec<Node> = Vec::new();
    let bytes = src.as_bytes();
    let mut pos = 0;

    fn push_node(stack: &mut [Element], roots: &mut Vec<Node>, node: Node) {
        match stack.last_mut() {
            Some(top) => top.children.push(node),
            None => roots.push(node),
        }
    }

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            let end = src[pos..].find('<').map_or(src.len(), |i| pos + i);
            push_node(&mut stack, &mut roots, Node::Text(decode_entities(&src[pos..end])));
            pos = end;
            continue;
        }
        let rest = &src[pos..];
        if let Some(comment) = rest.strip_prefix("<!--") {
            let end = comment.find("-->").ok_or(HtmlError::UnterminatedComment(pos))?;
            pos += 4 + end + 3;
            continue;
        }
        if rest.starts_with("<!") || rest.starts_with("<?") {
            let end = rest.find('>').ok_or(HtmlError::UnterminatedTag(pos))?;
            pos += end + 1;
            continue;
        }
        if let Some(after) = rest.strip_prefix("</") {
            let end = after.find('>').ok_or(HtmlError::UnterminatedTag(pos))?;
            let name = after[..end].trim().to_ascii_lowercase();
            if name.is_empty() || !name.bytes().all(is_name_byte) {
                return Err(HtmlError::BadTag(pos));
            }
            let offset = pos;
            pos += 2 + end + 1;
            if VOID_ELEMENTS.contains(&name.as_str()) {
                continue;
            }
            let open = stack.pop().ok_or(HtmlError::UnexpectedEndTag {
                name: name.clone(),
                offset,
            })?;
            if open.name != name {
                return Err(HtmlError::MismatchedEndTag {
                    expected: open.name,
                    found: name,
                    offset,
                });
            }
            push_node(&mut stack, &mut roots, Node::Element(open));
            continue;
        }
        // a bare '<' not followed by a name is text
        if !bytes.get(pos + 1).is_some_and(|b| b.is_ascii_alphabetic()) {
            push_node(&mut stack, &mut roots, Node::Text("<".to_string()));
            pos += 1;
            continue;
        }
        let (tag, consumed) = parse_start_tag(src, pos)?;
        pos += consumed;
        let StartTag {
            name,
            attrs,
            self_closing,
        } = tag;
        let offset = pos - consumed;
        let is_void = VOID_ELEMENTS.contains(&name.as_str());
        if name == "script" || name == "style" {
            let close = alloc::format!("</{}", name);
            let lower = src[pos..].to_ascii_lowercase();
            let end = lower.find(&close).ok_or(HtmlError::UnclosedElement {
                name: name.clone(),
                offset,
            })?;
            let raw = src[pos..pos + end].to_string();
            let gt = src[pos + end..]
                .find('>')
                .ok_or(HtmlError::UnterminatedTag(pos + end))?;
            pos += end + gt + 1;
            let children = if raw.is_empty() {
                Vec::new()
            } else {
                alloc::vec![Node::Text(raw)]
            };
            push_node(
                &mut stack,
                &mut roots,
                Node::Element(Element {
                    name,
                    attrs,
                    children,
                    offset,
                }),
            );
            continue;
        }
        let el = Element {
            name,
            attrs,
            children: Vec::new(),
            offset,
        };
        if is_void || self_closing {
            push_node(&mut stack, &mut roots, Node::Element(el));
        } else {
            stack.push(el);
        }
    }
    if let Some(open) = stack.pop() {
        return Err(HtmlError::UnclosedElement {
            name: open.name,
            offset: open.offset,
        });
    }
    Ok(roots)
}

struct StartTag {
    name: String,
    attrs: Vec<(String, String)>,
    self_closing: bool,
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b':'
}

fn parse_start_tag(src: &str, start: usize) -> Result<(StartTag, usize), HtmlError> {
    let bytes = src.as_bytes();
    let mut i = start + 1;
    let name_start = i;
    while i < bytes.len() && is_name_byte(bytes[i]) {
        i += 1;
    }
    let name = src[name_start..i].to_ascii_lowercase();
    let mut attrs = Vec::new();
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        match bytes.get(i) {
            None => return Err(HtmlError::UnterminatedTag(start)),
            Some(b'>') => {
                return Ok((
                    StartTag {
                        name,
                        attrs,
                        self_closing: false,
                    },
                    i + 1 - start,
                ))
            }
            Some(b'/') => {
                if bytes.get(i + 1) == Some(&b'>') {
                    return Ok((
                        StartTag {
                            name,
                            attrs,
                            self_closing: true,
                        },
                        i + 2 - start,
                    ));
                }
                return Err(HtmlError::BadTag(i));
            }
            Some(b'<') => return Err(HtmlError::UnterminatedTag(start)),
            Some(_) => {}
        }
        let an_start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'=' | b'>' | b'/' | b'<') {
            i += 1;
        }
        if i == an_start {
            return Err(HtmlError::BadTag(i));
        }
        let attr_name = src[an_start..i].to_ascii_lowercase();
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if bytes.get(i) == Some(&b'=') {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            match bytes.get(i) {
                Some(&q @ (b'"' | b'\'')) => {
                    let close = src[i + 1..].find(q as char).ok_or(HtmlError::UnterminatedTag(start))?;
                    value = decode_entities(&src[i + 1..i + 1 + close]);
                    i += close + 2;
                }
                Some(_) => {
                    let v_start = i;
                    while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                        i += 1;
                    }
                    value = decode_entities(&src[v_start..i]);
                }
                None => return Err(HtmlError::UnterminatedTag(start)),
            }
        }
        attrs.push((attr_name, value));
    }
}

/// Decodes the five XML entities, `&nbsp;` (as a plain space) and numeric
/// character references. Unknown entities are kept verbatim.
pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let ent = &rest[1..semi];
            let c = match ent {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ => {
                    let code = if let Some(hex) = ent.strip_prefix("#x").or_else(|| ent.strip_prefix("#X")) {
                        u32::from_str_radix(hex, 16).ok()
                    } else if let Some(dec) = ent.strip_prefix('#') {
                        dec.parse().ok()
                    } else {
                        None
                    };
                    code.and_then(char::from_u32)
                }
            };
            c.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Escapes text for element content.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

/// Collapses whitespace runs to single spaces and trims.
pub fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
