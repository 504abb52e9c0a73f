//! LaTeX fragments to Markdown over a small supported subset.
//!
//! Supported: `\section`, `\subsection`, `\subsubsection` (starred or not),
//! `\textbf`, `\textit`, `\emph`, `itemize`/`enumerate` lists with `\item`,
//! inline `$…$` math (verbatim), braces as plain groups, `~`, and the
//! escaped specials `\% \& \_ \# \$ \{ \}`. Anything else makes the whole
//! input [`LatexConversion::Unconvertible`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::latex::{check_structure, env_name, strip_comments, tokenize, Spanned, StructureError, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatexConversion {
    Markdown(String),
    /// The input uses a construct outside the supported subset.
    Unconvertible {
        construct: String,
        offset: usize,
    },
}

impl LatexConversion {
    pub fn markdown(&self) -> Option<&str> {
        match self {
            LatexConversion::Markdown(s) => Some(s),
            LatexConversion::Unconvertible { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatexError {
    #[error("unbalanced braces at byte {0}")]
    UnbalancedBraces(usize),
    #[error("broken structure: {0}")]
    Malformed(StructureError),
}

/// Commands consumed by the converter; none of them may survive into output.
const SUPPORTED: [&str; 9] = [
    "section",
    "subsection",
    "subsubsection",
    "textbf",
    "textit",
    "emph",
    "item",
    "begin",
    "end",
];

pub fn latex_to_markdown(src: &str) -> Result<LatexConversion, LatexError> {
    check_structure(src).map_err(|e| {
        if e.is_brace_error() {
            LatexError::UnbalancedBraces(e.offset())
        } else {
            LatexError::Malformed(e)
        }
    })?;
    let clean = strip_comments(src);
    let tokens = tokenize(&clean).map_err(LatexError::Malformed)?;
    let mut conv = Converter {
        tokens: &tokens,
        pos: 0,
    };
    match conv.blocks(BlockEnd::Eof) {
        Ok(blocks) => Ok(LatexConversion::Markdown(render_blocks(&blocks))),
        Err(Unsupported { construct, offset }) => Ok(LatexConversion::Unconvertible { construct, offset }),
    }
}

#[derive(Debug)]
enum Block {
    Heading(usize, String),
    Paragraph(String),
    List { ordered: bool, items: Vec<Vec<Block>> },
}

struct Unsupported {
    construct: String,
    offset: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum BlockEnd {
    Eof,
    /// Stop before `\item` or `\end{…}` of the enclosing list.
    ListItem,
}

struct Converter<'t, 'a> {
    tokens: &'t [Spanned<'a>],
    pos: usize,
}

fn unsupported<T>(construct: impl Into<String>, offset: usize) -> Result<T, Unsupported> {
    Err(Unsupported {
        construct: construct.into(),
        offset,
    })
}

impl Converter<'_, '_> {
    fn blocks(&mut self, end: BlockEnd) -> Result<Vec<Block>, Unsupported> {
        let mut blocks = Vec::new();
        let mut para = Inline::default();
        while let Some(t) = self.tokens.get(self.pos) {
            match t.token {
                Token::ParBreak => {
                    para.flush_into(&mut blocks);
                    self.pos += 1;
                }
                Token::Command { name, .. } if heading_level(name).is_some() => {
                    para.flush_into(&mut blocks);
                    self.pos += 1;
                    let text = self.argument(name, t.offset)?;
                    blocks.push(Block::Heading(heading_level(name).unwrap_or(1), text));
                }
                Token::Command { name: "begin", .. } => {
                    let (env, next) = env_name(self.tokens, self.pos).unwrap_or(("", self.pos + 1));
                    let ordered = match env {
                        "itemize" => false,
                        "enumerate" => true,
                        other => return unsupported(format!("environment {}", other), t.offset),
                    };
                    para.flush_into(&mut blocks);
                    self.pos = next;
                    let items = self.list_items(env)?;
                    blocks.push(Block::List { ordered, items });
                }
                Token::Command {
                    name: "item" | "end", ..
                } if end == BlockEnd::ListItem => break,
                Token::Command { name: "item", .. } => return unsupported("\\item outside a list", t.offset),
                _ => self.inline_token(&mut para)?,
            }
        }
        para.flush_into(&mut blocks);
        Ok(blocks)
    }

    fn list_items(&mut self, env: &str) -> Result<Vec<Vec<Block>>, Unsupported> {
        let mut items = Vec::new();
        loop {
            let Some(t) = self.tokens.get(self.pos) else {
                return unsupported(format!("unterminated {}", env), 0);
            };
            match t.token {
                Token::Text(s) if s.trim().is_empty() => self.pos += 1,
                Token::ParBreak => self.pos += 1,
                Token::Command { name: "item", .. } => {
                    self.pos += 1;
                    if let Some(Spanned {
                        token: Token::Text(s),
                        offset,
                    }) = self.tokens.get(self.pos)
                    {
                        if s.trim_start().starts_with('[') {
                            return unsupported("\\item label", *offset);
                        }
                    }
                    items.push(self.blocks(BlockEnd::ListItem)?);
                }
                Token::Command { name: "end", .. } => {
                    let (_, next) = env_name(self.tokens, self.pos).unwrap_or(("", self.pos + 1));
                    self.pos = next;
                    return Ok(items);
                }
                _ => return unsupported(format!("content before first \\item in {}", env), t.offset),
            }
        }
    }

    /// Reads a mandatory `{…}` argument as inline text.
    fn argument(&mut self, command: &str, offset: usize) -> Result<String, Unsupported> {
        while let Some(Spanned {
            token: Token::Text(s), ..
        }) = self.tokens.get(self.pos)
        {
            if !s.trim().is_empty() {
                break;
            }
            self.pos += 1;
        }
        match self.tokens.get(self.pos) {
            Some(Spanned {
                token: Token::BeginGroup,
                ..
            }) => {
                self.pos += 1;
                let mut inner = Inline::default();
                self.group_body(&mut inner)?;
                Ok(inner.finish())
            }
            _ => unsupported(format!("\\{} without a braced argument", command), offset),
        }
    }

    /// Consumes inline tokens up to and including the matching `}`.
    fn group_body(&mut self, out: &mut Inline) -> Result<(), Unsupported> {
        while let Some(t) = self.tokens.get(self.pos) {
            match t.token {
                Token::EndGroup => {
                    self.pos += 1;
                    return Ok(());
                }
                Token::ParBreak => return unsupported("paragraph break inside a group", t.offset),
                _ => self.inline_token(out)?,
            }
        }
        unsupported("unterminated group", 0)
    }

    fn inline_token(&mut self, out: &mut Inline) -> Result<(), Unsupported> {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        match t.token {
            Token::Text(s) => out.text(&s.replace('~', " ")),
            Token::Math { display: true, .. } => return unsupported("display math", t.offset),
            Token::Math { raw, display: false } => {
                if let Some(cmd) = supported_command_in(raw) {
                    return unsupported(format!("\\{} inside math", cmd), t.offset);
                }
                out.verbatim(raw);
            }
            Token::BeginGroup => self.group_body(out)?,
            Token::EndGroup => return unsupported("unmatched }", t.offset),
            Token::ParBreak => out.text(" "),
            Token::Command { name, .. } => match name {
                "textbf" => {
                    let inner = self.argument(name, t.offset)?;
                    out.verbatim(&format!("**{}**", inner));
                }
                "textit" | "emph" => {
                    let inner = self.argument(name, t.offset)?;
                    out.verbatim(&format!("*{}*", inner));
                }
                "%" | "&" | "{" | "}" => out.verbatim(name),
                "_" | "#" | "$" => out.verbatim(&format!("\\{}", name)),
                " " => out.text(" "),
                other => return unsupported(format!("\\{}", other), t.offset),
            },
        }
        Ok(())
    }
}

fn heading_level(name: &str) -> Option<usize> {
    match name {
        "section" => Some(1),
        "subsection" => Some(2),
        "subsubsection" => Some(3),
        _ => None,
    }
}

fn supported_command_in(math: &str) -> Option<&'static str> {
    let bytes = math.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            let start = i + 1;
            let mut j = start;
            while j < bytes.len() && bytes[j].is_ascii_alphabetic() {
                j += 1;
            }
            if let Some(cmd) = SUPPORTED.iter().find(|c| **c == &math[start..j]) {
                return Some(cmd);
            }
            i = j.max(start + 1);
        } else {
            i += 1;
        }
    }
    None
}

/// Inline text builder: whitespace in plain text collapses to single spaces,
/// verbatim pieces are kept as-is.
#[derive(Default)]
struct Inline {
    buf: String,
}

impl Inline {
    fn text(&mut self, s: &str) {
        for c in s.chars() {
            if c.is_whitespace() {
                if !self.buf.is_empty() && !self.buf.ends_with(' ') {
                    self.buf.push(' ');
                }
            } else {
                self.buf.push(c);
            }
        }
    }

    fn verbatim(&mut self, s: &str) {
        self.buf.push_str(s);
    }

    fn finish(&mut self) -> String {
        let s = self.buf.trim().to_string();
        self.buf.clear();
        s
    }

    fn flush_into(&mut self, blocks: &mut Vec<Block>) {
        let s = self.finish();
        if !s.is_empty() {
            blocks.push(Block::Paragraph(s));
        }
    }
}

fn render_blocks(blocks: &[Block]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for b in blocks {
        match b {
            Block::Heading(level, text) => {
                let mut s = String::new();
                for _ in 0..*level {
                    s.push('#');
                }
                s.push(' ');
                s.push_str(text);
                parts.push(s);
            }
            Block::Paragraph(p) => parts.push(p.clone()),
            Block::List { ordered, items } => {
                let mut lines = Vec::new();
                render_list(*ordered, items, 0, &mut lines);
                parts.push(lines.join("\n"));
            }
        }
    }
    parts.join("\n\n")
}

fn render_list(ordered: bool, items: &[Vec<Block>], indent: usize, lines: &mut Vec<String>) {
    let pad: String = core::iter::repeat_n(' ', indent).collect();
    for (i, item) in items.iter().enumerate() {
        let marker = if ordered {
            format!("{}. ", i + 1)
        } else {
            String::from("- ")
        };
        let mut first = Vec::new();
        let mut nested = Vec::new();
        for b in item {
            match b {
                Block::Paragraph(p) => first.push(p.clone()),
                // headings cannot occur inside items: `\section` in an item
                // renders as its text
                Block::Heading(_, t) => first.push(t.clone()),
                Block::List { ordered, items } => nested.push((*ordered, items)),
            }
        }
        let mut line = format!("{}{}{}", pad, marker, first.join(" "));
        while line.ends_with(' ') {
            line.pop();
        }
        lines.push(line);
        for (o, sub) in nested {
            render_list(o, sub, indent + marker.len(), lines);
        }
    }
}
