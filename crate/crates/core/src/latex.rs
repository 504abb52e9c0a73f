//! LaTeX lexing and structural balance checks.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token<'a> {
    /// `\name` (letters) or a control symbol such as `\%`; `starred` is set
    /// when a `*` immediately follows a letter command.
    Command {
        name: &'a str,
        starred: bool,
    },
    BeginGroup,
    EndGroup,
    /// A `$…$` span including delimiters; `display` for `$$…$$`.
    Math {
        raw: &'a str,
        display: bool,
    },
    /// Blank line (paragraph break).
    ParBreak,
    Text(&'a str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<'a> {
    pub token: Token<'a>,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unmatched `}}` at byte {0}")]
    UnexpectedCloseBrace(usize),
    #[error("`{{` at byte {0} is never closed")]
    UnclosedBrace(usize),
    #[error("\\end{{{found}}} at byte {offset} closes \\begin{{{expected}}}")]
    EnvMismatch {
        expected: String,
        found: String,
        offset: usize,
    },
    #[error("\\begin{{{name}}} at byte {offset} is never closed")]
    UnclosedEnv { name: String, offset: usize },
    #[error("\\end{{{name}}} at byte {offset} has no matching \\begin")]
    UnexpectedEnd { name: String, offset: usize },
    #[error("unterminated math at byte {0}")]
    UnterminatedMath(usize),
    #[error("environment name at byte {0} is not a braced group")]
    BadEnvName(usize),
}

impl StructureError {
    pub fn code(&self) -> &'static str {
        match self {
            StructureError::UnexpectedCloseBrace(_) | StructureError::UnclosedBrace(_) => "UnbalancedBraces",
            StructureError::EnvMismatch { .. } => "EnvMismatch",
            StructureError::UnclosedEnv { .. } => "UnclosedEnv",
            StructureError::UnexpectedEnd { .. } => "UnexpectedEnd",
            StructureError::UnterminatedMath(_) => "UnterminatedMath",
            StructureError::BadEnvName(_) => "BadEnvName",
        }
    }

    pub fn offset(&self) -> usize {
        match self {
            StructureError::UnexpectedCloseBrace(o)
            | StructureError::UnclosedBrace(o)
            | StructureError::UnterminatedMath(o)
            | StructureError::BadEnvName(o) => *o,
            StructureError::EnvMismatch { offset, .. }
            | StructureError::UnclosedEnv { offset, .. }
            | StructureError::UnexpectedEnd { offset, .. } => *offset,
        }
    }

    pub fn is_brace_error(&self) -> bool {
        self.code() == "UnbalancedBraces"
    }
}

/// Removes `%` comments (up to and including the line break), keeping `\%`.
pub fn strip_comments(src: &str) -> String {
    rewrite_comments(src, false)
}

/// Replaces comment text with spaces so byte offsets are preserved.
pub fn blank_comments(src: &str) -> String {
    rewrite_comments(src, true)
}

fn rewrite_comments(src: &str, keep_offsets: bool) -> String {
    let mut out = String::with_capacity(src.len());
    for line in src.split_inclusive('\n') {
        let bytes = line.as_bytes();
        let mut cut = None;
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' => i += 2,
                b'%' => {
                    cut = Some(i);
                    break;
                }
                _ => i += 1,
            }
        }
        match cut {
            Some(c) if keep_offsets => {
                out.push_str(&line[..c]);
                let body = line[c..].strip_suffix('\n');
                let n = body.map_or(line.len() - c, str::len);
                out.extend(core::iter::repeat_n(' ', n));
                if body.is_some() {
                    out.push('\n');
                }
            }
            Some(c) => out.push_str(&line[..c]),
            None => out.push_str(line),
        }
    }
    out
}

/// Tokenizes comment-free LaTeX source.
pub fn tokenize(src: &str) -> Result<Vec<Spanned<'_>>, StructureError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut text_start = 0;

    macro_rules! flush {
        ($end:expr) => {
            if text_start < $end {
                out.push(Spanned {
                    token: Token::Text(&src[text_start..$end]),
                    offset: text_start,
                });
            }
        };
    }

    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                flush!(i);
                let start = i;
                i += 1;
                let name_start = i;
                if bytes.get(i).is_some_and(|b| b.is_ascii_alphabetic()) {
                    while bytes.get(i).is_some_and(|b| b.is_ascii_alphabetic()) {
                        i += 1;
                    }
                    let name = &src[name_start..i];
                    let starred = bytes.get(i) == Some(&b'*');
                    if starred {
                        i += 1;
                    }
                    out.push(Spanned {
                        token: Token::Command { name, starred },
                        offset: start,
                    });
                } else if let Some(c) = src[i..].chars().next() {
                    i += c.len_utf8();
                    out.push(Spanned {
                        token: Token::Command {
                            name: &src[name_start..i],
                            starred: false,
                        },
                        offset: start,
                    });
                } else {
                    out.push(Spanned {
                        token: Token::Command {
                            name: "",
                            starred: false,
                        },
                        offset: start,
                    });
                }
                text_start = i;
            }
            b'{' | b'}' => {
                flush!(i);
                out.push(Spanned {
                    token: if bytes[i] == b'{' {
                        Token::BeginGroup
                    } else {
                        Token::EndGroup
                    },
                    offset: i,
                });
                i += 1;
                text_start = i;
            }
            b'$' => {
                flush!(i);
                let start = i;
                let display = bytes.get(i + 1) == Some(&b'$');
                let delim = if display { 2 } else { 1 };
                let mut j = i + delim;
                let mut closed = false;
                while j < bytes.len() {
                    match bytes[j] {
                        b'\\' => j += 2,
                        b'$' => {
                            if display {
                                if bytes.get(j + 1) == Some(&b'$') {
                                    j += 2;
                                    closed = true;
                                    break;
                                }
                                return Err(StructureError::UnterminatedMath(start));
                            }
                            j += 1;
                            closed = true;
                            break;
                        }
                        _ => j += 1,
                    }
                }
                if !closed {
                    return Err(StructureError::UnterminatedMath(start));
                }
                out.push(Spanned {
                    token: Token::Math {
                        raw: &src[start..j],
                        display,
                    },
                    offset: start,
                });
                i = j;
                text_start = i;
            }
            b'\n' => {
                // blank line: newline, optional spaces, newline
                let mut j = i + 1;
                while j < bytes.len() && matches!(bytes[j], b' ' | b'\t' | b'\r') {
                    j += 1;
                }
                if bytes.get(j) == Some(&b'\n') {
                    flush!(i);
                    while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                        j += 1;
                    }
                    out.push(Spanned {
                        token: Token::ParBreak,
                        offset: i,
                    });
                    i = j;
                    text_start = i;
                } else {
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }
    flush!(bytes.len());
    Ok(out)
}

/// Reads `{name}` right after a `\begin`/`\end` token at `idx`, returning the
/// name and the index just past the closing brace.
pub fn env_name<'a>(tokens: &[Spanned<'a>], idx: usize) -> Option<(&'a str, usize)> {
    match (tokens.get(idx + 1), tokens.get(idx + 2), tokens.get(idx + 3)) {
        (
            Some(Spanned {
                token: Token::BeginGroup,
                ..
            }),
            Some(Spanned {
                token: Token::Text(name),
                ..
            }),
            Some(Spanned {
                token: Token::EndGroup, ..
            }),
        ) => {
            let name = name.trim();
            if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '*' || c == '-') {
                Some((name, idx + 4))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Checks that braces balance and every `\begin{X}` is closed by `\end{X}`
/// in proper nesting. Comments are ignored; escaped braces do not count.
pub fn check_structure(src: &str) -> Result<(), StructureError> {
    let clean = blank_comments(src);
    let tokens = tokenize(&clean)?;
    // Braces are balanced first so a stray brace is never reported as an
    // environment problem.
    let mut braces: Vec<usize> = Vec::new();
    for t in &tokens {
        match t.token {
            Token::BeginGroup => braces.push(t.offset),
            Token::EndGroup => {
                braces.pop().ok_or(StructureError::UnexpectedCloseBrace(t.offset))?;
            }
            Token::Math { raw, .. } => check_math_braces(raw, t.offset)?,
            _ => {}
        }
    }
    if let Some(open) = braces.pop() {
        return Err(StructureError::UnclosedBrace(open));
    }

    let mut envs: Vec<(&str, usize)> = Vec::new();
    for (idx, t) in tokens.iter().enumerate() {
        if let Token::Command { name, .. } = t.token {
            if name == "begin" || name == "end" {
                let (env, _) = env_name(&tokens, idx).ok_or(StructureError::BadEnvName(t.offset))?;
                if name == "begin" {
                    envs.push((env, t.offset));
                } else {
                    match envs.pop() {
                        None => {
                            return Err(StructureError::UnexpectedEnd {
                                name: env.into(),
                                offset: t.offset,
                            })
                        }
                        Some((open, _)) if open != env => {
                            return Err(StructureError::EnvMismatch {
                                expected: open.into(),
                                found: env.into(),
                                offset: t.offset,
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    if let Some((name, offset)) = envs.pop() {
        return Err(StructureError::UnclosedEnv {
            name: name.into(),
            offset,
        });
    }
    Ok(())
}

fn check_math_braces(raw: &str, base: usize) -> Result<(), StructureError> {
    let bytes = raw.as_bytes();
    let mut open: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 1,
            b'{' => open.push(base + i),
            b'}' => {
                open.pop().ok_or(StructureError::UnexpectedCloseBrace(base + i))?;
            }
            _ => {}
        }
        i += 1;
    }
    match open.pop() {
        Some(o) => Err(StructureError::UnclosedBrace(o)),
        None => Ok(()),
    }
}
