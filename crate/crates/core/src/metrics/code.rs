use alloc::string::String;
use alloc::vec::Vec;

use super::edit::levenshtein;
use crate::latex::strip_comments;
use crate::markup::MarkupKind;

/// Splits code into tokens: numbers (`12`, `0.5`), identifiers, backslash
/// commands (`\draw`, `\\`) and single punctuation characters. Whitespace
/// only separates. `%` comments are dropped for LaTeX and TikZ.
pub fn code_tokens(src: &str, kind: Option<MarkupKind>) -> Vec<String> {
    let stripped;
    let src = match kind {
        Some(MarkupKind::Latex | MarkupKind::Tikz) => {
            stripped = strip_comments(src);
            stripped.as_str()
        }
        _ => src,
    };
    tokenize(src).into_iter().map(String::from).collect()
}

fn tokenize(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        let mut end = start + c.len_utf8();
        if c == '\\' {
            match chars.peek() {
                Some(&(_, n)) if n.is_ascii_alphabetic() => {
                    while let Some(&(i, n)) = chars.peek() {
                        if !n.is_ascii_alphabetic() {
                            break;
                        }
                        end = i + n.len_utf8();
                        chars.next();
                    }
                }
                Some(&(i, n)) if !n.is_whitespace() => {
                    end = i + n.len_utf8();
                    chars.next();
                }
                _ => {}
            }
        } else if c.is_ascii_digit() {
            let mut seen_dot = false;
            while let Some(&(i, n)) = chars.peek() {
                let is_frac_dot = n == '.' && !seen_dot && src[i + 1..].starts_with(|d: char| d.is_ascii_digit());
                if !(n.is_ascii_digit() || is_frac_dot) {
                    break;
                }
                seen_dot |= n == '.';
                end = i + 1;
                chars.next();
            }
        } else if c.is_alphabetic() || c == '_' {
            while let Some(&(i, n)) = chars.peek() {
                if !(n.is_alphanumeric() || n == '_') {
                    break;
                }
                end = i + n.len_utf8();
                chars.next();
            }
        }
        out.push(&src[start..end]);
    }
    out
}

/// One minus the token-level normalized edit distance; 1 when both sides
/// have no tokens.
pub fn code_similarity(pred: &str, gold: &str, kind: Option<MarkupKind>) -> f64 {
    let a = code_tokens(pred, kind);
    let b = code_tokens(gold, kind);
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens() {
        assert_eq!(
            code_tokens("\\draw[thick] (0,1.5) -- (x_1,2);", None),
            ["\\draw", "[", "thick", "]", "(", "0", ",", "1.5", ")", "-", "-", "(", "x_1", ",", "2", ")", ";"]
        );
        assert_eq!(code_tokens("a \\\\ b % c", Some(MarkupKind::Latex)), ["a", "\\\\", "b"]);
        assert_eq!(code_tokens("1. x", None), ["1", ".", "x"]);
    }

    #[test]
    fn examples() {
        let code = "\\begin{tikzpicture}\\draw (0,0) -- (1,1);\\end{tikzpicture}";
        assert_eq!(code_similarity(code, code, Some(MarkupKind::Tikz)), 1.0);
        assert_eq!(code_similarity("a b c", "x y z", None), 0.0);
        assert_eq!(code_similarity("", "", None), 1.0);
        // comments do not count
        assert_eq!(code_similarity("x % one", "x % two", Some(MarkupKind::Tikz)), 1.0);
    }
}
