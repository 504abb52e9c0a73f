use alloc::string::String;
use alloc::vec::Vec;

use crate::html::{self, collapse_whitespace, Element, HtmlError, Node};

const SKIPPED: [&str; 4] = ["nav", "footer", "script", "style"];
const HEADINGS: [&str; 6] = ["h1", "h2", "h3", "h4", "h5", "h6"];

/// Extracts the main text of a page: the title (the `title` element, else
/// the first `h1`), then headings and paragraphs in document order, one per
/// line. Content under `nav`, `footer`, `script` and `style` is skipped.
pub fn html_summarize(src: &str) -> Result<String, HtmlError> {
    let nodes = html::parse(src)?;

    let mut titles = Vec::new();
    html::find_all(&nodes, "title", &mut titles);
    let title = titles
        .first()
        .map(|t| collapse_whitespace(&t.text_content()))
        .filter(|t| !t.is_empty());

    let mut blocks: Vec<&Element> = Vec::new();
    collect_blocks(&nodes, &mut blocks);

    let mut lines: Vec<String> = Vec::new();
    let mut skip_first_h1 = false;
    match title {
        Some(t) => lines.push(t),
        None => {
            if let Some(h1) = blocks.iter().find(|e| e.name == "h1") {
                let t = collapse_whitespace(&h1.text_content());
                if !t.is_empty() {
                    lines.push(t);
                    skip_first_h1 = true;
                }
            }
        }
    }
    for e in blocks {
        if skip_first_h1 && e.name == "h1" {
            skip_first_h1 = false;
            continue;
        }
        let t = collapse_whitespace(&e.text_content());
        if !t.is_empty() {
            lines.push(t);
        }
    }
    Ok(lines.join("\n"))
}

/// Outermost headings and paragraphs outside skipped and `head` subtrees.
fn collect_blocks<'a>(nodes: &'a [Node], out: &mut Vec<&'a Element>) {
    for n in nodes {
        let Node::Element(e) = n else { continue };
        let name = e.name.as_str();
        if SKIPPED.contains(&name) || name == "head" || name == "title" {
            continue;
        }
        if name == "p" || HEADINGS.contains(&name) {
            out.push(e);
        } else {
            collect_blocks(&e.children, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            html_summarize("<html><title>T</title><body><p>x</p></body></html>").unwrap(),
            "T\nx"
        );
        assert_eq!(html_summarize("<nav><p>menu</p><h1>Site</h1></nav>").unwrap(), "");
    }

    #[test]
    fn h1_fallback_and_skips() {
        let src = "<body><h1>Main  Title</h1><script>var p = '<p>';</script><div><h2>Part</h2><p>one <b>two</b></p></div><footer><p>c</p></footer><p>&amp; three</p></body>";
        assert_eq!(html_summarize(src).unwrap(), "Main Title\nPart\none two\n& three");
    }

    #[test]
    fn malformed() {
        assert!(html_summarize("<p>open").is_err());
    }
}
