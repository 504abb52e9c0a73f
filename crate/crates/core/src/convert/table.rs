//! HTML table to GitHub-style pipe table.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::html::{self, collapse_whitespace, Element, HtmlError, Node};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("no table with at least one cell")]
    NoTable,
    #[error("unsupported structure at byte {offset}: {what}")]
    UnsupportedSpan { what: &'static str, offset: usize },
    #[error("malformed html: {0}")]
    MalformedHtml(#[from] HtmlError),
}

/// Converts the first table in `src`.
///
/// The first row becomes the header. Cell text has inner tags stripped,
/// whitespace collapsed and `|` escaped as `\|`; short rows are padded with
/// empty cells. `rowspan`/`colspan` above 1 and nested tables are rejected.
pub fn html_table_to_markdown(src: &str) -> Result<String, TableError> {
    let nodes = html::parse(src)?;
    let mut tables = Vec::new();
    html::find_all(&nodes, "table", &mut tables);
    let table = *tables.first().ok_or(TableError::NoTable)?;

    let mut nested = Vec::new();
    html::find_all(&table.children, "table", &mut nested);
    if let Some(inner) = nested.first() {
        return Err(TableError::UnsupportedSpan {
            what: "nested table",
            offset: inner.offset,
        });
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    collect_rows(&table.children, &mut rows)?;
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if width == 0 {
        return Err(TableError::NoTable);
    }

    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        push_row(&mut out, row.iter().map(String::as_str), width);
        if i == 0 {
            out.push('\n');
            push_row(&mut out, core::iter::repeat_n("---", width), width);
        }
    }
    Ok(out)
}

fn push_row<'a>(out: &mut String, cells: impl Iterator<Item = &'a str>, width: usize) {
    out.push('|');
    let mut n = 0;
    for c in cells {
        out.push(' ');
        out.push_str(c);
        out.push_str(" |");
        n += 1;
    }
    for _ in n..width {
        out.push_str("  |");
    }
}

fn collect_rows(nodes: &[Node], rows: &mut Vec<Vec<String>>) -> Result<(), TableError> {
    for n in nodes {
        let Node::Element(e) = n else { continue };
        match e.name.as_str() {
            "tr" => rows.push(row_cells(e)?),
            "thead" | "tbody" | "tfoot" => collect_rows(&e.children, rows)?,
            _ => {}
        }
    }
    Ok(())
}

fn row_cells(tr: &Element) -> Result<Vec<String>, TableError> {
    let mut cells = Vec::new();
    for cell in tr.child_elements().filter(|c| c.name == "td" || c.name == "th") {
        for attr in ["rowspan", "colspan"] {
            if let Some(v) = cell.attr(attr) {
                let span: u32 = v.trim().parse().unwrap_or(1);
                if span > 1 {
                    return Err(TableError::UnsupportedSpan {
                        what: if attr == "rowspan" { "rowspan" } else { "colspan" },
                        offset: cell.offset,
                    });
                }
            }
        }
        cells.push(escape_cell(&collapse_whitespace(&cell.text_content())));
    }
    Ok(cells)
}

fn escape_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            html_table_to_markdown("<table><tr><td>a</td></tr></table>").unwrap(),
            "| a |\n| --- |"
        );
        // expected string written by hand
        assert_eq!(
            html_table_to_markdown("<table><tr><th>x</th><th>y</th></tr><tr><td>1</td><td>2</td></tr></table>")
                .unwrap(),
            "| x | y |\n| --- | --- |\n| 1 | 2 |"
        );
        assert!(matches!(
            html_table_to_markdown("<table><tr><td colspan=\"2\">a</td></tr></table>"),
            Err(TableError::UnsupportedSpan { what: "colspan", .. })
        ));
    }

    #[test]
    fn padding_escaping_and_sections() {
        let src = "<div><table>\n<thead><tr><th>A|B</th><th>C</th></tr></thead>\n<tbody><tr><td><b>x</b>\n y</td></tr>\n<tr><td>&amp;</td><td>2</td></tr></tbody></table></div>";
        assert_eq!(
            html_table_to_markdown(src).unwrap(),
            "| A\\|B | C |\n| --- | --- |\n| x y |  |\n| & | 2 |"
        );
    }

    #[test]
    fn error_cases() {
        assert_eq!(html_table_to_markdown("<p>no</p>"), Err(TableError::NoTable));
        assert_eq!(html_table_to_markdown("<table></table>"), Err(TableError::NoTable));
        assert!(matches!(
            html_table_to_markdown("<table><tr><td>a</tr></table>"),
            Err(TableError::MalformedHtml(_))
        ));
        assert!(matches!(
            html_table_to_markdown("<table><tr><td><table><tr><td>x</td></tr></table></td></tr></table>"),
            Err(TableError::UnsupportedSpan {
                what: "nested table",
                ..
            })
        ));
        assert!(matches!(
            html_table_to_markdown("<table><tr><td rowspan=3>a</td></tr></table>"),
            Err(TableError::UnsupportedSpan { what: "rowspan", .. })
        ));
        assert!(html_table_to_markdown("<table><tr><td colspan=\"1\">a</td></tr></table>").is_ok());
    }
}
