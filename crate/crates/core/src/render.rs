//! Canonical TXT output. The layout is the contract documented in FORMAT.md:
//! a heading at depth `d` is indented `2 * (d - 1)` spaces and its content
//! lines `2 * d` spaces; comments come first, then options, then the
//! connection line.

use std::fmt::Write;

use crate::model::{Connective, Paragraph, Policy};

pub fn render_policy(policy: &Policy) -> String {
    let mut out = String::new();
    for root in &policy.roots {
        render_paragraph(root, &mut out);
    }
    out
}

fn render_paragraph(p: &Paragraph, out: &mut String) {
    let heading_indent = "  ".repeat(p.depth() - 1);
    let body_indent = "  ".repeat(p.depth());

    write!(out, "{heading_indent}{} {}", p.path, p.title).unwrap();
    if p.weight != 1 {
        write!(out, " {}", p.weight).unwrap();
    }
    out.push('\n');

    for c in &p.comments {
        writeln!(out, "{body_indent}{c}").unwrap();
    }

    let labels = synthesize_labels(p);
    for (option, label) in p.options.iter().zip(labels) {
        out.push_str(&body_indent);
        if let Some(l) = label {
            write!(out, "{l}) ").unwrap();
        }
        if let Some(k) = option.keyword {
            write!(out, "{k} ").unwrap();
        }
        out.push_str(option.phrase());
        out.push('\n');
    }

    match p.connective {
        Connective::And | Connective::Or => {
            writeln!(out, "{body_indent}Connection {}", p.connective.as_str()).unwrap()
        }
        Connective::None => {}
    }

    for child in &p.children {
        render_paragraph(child, out);
    }
}

/// Existing labels are kept; missing ones get the first letters not already
/// used in the paragraph. Past 26 options a line may stay unlabeled.
fn synthesize_labels(p: &Paragraph) -> Vec<Option<char>> {
    let mut used: Vec<char> = p.options.iter().filter_map(|o| o.label).collect();
    let mut free = ('a'..='z')
        .filter(|c| !used.contains(c))
        .collect::<Vec<_>>()
        .into_iter();
    p.options
        .iter()
        .map(|o| {
            o.label.or_else(|| {
                let l = free.next();
                used.extend(l);
                l
            })
        })
        .collect()
}
