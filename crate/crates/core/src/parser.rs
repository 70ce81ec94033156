//! Line-oriented parser for the standardized certificate policy TXT format.
//!
//! Structure is carried by section numbers, not indentation. Every line is
//! classified as exactly one of: blank, comment (`//`), connection line,
//! section heading, or option. See `FORMAT.md` for the grammar.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Connective, Keyword, NumberPath, Paragraph, Policy, PolicyOption};

/// Deepest numbering level the comparison method is defined for.
pub const MAX_SUPPORTED_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    DepthExceeds4,
    DuplicateSection,
    OrphanSection,
    OutOfOrderSection,
    BadSectionNumber,
    MissingTitle,
    BadWeight,
    TitleNotUppercase,
    BadConnective,
    DuplicateConnection,
    ContentBeforeSection,
    CommentBeforeSection,
    BadOptionLabel,
    DuplicateOptionLabel,
    MissingPhrase,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::DepthExceeds4 => "DEPTH_EXCEEDS_4",
            DiagnosticCode::DuplicateSection => "DUPLICATE_SECTION",
            DiagnosticCode::OrphanSection => "ORPHAN_SECTION",
            DiagnosticCode::OutOfOrderSection => "OUT_OF_ORDER_SECTION",
            DiagnosticCode::BadSectionNumber => "BAD_SECTION_NUMBER",
            DiagnosticCode::MissingTitle => "MISSING_TITLE",
            DiagnosticCode::BadWeight => "BAD_WEIGHT",
            DiagnosticCode::TitleNotUppercase => "TITLE_NOT_UPPERCASE",
            DiagnosticCode::BadConnective => "BAD_CONNECTIVE",
            DiagnosticCode::DuplicateConnection => "DUPLICATE_CONNECTION",
            DiagnosticCode::ContentBeforeSection => "CONTENT_BEFORE_SECTION",
            DiagnosticCode::CommentBeforeSection => "COMMENT_BEFORE_SECTION",
            DiagnosticCode::BadOptionLabel => "BAD_OPTION_LABEL",
            DiagnosticCode::DuplicateOptionLabel => "DUPLICATE_OPTION_LABEL",
            DiagnosticCode::MissingPhrase => "MISSING_PHRASE",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::DepthExceeds4
            | DiagnosticCode::TitleNotUppercase
            | DiagnosticCode::DuplicateConnection
            | DiagnosticCode::CommentBeforeSection => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    /// 1-based input line.
    pub line_number: usize,
    pub severity: Severity,
    pub message: String,
    pub code: DiagnosticCode,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(
            f,
            "line {}: {level}[{}]: {}",
            self.line_number, self.code, self.message
        )
    }
}

/// Returned when at least one ERROR diagnostic was produced. Carries every
/// diagnostic (warnings included) in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("policy {name:?} failed to parse with {} error(s)", self.errors().count())]
pub struct ParseError {
    pub name: String,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseError {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub policy: Policy,
    pub diagnostics: Vec<ParseDiagnostic>,
}

/// Parses standardized CP text. LF and CRLF line endings are both accepted.
pub fn parse_policy(source: &str, name: &str) -> Result<Parsed, ParseError> {
    let mut parser = Parser::new(name);
    for (index, raw) in source.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        parser.line(index + 1, line);
    }
    parser.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    /// No heading seen yet.
    Start,
    /// The open paragraph on top of the stack receives content.
    Open,
    /// The last heading was rejected; swallow its content silently.
    Discarded,
}

struct Parser {
    name: String,
    roots: Vec<Paragraph>,
    /// Chain of open paragraphs, outermost first.
    stack: Vec<Paragraph>,
    seen: HashSet<NumberPath>,
    target: Target,
    connection_set: bool,
    diagnostics: Vec<ParseDiagnostic>,
    reported: HashSet<(usize, DiagnosticCode)>,
}

impl Parser {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            roots: Vec::new(),
            stack: Vec::new(),
            seen: HashSet::new(),
            target: Target::Start,
            connection_set: false,
            diagnostics: Vec::new(),
            reported: HashSet::new(),
        }
    }

    fn report(&mut self, line_number: usize, code: DiagnosticCode, message: impl Into<String>) {
        if self.reported.insert((line_number, code)) {
            self.diagnostics.push(ParseDiagnostic {
                line_number,
                severity: code.severity(),
                message: message.into(),
                code,
            });
        }
    }

    fn line(&mut self, n: usize, raw: &str) {
        let line = raw.trim();
        if line.is_empty() {
            return;
        }
        if line.starts_with("//") {
            self.comment(n, line);
            return;
        }
        let first = line.split_whitespace().next().unwrap_or_default();
        if first.eq_ignore_ascii_case("connection") {
            self.connection(n, line);
        } else if looks_like_section_number(first) {
            self.heading(n, line, first);
        } else {
            self.option(n, line);
        }
    }

    fn comment(&mut self, n: usize, line: &str) {
        match self.target {
            Target::Open => {
                let top = self.stack.last_mut().expect("open paragraph");
                top.comments.push(line.to_string());
            }
            Target::Discarded => {}
            Target::Start => self.report(
                n,
                DiagnosticCode::CommentBeforeSection,
                "comment before the first section heading is dropped",
            ),
        }
    }

    fn connection(&mut self, n: usize, line: &str) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let connective = match tokens.as_slice() {
            [_, "AND"] => Connective::And,
            [_, "OR"] => Connective::Or,
            _ => {
                let rest = tokens[1..].join(" ");
                self.report(
                    n,
                    DiagnosticCode::BadConnective,
                    format!("connection must be followed by AND or OR, found {rest:?}"),
                );
                return;
            }
        };
        match self.target {
            Target::Open => {
                if self.connection_set {
                    self.report(
                        n,
                        DiagnosticCode::DuplicateConnection,
                        "paragraph declares more than one connection; the last one wins",
                    );
                }
                self.connection_set = true;
                self.stack.last_mut().expect("open paragraph").connective = connective;
            }
            Target::Discarded => {}
            Target::Start => self.report(
                n,
                DiagnosticCode::ContentBeforeSection,
                "connection line before the first section heading",
            ),
        }
    }

    fn heading(&mut self, n: usize, line: &str, number: &str) {
        let path = match number.parse::<NumberPath>() {
            Ok(p) => p,
            Err(e) => {
                self.report(
                    n,
                    DiagnosticCode::BadSectionNumber,
                    format!("{number:?}: {e}"),
                );
                self.target = Target::Discarded;
                return;
            }
        };

        let rest = line[number.len()..].trim();
        let mut title = rest;
        let mut weight = 1;
        if let Some((head, tail)) = rest.rsplit_once(char::is_whitespace) {
            if tail.bytes().all(|b| b.is_ascii_digit()) {
                title = head.trim_end();
                match tail.parse::<u32>() {
                    Ok(w) if w >= 1 => weight = w,
                    _ => {
                        self.report(
                            n,
                            DiagnosticCode::BadWeight,
                            format!("section {path}: weight {tail} must be an integer >= 1"),
                        );
                        self.target = Target::Discarded;
                        return;
                    }
                }
            }
        }
        if title.is_empty() || title.bytes().all(|b| b.is_ascii_digit()) {
            self.report(
                n,
                DiagnosticCode::MissingTitle,
                format!("section {path} has no title"),
            );
            self.target = Target::Discarded;
            return;
        }

        if let Some(code) = self.placement_error(&path) {
            let message = match code {
                DiagnosticCode::DuplicateSection => format!("section {path} appears twice"),
                DiagnosticCode::OrphanSection => format!(
                    "section {path} has no enclosing section {}",
                    path.parent().expect("roots are never orphans")
                ),
                _ => format!("section {path} does not follow the preceding numbering"),
            };
            self.report(n, code, message);
            self.target = Target::Discarded;
            return;
        }

        if path.depth() > MAX_SUPPORTED_DEPTH {
            self.report(
                n,
                DiagnosticCode::DepthExceeds4,
                format!(
                    "section {path} is nested {} levels deep; scoring is defined for up to {MAX_SUPPORTED_DEPTH}",
                    path.depth()
                ),
            );
        }
        if path.depth() == 1 && title.chars().any(char::is_lowercase) {
            self.report(
                n,
                DiagnosticCode::TitleNotUppercase,
                format!("main section title {title:?} is not all capitals"),
            );
        }

        while self.stack.len() >= path.depth() {
            self.close_top();
        }
        self.seen.insert(path.clone());
        let mut paragraph = Paragraph::new(path, title);
        paragraph.weight = weight;
        self.stack.push(paragraph);
        self.target = Target::Open;
        self.connection_set = false;
    }

    fn placement_error(&self, path: &NumberPath) -> Option<DiagnosticCode> {
        if self.seen.contains(path) {
            return Some(DiagnosticCode::DuplicateSection);
        }
        let depth = path.depth();
        if let Some(parent) = path.parent() {
            if !self.seen.contains(&parent) {
                return Some(DiagnosticCode::OrphanSection);
            }
            // The parent must still be open, i.e. on the current chain.
            if self.stack.get(depth - 2).map(|p| &p.path) != Some(&parent) {
                return Some(DiagnosticCode::OutOfOrderSection);
            }
        }
        // Previous sibling is either still open at this depth or, for roots,
        // the last closed root.
        let previous = match self.stack.get(depth - 1) {
            Some(open) => Some(open.path.last()),
            None if depth == 1 => self.roots.last().map(|r| r.path.last()),
            None => None,
        };
        match previous {
            Some(prev) if prev >= path.last() => Some(DiagnosticCode::OutOfOrderSection),
            _ => None,
        }
    }

    fn option(&mut self, n: usize, line: &str) {
        match self.target {
            Target::Open => {}
            Target::Discarded => return,
            Target::Start => {
                self.report(
                    n,
                    DiagnosticCode::ContentBeforeSection,
                    "option line before the first section heading",
                );
                return;
            }
        }

        let (first, after_first) = split_first_token(line);
        let (label, text) = match first.strip_suffix(')') {
            Some(marker) if !marker.is_empty() && marker.chars().all(char::is_alphanumeric) => {
                let mut chars = marker.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => (Some(c), after_first),
                    _ => {
                        self.report(
                            n,
                            DiagnosticCode::BadOptionLabel,
                            format!("option label {first:?} must be a single lowercase letter"),
                        );
                        return;
                    }
                }
            }
            _ => (None, line),
        };

        let (token, after_token) = split_first_token(text);
        let (keyword, phrase) = match Keyword::from_token(token) {
            Some(k) => (Some(k), after_token),
            None => (None, text),
        };
        if phrase.is_empty() {
            self.report(n, DiagnosticCode::MissingPhrase, "option has no phrase");
            return;
        }

        let top = self.stack.last_mut().expect("open paragraph");
        if let Some(l) = label {
            if top.options.iter().any(|o| o.label == Some(l)) {
                let path = top.path.clone();
                self.report(
                    n,
                    DiagnosticCode::DuplicateOptionLabel,
                    format!("option label {l}) is used twice in section {path}"),
                );
                return;
            }
        }
        let option = PolicyOption::new(label, keyword, phrase)
            .expect("label, phrase and line shape were checked above");
        top.options.push(option);
    }

    fn close_top(&mut self) {
        let done = self.stack.pop().expect("close_top on empty stack");
        match self.stack.last_mut() {
            Some(parent) => parent.children.push(done),
            None => self.roots.push(done),
        }
    }

    fn finish(mut self) -> Result<Parsed, ParseError> {
        while !self.stack.is_empty() {
            self.close_top();
        }
        self.diagnostics.sort_by_key(|d| d.line_number);
        if self
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
        {
            return Err(ParseError {
                name: self.name,
                diagnostics: self.diagnostics,
            });
        }
        Ok(Parsed {
            policy: Policy::new(self.name, self.roots),
            diagnostics: self.diagnostics,
        })
    }
}

/// A first token shaped like `1`, `1.2.3` or `1.2.` starts a heading.
/// Malformed numbers such as `1..2` or `1.0` are still headings (and errors).
fn looks_like_section_number(token: &str) -> bool {
    token.starts_with(|c: char| c.is_ascii_digit())
        && token.bytes().all(|b| b.is_ascii_digit() || b == b'.')
}

fn split_first_token(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(source: &str) -> Vec<(usize, DiagnosticCode)> {
        let diags = match parse_policy(source, "t") {
            Ok(p) => p.diagnostics,
            Err(e) => e.diagnostics,
        };
        diags.iter().map(|d| (d.line_number, d.code)).collect()
    }

    fn parse_ok(source: &str) -> Policy {
        let parsed = parse_policy(source, "t").expect("parses");
        parsed.policy.check_invariants().unwrap();
        parsed.policy
    }

    #[test]
    fn empty_input() {
        let parsed = parse_policy("", "empty").unwrap();
        assert!(parsed.policy.roots.is_empty());
        assert!(parsed.diagnostics.is_empty());
        assert!(parse_policy("\n\n  \n", "blank")
            .unwrap()
            .policy
            .roots
            .is_empty());
    }

    #[test]
    fn headings_options_and_connection() {
        let policy = parse_ok(
            "1 INTRODUCTION 3\n  1.1 Name\n    a) RECOMMENDED Document name\n    b) MUST Designated identification\n    connection OR\n",
        );
        let root = &policy.roots[0];
        assert_eq!(root.title, "INTRODUCTION");
        assert_eq!(root.weight, 3);
        let p = &root.children[0];
        assert_eq!(p.options.len(), 2);
        assert_eq!(p.options[0].label, Some('a'));
        assert_eq!(p.options[0].keyword, Some(Keyword::Recommended));
        assert_eq!(p.options[0].phrase(), "Document name");
        assert_eq!(p.connective, Connective::Or);
    }

    #[test]
    fn keyword_only_at_start_and_case_sensitive() {
        let policy = parse_ok("1 A\nx) The CA MUST log\nmust log\nNOT logged\n");
        let opts = &policy.roots[0].options;
        assert_eq!(opts[0].keyword, None);
        assert_eq!(opts[0].phrase(), "The CA MUST log");
        assert_eq!(opts[1].keyword, None);
        assert_eq!(opts[1].phrase(), "must log");
        assert_eq!(opts[2].keyword, Some(Keyword::Not));
        assert_eq!(opts[2].label, None);
    }

    #[test]
    fn crlf_is_normalized() {
        let a = parse_ok("1 A\r\n1.1 B\r\na) MUST x\r\n");
        let b = parse_ok("1 A\n1.1 B\na) MUST x\n");
        assert_eq!(a, b);
    }

    #[test]
    fn depth_five_warns() {
        let parsed = parse_policy("1 A\n1.1 B\n1.1.1 C\n1.1.1.1 D\n1.1.1.1.1 Deep\n", "t").unwrap();
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].code, DiagnosticCode::DepthExceeds4);
        assert_eq!(parsed.diagnostics[0].line_number, 5);
        let deepest = parsed.policy.walk().map(|p| p.depth()).max().unwrap();
        assert_eq!(deepest, 5);
    }

    #[test]
    fn lowercase_main_title_warns() {
        let parsed = parse_policy("1 Introduction\n", "t").unwrap();
        assert_eq!(
            parsed.diagnostics[0].code,
            DiagnosticCode::TitleNotUppercase
        );
        assert_eq!(parsed.diagnostics[0].severity, Severity::Warning);
        assert!(parse_policy("1 PKI (CA) 2\n", "t")
            .unwrap()
            .diagnostics
            .is_empty());
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            codes("1 A\n1.1 B\n1.3.2 C\n"),
            [(3, DiagnosticCode::OrphanSection)]
        );
        assert_eq!(
            codes("1 A\n1.1 B\n1.1 B again\n"),
            [(3, DiagnosticCode::DuplicateSection)]
        );
        assert_eq!(
            codes("1 A\n1.2 B\n1.1 C\n"),
            [(3, DiagnosticCode::OutOfOrderSection)]
        );
        assert_eq!(
            codes("1 A\n1.1 B\n2 C\n1.2 D\n"),
            [(4, DiagnosticCode::OutOfOrderSection)]
        );
        assert_eq!(
            codes("2 A\n1 B\n"),
            [(2, DiagnosticCode::OutOfOrderSection)]
        );
        assert_eq!(
            codes("1 A\n1.0 B\n"),
            [(2, DiagnosticCode::BadSectionNumber)]
        );
        assert_eq!(codes("1 A\n1.1\n"), [(2, DiagnosticCode::MissingTitle)]);
        assert_eq!(codes("1 A 0\n"), [(1, DiagnosticCode::BadWeight)]);
    }

    #[test]
    fn gaps_between_siblings_are_allowed() {
        let policy = parse_ok("1 A\n1.1 B\n1.4 C\n3 D\n");
        assert_eq!(policy.roots.len(), 2);
        assert_eq!(policy.roots[0].children[1].path.to_string(), "1.4");
    }

    #[test]
    fn content_errors() {
        assert_eq!(
            codes("a) MUST x\n1 A\n"),
            [(1, DiagnosticCode::ContentBeforeSection)]
        );
        assert_eq!(
            codes("1 A\nConnection XOR\n"),
            [(2, DiagnosticCode::BadConnective)]
        );
        assert_eq!(
            codes("1 A\nConnection and\n"),
            [(2, DiagnosticCode::BadConnective)]
        );
        assert_eq!(
            codes("1 A\nConnection\n"),
            [(2, DiagnosticCode::BadConnective)]
        );
        assert_eq!(
            codes("1 A\nA) MUST x\n"),
            [(2, DiagnosticCode::BadOptionLabel)]
        );
        assert_eq!(
            codes("1 A\nab) MUST x\n"),
            [(2, DiagnosticCode::BadOptionLabel)]
        );
        assert_eq!(
            codes("1 A\na) x\na) y\n"),
            [(3, DiagnosticCode::DuplicateOptionLabel)]
        );
        assert_eq!(
            codes("1 A\na) MUST\n"),
            [(2, DiagnosticCode::MissingPhrase)]
        );
        assert_eq!(codes("1 A\nb)\n"), [(2, DiagnosticCode::MissingPhrase)]);
    }

    #[test]
    fn warnings_do_not_block() {
        let parsed =
            parse_policy("// preamble\n1 A\nConnection AND\nConnection OR\n", "t").unwrap();
        let got: Vec<_> = parsed.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(
            got,
            [
                DiagnosticCode::CommentBeforeSection,
                DiagnosticCode::DuplicateConnection
            ]
        );
        assert_eq!(parsed.policy.roots[0].connective, Connective::Or);
    }

    #[test]
    fn content_of_rejected_heading_is_not_reported_again() {
        let err = parse_policy("1 A\n1.1 B\n1.1 Dup\na) x\na) y\n", "t").unwrap_err();
        assert_eq!(err.errors().count(), 1);
    }

    #[test]
    fn comments_are_kept_verbatim() {
        let policy = parse_ok("1 A\n   //Gives an overview  \n");
        assert_eq!(policy.roots[0].comments, ["//Gives an overview"]);
    }
}
