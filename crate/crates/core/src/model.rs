//! Domain types for standardized certificate policies and their comparison.
//!
//! A [`Policy`] is a forest of [`Paragraph`]s keyed by dotted [`NumberPath`]s.
//! Each paragraph carries lettered [`PolicyOption`]s, an optional
//! [`Connective`] and an integer weight. Scoring artifacts
//! ([`ParagraphScore`], [`ComparisonReport`], [`ProvisionalMatch`]) live here
//! too so every other module shares one vocabulary.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Dotted section number such as `1.3.1.1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumberPath(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("empty section number")]
    Empty,
    #[error("invalid section number segment {0:?}")]
    BadSegment(String),
    #[error("section number segments must be at least 1")]
    ZeroSegment,
}

impl NumberPath {
    pub fn new(segments: Vec<u32>) -> Result<Self, PathError> {
        if segments.is_empty() {
            return Err(PathError::Empty);
        }
        if segments.contains(&0) {
            return Err(PathError::ZeroSegment);
        }
        Ok(Self(segments))
    }

    pub fn root(segment: u32) -> Result<Self, PathError> {
        Self::new(vec![segment])
    }

    pub fn segments(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("paths are never empty")
    }

    /// The enclosing path, or `None` for a main section.
    pub fn parent(&self) -> Option<NumberPath> {
        if self.0.len() == 1 {
            None
        } else {
            Some(Self(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, segment: u32) -> Result<NumberPath, PathError> {
        if segment == 0 {
            return Err(PathError::ZeroSegment);
        }
        let mut segments = self.0.clone();
        segments.push(segment);
        Ok(Self(segments))
    }

    /// True when `self` is `other` plus exactly one trailing segment.
    pub fn is_child_of(&self, other: &NumberPath) -> bool {
        self.0.len() == other.0.len() + 1 && self.0.starts_with(&other.0)
    }
}

impl fmt::Display for NumberPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Accepts `1.3.1` and the grammar's trailing-dot form `1.3.1.`.
impl FromStr for NumberPath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_suffix('.').unwrap_or(s);
        if s.is_empty() {
            return Err(PathError::Empty);
        }
        let segments = s
            .split('.')
            .map(|part| {
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(PathError::BadSegment(part.to_string()));
                }
                part.parse::<u32>()
                    .map_err(|_| PathError::BadSegment(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(segments)
    }
}

impl Serialize for NumberPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Requirement keyword with its fuzzy value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Keyword {
    Must,
    Recommended,
    Optional,
    Not,
}

impl Keyword {
    pub const ALL: [Keyword; 4] = [
        Keyword::Must,
        Keyword::Recommended,
        Keyword::Optional,
        Keyword::Not,
    ];

    /// Value in tenths. Scoring works on these so that worked examples come
    /// out exact in floating point.
    pub(crate) fn tenths(self) -> u32 {
        match self {
            Keyword::Must => 10,
            Keyword::Recommended => 8,
            Keyword::Optional => 5,
            Keyword::Not => 0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Keyword::Must => 1.0,
            Keyword::Recommended => 0.8,
            Keyword::Optional => 0.5,
            Keyword::Not => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Must => "MUST",
            Keyword::Recommended => "RECOMMENDED",
            Keyword::Optional => "OPTIONAL",
            Keyword::Not => "NOT",
        }
    }

    /// Case-sensitive lookup; only the upper-case spelling is a keyword.
    pub fn from_token(token: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == token)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn keyword_value(keyword: Keyword) -> f64 {
    keyword.value()
}

/// Value of an option's keyword; an unqualified option counts as MUST.
pub fn effective_value(keyword: Option<Keyword>) -> f64 {
    keyword.map_or(1.0, Keyword::value)
}

pub(crate) fn effective_tenths(keyword: Option<Keyword>) -> u32 {
    keyword.map_or(10, Keyword::tenths)
}

/// Canonical form used for option equality: lower case, trimmed, inner
/// whitespace runs collapsed to one space.
pub fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// One option line of a paragraph: `[label)] [KEYWORD] phrase`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyOption {
    pub label: Option<char>,
    pub keyword: Option<Keyword>,
    phrase: String,
    normalized_phrase: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptionError {
    #[error("option phrase is empty")]
    EmptyPhrase,
    #[error("option phrase contains a line break")]
    LineBreak,
    #[error("option label {0:?} is not a lowercase letter")]
    BadLabel(char),
}

impl PolicyOption {
    pub fn new(
        label: Option<char>,
        keyword: Option<Keyword>,
        phrase: impl Into<String>,
    ) -> Result<Self, OptionError> {
        let phrase = phrase.into();
        if phrase.contains(['\n', '\r']) {
            return Err(OptionError::LineBreak);
        }
        let phrase = phrase.trim().to_string();
        if phrase.is_empty() {
            return Err(OptionError::EmptyPhrase);
        }
        if let Some(l) = label {
            if !l.is_ascii_lowercase() {
                return Err(OptionError::BadLabel(l));
            }
        }
        let normalized_phrase = normalize_phrase(&phrase);
        Ok(Self {
            label,
            keyword,
            phrase,
            normalized_phrase,
        })
    }

    pub fn phrase(&self) -> &str {
        &self.phrase
    }

    pub fn normalized_phrase(&self) -> &str {
        &self.normalized_phrase
    }

    pub fn value(&self) -> f64 {
        effective_value(self.keyword)
    }

    /// Equality that ignores the presentation-only label.
    pub fn same_content(&self, other: &PolicyOption) -> bool {
        self.keyword == other.keyword && self.phrase == other.phrase
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Connective {
    And,
    Or,
    #[default]
    None,
}

impl Connective {
    pub fn as_str(self) -> &'static str {
        match self {
            Connective::And => "AND",
            Connective::Or => "OR",
            Connective::None => "NONE",
        }
    }
}

/// A section or subsection and everything nested under it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub path: NumberPath,
    pub title: String,
    pub weight: u32,
    pub options: Vec<PolicyOption>,
    pub connective: Connective,
    /// `//` lines, kept verbatim (including the slashes). Never scored.
    pub comments: Vec<String>,
    pub children: Vec<Paragraph>,
}

impl Paragraph {
    pub fn new(path: NumberPath, title: impl Into<String>) -> Self {
        Self {
            path,
            title: title.into(),
            weight: 1,
            options: Vec::new(),
            connective: Connective::None,
            comments: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.path.depth()
    }

    /// Pre-order walk over this paragraph and its descendants.
    pub fn walk(&self) -> impl Iterator<Item = &Paragraph> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.children.iter().rev());
            Some(next)
        })
    }

    /// Structural equality: everything except option labels.
    pub fn tree_eq(&self, other: &Paragraph) -> bool {
        self.path == other.path
            && self.title == other.title
            && self.weight == other.weight
            && self.connective == other.connective
            && self.comments == other.comments
            && self.options.len() == other.options.len()
            && self
                .options
                .iter()
                .zip(&other.options)
                .all(|(a, b)| a.same_content(b))
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.tree_eq(b))
    }

    /// Checks the tree invariants below (and including) this paragraph.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.weight == 0 {
            return Err(format!("{}: weight must be at least 1", self.path));
        }
        let mut labels = Vec::new();
        for o in &self.options {
            if let Some(l) = o.label {
                if labels.contains(&l) {
                    return Err(format!("{}: duplicate option label {l})", self.path));
                }
                labels.push(l);
            }
        }
        let mut previous = 0;
        for c in &self.children {
            if !c.path.is_child_of(&self.path) {
                return Err(format!("{} is not a direct child of {}", c.path, self.path));
            }
            if c.path.last() <= previous {
                return Err(format!("{}: children out of order", self.path));
            }
            previous = c.path.last();
            c.check_invariants()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Policy {
    pub name: String,
    pub roots: Vec<Paragraph>,
}

impl Policy {
    pub fn new(name: impl Into<String>, roots: Vec<Paragraph>) -> Self {
        Self {
            name: name.into(),
            roots,
        }
    }

    pub fn walk(&self) -> impl Iterator<Item = &Paragraph> {
        self.roots.iter().flat_map(Paragraph::walk)
    }

    pub fn find(&self, path: &NumberPath) -> Option<&Paragraph> {
        let mut level = &self.roots;
        let mut found = None;
        for depth in 1..=path.depth() {
            let segment = path.segments()[depth - 1];
            let p = level.iter().find(|p| p.path.last() == segment)?;
            found = Some(p);
            level = &p.children;
        }
        found
    }

    /// Structural equality ignoring the policy name and option labels.
    pub fn tree_eq(&self, other: &Policy) -> bool {
        self.roots.len() == other.roots.len()
            && self
                .roots
                .iter()
                .zip(&other.roots)
                .all(|(a, b)| a.tree_eq(b))
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        let mut previous = 0;
        for r in &self.roots {
            if r.path.depth() != 1 {
                return Err(format!("root paragraph {} is not a main section", r.path));
            }
            if r.path.last() <= previous {
                return Err("main sections out of order".to_string());
            }
            previous = r.path.last();
            r.check_invariants()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonMode {
    /// Cross-certification between peers.
    Merge,
    /// A acquires B; B adapts to A.
    Acquire,
}

impl FromStr for ComparisonMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "merge" => Ok(ComparisonMode::Merge),
            "acquire" => Ok(ComparisonMode::Acquire),
            other => Err(format!("unknown comparison mode {other:?}")),
        }
    }
}

impl fmt::Display for ComparisonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonMode::Merge => "merge",
            ComparisonMode::Acquire => "acquire",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchStatus {
    Matched,
    MissingInA,
    MissingInB,
    BothEmpty,
}

impl MatchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchStatus::Matched => "MATCHED",
            MatchStatus::MissingInA => "MISSING_IN_A",
            MatchStatus::MissingInB => "MISSING_IN_B",
            MatchStatus::BothEmpty => "BOTH_EMPTY",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParagraphScore {
    pub path: NumberPath,
    pub own_score: f64,
    pub child_aggregate: Option<f64>,
    pub combined_score: f64,
    pub weight: u32,
    #[serde(rename = "status")]
    pub match_status: MatchStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportDiagnosticCode {
    TitleMismatch,
    MissingInA,
    MissingInB,
    ConnectiveMismatch,
    #[serde(rename = "DEPTH_EXCEEDS_4")]
    DepthExceeds4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDiagnostic {
    pub code: ReportDiagnosticCode,
    pub path: NumberPath,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub mode: ComparisonMode,
    pub policy_a_name: String,
    pub policy_b_name: String,
    pub paragraph_scores: Vec<ParagraphScore>,
    pub overall_weighted: f64,
    pub overall_unweighted: f64,
    pub diagnostics: Vec<ReportDiagnostic>,
}

impl ComparisonReport {
    pub fn score(&self, path: &NumberPath) -> Option<&ParagraphScore> {
        self.paragraph_scores.iter().find(|s| &s.path == path)
    }

    pub fn top_level(&self) -> impl Iterator<Item = &ParagraphScore> {
        self.paragraph_scores.iter().filter(|s| s.path.depth() == 1)
    }
}

/// Pairing of option `j` of A with option `k` of B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProvisionalMatch {
    pub option_index_a: usize,
    pub option_index_b: usize,
    /// 100 for equal options. Only equal options produce a match.
    pub o_jk: f64,
    /// `1 - |v_j - v_k|`.
    pub keyword_factor: f64,
}

impl ProvisionalMatch {
    pub fn provisional_score(&self) -> f64 {
        self.o_jk * self.keyword_factor
    }
}
