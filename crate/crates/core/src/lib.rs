//! Comparison and assessment of standardized X.509 certificate policies.
//!
//! The pipeline is: [`parse_policy`] two policy documents, [`compare`] them
//! under merge or acquisition semantics, [`evaluate`] the comparing
//! organization's acceptance rules against the report, and, when accepted,
//! [`merge`] them into a prototype unified policy written with
//! [`render_policy`].
//!
//! ```
//! use cpcompat::{compare, parse_policy, ComparisonMode};
//!
//! let a = parse_policy("1 SCOPE\na) MUST x\nb) MUST y\n", "a").unwrap().policy;
//! let b = parse_policy("1 SCOPE\na) RECOMMENDED x\n", "b").unwrap().policy;
//! let report = compare(&a, &b, ComparisonMode::Merge);
//! assert_eq!(report.overall_weighted, 40.0);
//! ```

#![forbid(unsafe_code)]

pub mod acceptance;
pub mod cli;
pub mod comparison;
pub mod merger;
pub mod model;
pub mod parser;
pub mod render;
pub mod scoring;

pub use acceptance::{evaluate, parse_rules, AcceptanceRule, Threshold, Verdict};
pub use comparison::{align, compare};
pub use merger::{merge, strip_annotations, MergeError};
pub use model::{
    keyword_value, normalize_phrase, ComparisonMode, ComparisonReport, Connective, Keyword,
    MatchStatus, NumberPath, Paragraph, ParagraphScore, Policy, PolicyOption, ProvisionalMatch,
};
pub use parser::{parse_policy, ParseDiagnostic, ParseError, Parsed, Severity};
pub use render::render_policy;
pub use scoring::{
    child_aggregate, combine_with_children, match_options, score_options, score_paragraph_options,
};
