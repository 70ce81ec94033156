//! Final acceptance rules: threshold predicates over a comparison report.
//!
//! A verdict accepts only when every rule passes. The rules file format is
//! documented in RULES.md.

use std::fmt;

use thiserror::Error;

use crate::model::{ComparisonReport, NumberPath};

/// Tolerance for the exact-100 paragraph rule.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// `>`: the score must be strictly over the bound.
    Over,
    /// `>=`
    AtLeast,
}

impl Threshold {
    fn holds(self, observed: f64, bound: f64) -> bool {
        match self {
            Threshold::Over => observed > bound,
            Threshold::AtLeast => observed >= bound,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Threshold::Over => ">",
            Threshold::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AcceptanceRule {
    OverallMin {
        threshold: f64,
        op: Threshold,
        use_weighted: bool,
    },
    ParagraphMin {
        path: NumberPath,
        threshold: f64,
        op: Threshold,
    },
    ParagraphExact100 {
        path: NumberPath,
    },
}

impl AcceptanceRule {
    /// "Overall score over `threshold`", weighted.
    pub fn overall_over(threshold: f64) -> Self {
        AcceptanceRule::OverallMin {
            threshold,
            op: Threshold::Over,
            use_weighted: true,
        }
    }

    pub fn paragraph_over(path: NumberPath, threshold: f64) -> Self {
        AcceptanceRule::ParagraphMin {
            path,
            threshold,
            op: Threshold::Over,
        }
    }

    fn path(&self) -> Option<&NumberPath> {
        match self {
            AcceptanceRule::OverallMin { .. } => None,
            AcceptanceRule::ParagraphMin { path, .. }
            | AcceptanceRule::ParagraphExact100 { path } => Some(path),
        }
    }
}

impl fmt::Display for AcceptanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceRule::OverallMin {
                threshold,
                op,
                use_weighted,
            } => {
                let kind = if *use_weighted {
                    "weighted"
                } else {
                    "unweighted"
                };
                write!(f, "overall {} {threshold} {kind}", op.symbol())
            }
            AcceptanceRule::ParagraphMin {
                path,
                threshold,
                op,
            } => write!(f, "paragraph {path} {} {threshold}", op.symbol()),
            AcceptanceRule::ParagraphExact100 { path } => write!(f, "paragraph {path} == 100"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    pub rule: AcceptanceRule,
    pub passed: bool,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub accepted: bool,
    pub rule_outcomes: Vec<RuleOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluateError {
    #[error("UNKNOWN_PATH: rule `{rule}` references section {path}, which is not in the report")]
    UnknownPath { rule: String, path: NumberPath },
}

pub fn evaluate(
    report: &ComparisonReport,
    rules: &[AcceptanceRule],
) -> Result<Verdict, EvaluateError> {
    let mut outcomes = Vec::with_capacity(rules.len());
    for rule in rules {
        let observed = match rule.path() {
            None => match rule {
                AcceptanceRule::OverallMin {
                    use_weighted: true, ..
                } => report.overall_weighted,
                _ => report.overall_unweighted,
            },
            Some(path) => {
                report
                    .score(path)
                    .ok_or_else(|| EvaluateError::UnknownPath {
                        rule: rule.to_string(),
                        path: path.clone(),
                    })?
                    .combined_score
            }
        };
        let passed = match rule {
            AcceptanceRule::OverallMin { threshold, op, .. }
            | AcceptanceRule::ParagraphMin { threshold, op, .. } => op.holds(observed, *threshold),
            AcceptanceRule::ParagraphExact100 { .. } => (observed - 100.0).abs() <= EXACT_TOLERANCE,
        };
        outcomes.push(RuleOutcome {
            rule: rule.clone(),
            passed,
            observed,
        });
    }
    Ok(Verdict {
        accepted: outcomes.iter().all(|o| o.passed),
        rule_outcomes: outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rules line {line}: {message}")]
pub struct RulesParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a rules file. Blank lines and `#` comments are skipped.
pub fn parse_rules(source: &str) -> Result<Vec<AcceptanceRule>, RulesParseError> {
    let mut rules = Vec::new();
    for (index, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| RulesParseError {
            line: index + 1,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let rule = match tokens.as_slice() {
            ["overall", op, number, rest @ ..] => {
                let use_weighted = match rest {
                    [] | ["weighted"] => true,
                    ["unweighted"] => false,
                    _ => {
                        return Err(err(format!(
                            "expected `weighted` or `unweighted` after the threshold in {line:?}"
                        )))
                    }
                };
                AcceptanceRule::OverallMin {
                    threshold: parse_threshold(number).map_err(err)?,
                    op: parse_op(op).map_err(err)?,
                    use_weighted,
                }
            }
            ["paragraph", path, "==", "100"] => AcceptanceRule::ParagraphExact100 {
                path: parse_path(path).map_err(err)?,
            },
            ["paragraph", path, op, number] => AcceptanceRule::ParagraphMin {
                path: parse_path(path).map_err(err)?,
                threshold: parse_threshold(number).map_err(err)?,
                op: parse_op(op).map_err(err)?,
            },
            _ => return Err(err(format!("unrecognized rule {line:?}"))),
        };
        rules.push(rule);
    }
    Ok(rules)
}

fn parse_op(op: &str) -> Result<Threshold, String> {
    match op {
        ">" => Ok(Threshold::Over),
        ">=" => Ok(Threshold::AtLeast),
        "==" => Err("`==` is only allowed as `paragraph <path> == 100`".to_string()),
        other => Err(format!("unknown operator {other:?}; expected `>` or `>=`")),
    }
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let s = s.strip_suffix('%').unwrap_or(s);
    match s.parse::<f64>() {
        Ok(v) if (0.0..=100.0).contains(&v) => Ok(v),
        _ => Err(format!(
            "threshold {s:?} must be a number between 0 and 100"
        )),
    }
}

fn parse_path(s: &str) -> Result<NumberPath, String> {
    s.parse().map_err(|e| format!("section number {s:?}: {e}"))
}
