//! Aligning two policies and computing the comparison report.
//!
//! Paragraphs are paired by identical section number. A is the comparing
//! organization: its weights, connectives and outline drive the scores.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::model::{
    normalize_phrase, ComparisonMode, ComparisonReport, Connective, MatchStatus, NumberPath,
    Paragraph, ParagraphScore, Policy, ReportDiagnostic, ReportDiagnosticCode,
};
use crate::parser::MAX_SUPPORTED_DEPTH;
use crate::scoring::{
    child_aggregate, combine_with_children, score_options, weighted_mean, FULL_SCORE,
};

/// Version of the JSON report layout.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy)]
pub struct AlignedPair<'a> {
    pub path: &'a NumberPath,
    pub in_a: Option<&'a Paragraph>,
    pub in_b: Option<&'a Paragraph>,
}

/// Pairs paragraphs by section number: every path of A in A's document
/// order, then paths only B has, in B's order.
pub fn align<'a>(a: &'a Policy, b: &'a Policy) -> Vec<AlignedPair<'a>> {
    let b_index: HashMap<&NumberPath, &Paragraph> = b.walk().map(|p| (&p.path, p)).collect();
    let mut pairs: Vec<AlignedPair> = a
        .walk()
        .map(|p| AlignedPair {
            path: &p.path,
            in_a: Some(p),
            in_b: b_index.get(&p.path).copied(),
        })
        .collect();
    let a_paths: HashSet<&NumberPath> = a.walk().map(|p| &p.path).collect();
    pairs.extend(
        b.walk()
            .filter(|p| !a_paths.contains(&p.path))
            .map(|p| AlignedPair {
                path: &p.path,
                in_a: None,
                in_b: Some(p),
            }),
    );
    pairs
}

/// Title-mismatch diagnostics for aligned pairs.
pub fn title_mismatches(pairs: &[AlignedPair]) -> Vec<ReportDiagnostic> {
    pairs
        .iter()
        .filter_map(|pair| {
            let (a, b) = (pair.in_a?, pair.in_b?);
            (normalize_phrase(&a.title) != normalize_phrase(&b.title)).then(|| ReportDiagnostic {
                code: ReportDiagnosticCode::TitleMismatch,
                path: pair.path.clone(),
                message: format!("titles differ: A {:?}, B {:?}", a.title, b.title),
            })
        })
        .collect()
}

pub fn compare(a: &Policy, b: &Policy, mode: ComparisonMode) -> ComparisonReport {
    let pairs = align(a, b);
    let mut diagnostics = title_mismatches(&pairs);

    for pair in &pairs {
        let path = pair.path;
        match (pair.in_a, pair.in_b) {
            (Some(pa), Some(pb)) => {
                if pa.connective != pb.connective
                    && pa.connective != Connective::None
                    && pb.connective != Connective::None
                {
                    diagnostics.push(ReportDiagnostic {
                        code: ReportDiagnosticCode::ConnectiveMismatch,
                        path: path.clone(),
                        message: format!(
                            "connectives differ: A {}, B {}; A's governs",
                            pa.connective.as_str(),
                            pb.connective.as_str()
                        ),
                    });
                }
            }
            (Some(_), None) => diagnostics.push(ReportDiagnostic {
                code: ReportDiagnosticCode::MissingInB,
                path: path.clone(),
                message: format!("section {path} exists only in A"),
            }),
            (None, Some(_)) => diagnostics.push(ReportDiagnostic {
                code: ReportDiagnosticCode::MissingInA,
                path: path.clone(),
                message: format!("section {path} exists only in B"),
            }),
            (None, None) => unreachable!("aligned pair without either side"),
        }
        if path.depth() > MAX_SUPPORTED_DEPTH {
            diagnostics.push(ReportDiagnostic {
                code: ReportDiagnosticCode::DepthExceeds4,
                path: path.clone(),
                message: format!("section {path} is deeper than {MAX_SUPPORTED_DEPTH} levels"),
            });
        }
    }

    // Own scores first; combined scores are filled bottom-up below.
    let mut scores: Vec<ParagraphScore> = pairs
        .iter()
        .map(|pair| {
            let empty = Vec::new();
            let opts_a = pair.in_a.map_or(&empty, |p| &p.options);
            let opts_b = pair.in_b.map_or(&empty, |p| &p.options);
            let connective = pair.in_a.map_or(Connective::None, |p| p.connective);
            let own = score_options(opts_a, connective, opts_b, mode);
            let status = match (pair.in_a, pair.in_b) {
                (Some(_), None) => MatchStatus::MissingInB,
                (None, _) => MatchStatus::MissingInA,
                (Some(_), Some(_)) if opts_a.is_empty() && opts_b.is_empty() => {
                    MatchStatus::BothEmpty
                }
                (Some(_), Some(_)) => MatchStatus::Matched,
            };
            ParagraphScore {
                path: pair.path.clone(),
                own_score: own,
                child_aggregate: None,
                combined_score: own,
                weight: pair.in_a.map_or(1, |p| p.weight),
                match_status: status,
            }
        })
        .collect();

    let index: HashMap<NumberPath, usize> = scores
        .iter()
        .enumerate()
        .map(|(i, s)| (s.path.clone(), i))
        .collect();

    // Deepest first, so every child is final before its parent reads it.
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(pairs[i].path.depth()));
    for i in order {
        let Some(pa) = pairs[i].in_a else { continue };
        if pa.children.is_empty() {
            continue;
        }
        let children: Vec<(f64, u32)> = pa
            .children
            .iter()
            .map(|c| {
                let s = &scores[index[&c.path]];
                (s.combined_score, s.weight)
            })
            .collect();
        let aggregate = child_aggregate(&children);
        let s = &mut scores[i];
        s.child_aggregate = Some(aggregate);
        s.combined_score = combine_with_children(s.own_score, aggregate, children.len());
    }

    let (overall_weighted, overall_unweighted) = overall(&scores);

    ComparisonReport {
        mode,
        policy_a_name: a.name.clone(),
        policy_b_name: b.name.clone(),
        paragraph_scores: scores,
        overall_weighted,
        overall_unweighted,
        diagnostics,
    }
}

/// Weighted and plain means over top-level paragraphs. Two empty policies
/// are fully compatible.
fn overall(scores: &[ParagraphScore]) -> (f64, f64) {
    let top: Vec<&ParagraphScore> = scores.iter().filter(|s| s.path.depth() == 1).collect();
    if top.is_empty() {
        return (FULL_SCORE, FULL_SCORE);
    }
    let weighted = weighted_mean(top.iter().map(|s| (s.combined_score, s.weight)));
    let unweighted = top.iter().map(|s| s.combined_score).sum::<f64>() / top.len() as f64;
    (weighted, unweighted)
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    report_version: u32,
    mode: ComparisonMode,
    policy_a: &'a str,
    policy_b: &'a str,
    overall_weighted: f64,
    overall_unweighted: f64,
    paragraphs: &'a [ParagraphScore],
    diagnostics: &'a [ReportDiagnostic],
}

impl ComparisonReport {
    /// Pretty-printed JSON in the documented report layout.
    pub fn to_json(&self) -> String {
        let doc = ReportDocument {
            report_version: REPORT_VERSION,
            mode: self.mode,
            policy_a: &self.policy_a_name,
            policy_b: &self.policy_b_name,
            overall_weighted: self.overall_weighted,
            overall_unweighted: self.overall_unweighted,
            paragraphs: &self.paragraph_scores,
            diagnostics: &self.diagnostics,
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}
