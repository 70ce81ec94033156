//! Paragraph scoring.
//!
//! Options of A are matched one-to-one against options of B by normalized
//! phrase. Each match contributes `O_jk * (1 - |v_j - v_k|)`, which is then
//! folded by the paragraph's connective:
//!
//! - OR: the maximum provisional score (0 without matches).
//! - AND (and no connective): the sum divided by `max(|A|, |B|)` when
//!   merging, or by `|A|` when A acquires B.
//!
//! Paragraphs where one or both sides have no options follow a fixed case
//! table (see [`score_options`]). A paragraph's own score is blended with its
//! children's aggregate by [`combine_with_children`].

use crate::model::{
    effective_tenths, ComparisonMode, Connective, Paragraph, PolicyOption, ProvisionalMatch,
};

/// Score of two identical options.
pub const FULL_SCORE: f64 = 100.0;

/// Greedy one-to-one matching in A's option order; the earliest unconsumed
/// equal option of B wins.
pub fn match_options(opts_a: &[PolicyOption], opts_b: &[PolicyOption]) -> Vec<ProvisionalMatch> {
    let mut consumed = vec![false; opts_b.len()];
    let mut matches = Vec::new();
    for (j, a) in opts_a.iter().enumerate() {
        let hit = opts_b
            .iter()
            .enumerate()
            .position(|(k, b)| !consumed[k] && a.normalized_phrase() == b.normalized_phrase());
        if let Some(k) = hit {
            consumed[k] = true;
            let distance =
                effective_tenths(a.keyword).abs_diff(effective_tenths(opts_b[k].keyword));
            matches.push(ProvisionalMatch {
                option_index_a: j,
                option_index_b: k,
                o_jk: FULL_SCORE,
                keyword_factor: f64::from(10 - distance) / 10.0,
            });
        }
    }
    matches
}

/// Option-level score of an aligned paragraph pair.
pub fn score_paragraph_options(p_a: &Paragraph, p_b: &Paragraph, mode: ComparisonMode) -> f64 {
    score_options(&p_a.options, p_a.connective, &p_b.options, mode)
}

/// Option-level score with A's connective governing. An absent paragraph is
/// passed as an empty option list.
///
/// | A options | B options | MERGE | ACQUIRE |
/// |-----------|-----------|-------|---------|
/// | yes       | none      | 0     | 100     |
/// | none      | yes       | 0     | 100     |
/// | none      | none      | 100   | 100     |
/// | yes       | yes       | connective formula  ||
pub fn score_options(
    opts_a: &[PolicyOption],
    connective_a: Connective,
    opts_b: &[PolicyOption],
    mode: ComparisonMode,
) -> f64 {
    match (opts_a.is_empty(), opts_b.is_empty()) {
        (true, true) => return FULL_SCORE,
        (false, true) | (true, false) => {
            return match mode {
                ComparisonMode::Merge => 0.0,
                ComparisonMode::Acquire => FULL_SCORE,
            }
        }
        (false, false) => {}
    }

    let matches = match_options(opts_a, opts_b);
    match connective_a {
        Connective::Or => matches
            .iter()
            .map(ProvisionalMatch::provisional_score)
            .fold(0.0, f64::max),
        Connective::And | Connective::None => {
            // Summing in tenths keeps results like 130/4 exact.
            let tenths: f64 = matches
                .iter()
                .map(|m| (m.keyword_factor * 10.0).round())
                .sum();
            let denominator = match mode {
                ComparisonMode::Merge => opts_a.len().max(opts_b.len()),
                ComparisonMode::Acquire => opts_a.len(),
            };
            tenths * (FULL_SCORE / 10.0) / denominator as f64
        }
    }
}

/// `(own + child_aggregate * n) / (1 + n)`: the more subparagraphs a
/// paragraph has, the less its own options count.
pub fn combine_with_children(own_score: f64, child_aggregate: f64, n_children: usize) -> f64 {
    debug_assert!(n_children >= 1);
    let n = n_children as f64;
    (own_score + child_aggregate * n) / (1.0 + n)
}

/// Weighted mean of child scores, `Σ(score·weight) / Σweight`.
///
/// # Panics
///
/// On an empty list.
pub fn child_aggregate(children_scores: &[(f64, u32)]) -> f64 {
    assert!(
        !children_scores.is_empty(),
        "child_aggregate of no children"
    );
    weighted_mean(children_scores.iter().copied())
}

pub(crate) fn weighted_mean(scores: impl IntoIterator<Item = (f64, u32)>) -> f64 {
    let (num, den) = scores.into_iter().fold((0.0, 0.0), |(num, den), (s, w)| {
        (num + s * f64::from(w), den + f64::from(w))
    });
    num / den
}
