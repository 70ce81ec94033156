//! Builds the prototype of a unified policy once a comparison is accepted.
//!
//! Under ACQUIRE the acquirer's policy is the result. Under MERGE the outline
//! is the union of both trees; matched options keep the stricter keyword and
//! everything that could not be reconciled is kept with a `//` annotation for
//! human review.

use thiserror::Error;

use crate::acceptance::Verdict;
use crate::model::{
    effective_value, ComparisonMode, ComparisonReport, Connective, Keyword, Paragraph, Policy,
    PolicyOption,
};
use crate::scoring::match_options;

/// Prefix of the annotation on options only one side declares.
pub const UNMATCHED_PREFIX: &str = "// unmatched: from ";
/// Prefix of the annotation recording B's differing title.
pub const TITLE_CONFLICT_PREFIX: &str = "// title conflict: B has ";
/// Prefix of the annotation recording B's differing connective.
pub const CONNECTIVE_CONFLICT_PREFIX: &str = "// connective conflict: B declares ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("REJECTED_INPUT: the verdict rejected policy B; nothing to merge")]
    RejectedInput,
    #[error("report was computed in {report} mode but merge was asked for {requested}")]
    ModeMismatch {
        report: ComparisonMode,
        requested: ComparisonMode,
    },
}

pub fn merge(
    a: &Policy,
    b: &Policy,
    report: &ComparisonReport,
    verdict: &Verdict,
    mode: ComparisonMode,
) -> Result<Policy, MergeError> {
    if !verdict.accepted {
        return Err(MergeError::RejectedInput);
    }
    if report.mode != mode {
        return Err(MergeError::ModeMismatch {
            report: report.mode,
            requested: mode,
        });
    }
    match mode {
        ComparisonMode::Acquire => Ok(a.clone()),
        ComparisonMode::Merge => Ok(Policy::new(
            format!("{}+{}", a.name, b.name),
            merge_levels(&a.roots, &b.roots),
        )),
    }
}

/// Union of two sibling lists, ordered by section number.
fn merge_levels(a: &[Paragraph], b: &[Paragraph]) -> Vec<Paragraph> {
    let mut out: Vec<Paragraph> = a
        .iter()
        .map(|pa| match b.iter().find(|pb| pb.path == pa.path) {
            Some(pb) => merge_paragraph(pa, pb),
            None => annotate_one_sided(pa, "A"),
        })
        .collect();
    out.extend(
        b.iter()
            .filter(|pb| !a.iter().any(|pa| pa.path == pb.path))
            .map(|pb| annotate_one_sided(pb, "B")),
    );
    out.sort_by_key(|p| p.path.last());
    out
}

fn merge_paragraph(a: &Paragraph, b: &Paragraph) -> Paragraph {
    let mut p = Paragraph::new(a.path.clone(), a.title.clone());
    p.weight = a.weight;
    p.comments = a.comments.clone();
    for c in &b.comments {
        if !p.comments.contains(c) {
            p.comments.push(c.clone());
        }
    }
    if a.title != b.title {
        p.comments
            .push(format!("{TITLE_CONFLICT_PREFIX}{:?}", b.title));
    }

    p.connective = match (a.connective, b.connective) {
        (Connective::None, other) => other,
        (mine, Connective::None) => mine,
        (mine, theirs) => {
            if mine != theirs {
                p.comments
                    .push(format!("{CONNECTIVE_CONFLICT_PREFIX}{}", theirs.as_str()));
            }
            mine
        }
    };

    let matches = match_options(&a.options, &b.options);
    let mut b_used = vec![false; b.options.len()];
    for (j, oa) in a.options.iter().enumerate() {
        match matches.iter().find(|m| m.option_index_a == j) {
            Some(m) => {
                b_used[m.option_index_b] = true;
                let ob = &b.options[m.option_index_b];
                let keyword = if effective_value(ob.keyword) > effective_value(oa.keyword) {
                    ob.keyword
                } else {
                    oa.keyword
                };
                p.options.push(unlabeled(keyword, oa));
            }
            None => {
                p.comments.push(unmatched_note("A", oa));
                p.options.push(unlabeled(oa.keyword, oa));
            }
        }
    }
    for (ob, used) in b.options.iter().zip(&b_used) {
        if !used {
            p.comments.push(unmatched_note("B", ob));
            p.options.push(unlabeled(ob.keyword, ob));
        }
    }

    p.children = merge_levels(&a.children, &b.children);
    p
}

/// A paragraph only one side has, copied with every option annotated.
/// Weights always come from A, so B-only material gets the default.
fn annotate_one_sided(p: &Paragraph, side: &str) -> Paragraph {
    let mut out = p.clone();
    if side == "B" {
        out.weight = 1;
    }
    out.options = p.options.iter().map(|o| unlabeled(o.keyword, o)).collect();
    out.comments
        .extend(p.options.iter().map(|o| unmatched_note(side, o)));
    out.children = p
        .children
        .iter()
        .map(|c| annotate_one_sided(c, side))
        .collect();
    out
}

fn unlabeled(keyword: Option<Keyword>, o: &PolicyOption) -> PolicyOption {
    PolicyOption::new(None, keyword, o.phrase()).expect("phrase came from a valid option")
}

fn unmatched_note(side: &str, o: &PolicyOption) -> String {
    format!("{UNMATCHED_PREFIX}{side}: {}", o.phrase())
}

pub fn is_annotation(comment: &str) -> bool {
    [
        UNMATCHED_PREFIX,
        TITLE_CONFLICT_PREFIX,
        CONNECTIVE_CONFLICT_PREFIX,
    ]
    .iter()
    .any(|prefix| comment.starts_with(prefix))
}

/// Copy of `policy` with every merge annotation removed.
pub fn strip_annotations(policy: &Policy) -> Policy {
    fn strip(p: &Paragraph) -> Paragraph {
        let mut out = p.clone();
        out.comments.retain(|c| !is_annotation(c));
        out.children = p.children.iter().map(strip).collect();
        out
    }
    Policy::new(
        policy.name.clone(),
        policy.roots.iter().map(strip).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{evaluate, AcceptanceRule};
    use crate::comparison::compare;
    use crate::parser::parse_policy;
    use crate::render::render_policy;

    fn policy(src: &str) -> Policy {
        parse_policy(src, "t").unwrap().policy
    }

    fn outline(policy: &Policy) -> Vec<String> {
        policy.walk().map(|p| p.path.to_string()).collect()
    }

    fn accept_all(a: &Policy, b: &Policy, mode: ComparisonMode) -> Result<Policy, MergeError> {
        let report = compare(a, b, mode);
        let verdict = evaluate(&report, &[]).unwrap();
        merge(a, b, &report, &verdict, mode)
    }

    const A: &str = "1 EXAMPLE\na) MUST a\nb) MUST b\nc) MUST c\n";
    const B: &str =
        "1 EXAMPLE\na) RECOMMENDED a\nb) OPTIONAL b\nc) RECOMMENDED d\nd) RECOMMENDED e\n";

    #[test]
    fn self_merge_is_identity() {
        let p = policy(
            "1 A 2\n//c\na) MUST x\nb) NOT y\nConnection OR\n1.1 B\n1.1.1 C\na) OPTIONAL z\n2 D\n",
        );
        for mode in [ComparisonMode::Merge, ComparisonMode::Acquire] {
            assert!(accept_all(&p, &p, mode).unwrap().tree_eq(&p));
        }
    }

    #[test]
    fn stricter_keyword_and_annotations() {
        let m = accept_all(&policy(A), &policy(B), ComparisonMode::Merge).unwrap();
        let root = &m.roots[0];
        let got: Vec<(Option<Keyword>, &str)> = root
            .options
            .iter()
            .map(|o| (o.keyword, o.phrase()))
            .collect();
        assert_eq!(
            got,
            [
                (Some(Keyword::Must), "a"),
                (Some(Keyword::Must), "b"),
                (Some(Keyword::Must), "c"),
                (Some(Keyword::Recommended), "d"),
                (Some(Keyword::Recommended), "e"),
            ]
        );
        assert_eq!(
            root.comments,
            [
                "// unmatched: from A: c",
                "// unmatched: from B: d",
                "// unmatched: from B: e"
            ]
        );
        parse_policy(&render_policy(&m), "m").unwrap();
    }

    #[test]
    fn stricter_keyword_from_b() {
        let a = policy("1 X\na) OPTIONAL p\nb) Q\n");
        let b = policy("1 X\na) MUST p\nb) NOT q\n");
        let m = accept_all(&a, &b, ComparisonMode::Merge).unwrap();
        let kws: Vec<_> = m.roots[0].options.iter().map(|o| o.keyword).collect();
        // Unqualified "Q" counts as MUST and ties keep A's spelling.
        assert_eq!(kws, [Some(Keyword::Must), None]);
        assert_eq!(m.roots[0].options[1].phrase(), "Q");
    }

    #[test]
    fn outline_union_titles_and_connectives() {
        let a = policy("1 A 4\n1.1 Overview\n//mine\nConnection OR\n3 C\n");
        let b =
            policy("1 A 9\n1.1 Summary\n//theirs\nConnection AND\n1.2 Extra 5\na) MUST z\n2 B 7\n");
        let m = accept_all(&a, &b, ComparisonMode::Merge).unwrap();
        m.check_invariants().unwrap();
        assert_eq!(outline(&m), ["1", "1.1", "1.2", "2", "3"]);
        assert_eq!(m.roots[0].weight, 4);
        assert_eq!(m.roots[1].weight, 1);
        let p11 = &m.roots[0].children[0];
        assert_eq!(p11.title, "Overview");
        assert_eq!(p11.connective, Connective::Or);
        assert_eq!(
            p11.comments,
            [
                "//mine",
                "//theirs",
                "// title conflict: B has \"Summary\"",
                "// connective conflict: B declares AND"
            ]
        );
        let p12 = &m.roots[0].children[1];
        assert_eq!(p12.weight, 1);
        assert_eq!(p12.comments, ["// unmatched: from B: z"]);

        let stripped = strip_annotations(&m);
        assert!(accept_all(&stripped, &stripped, ComparisonMode::Merge)
            .unwrap()
            .tree_eq(&stripped));
    }

    #[test]
    fn connective_taken_from_whichever_side_declares() {
        let a = policy("1 A\na) x\n");
        let b = policy("1 A\na) x\nConnection OR\n");
        let m = accept_all(&a, &b, ComparisonMode::Merge).unwrap();
        assert_eq!(m.roots[0].connective, Connective::Or);
    }

    #[test]
    fn acquire_returns_a() {
        let a = policy(A);
        let b = policy(B);
        let m = accept_all(&a, &b, ComparisonMode::Acquire).unwrap();
        assert_eq!(m, a);
    }

    #[test]
    fn rejected_verdict() {
        let a = policy(A);
        let b = policy(B);
        let report = compare(&a, &b, ComparisonMode::Merge);
        let verdict = evaluate(&report, &[AcceptanceRule::overall_over(90.0)]).unwrap();
        assert_eq!(
            merge(&a, &b, &report, &verdict, ComparisonMode::Merge),
            Err(MergeError::RejectedInput)
        );
        let accepted = evaluate(&report, &[]).unwrap();
        assert!(matches!(
            merge(&a, &b, &report, &accepted, ComparisonMode::Acquire),
            Err(MergeError::ModeMismatch { .. })
        ));
    }
}
