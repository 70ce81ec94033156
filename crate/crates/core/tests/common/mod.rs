//! Shared helpers for the integration test targets.
//!
//! `oracle` is a standalone transcription of the option-scoring equations that
//! deliberately shares no code with the library: it takes bare tuples, uses
//! its own keyword table and walks the option lists with plain nested loops.

#![allow(dead_code)]

pub mod oracle {
    /// One option as seen by the oracle: a phrase and an optional keyword name.
    pub type Opt<'a> = (&'a str, Option<&'a str>);

    pub fn value(keyword: Option<&str>) -> f64 {
        match keyword {
            None => 1.0,
            Some("MUST") => 1.0,
            Some("RECOMMENDED") => 0.8,
            Some("OPTIONAL") => 0.5,
            Some("NOT") => 0.0,
            Some(other) => panic!("oracle: unknown keyword {other}"),
        }
    }

    /// Score of one paragraph pair.
    ///
    /// `or` selects the OR connective (max of provisional scores); otherwise
    /// the AND formula is used with the merge or acquire denominator.
    #[allow(clippy::needless_range_loop)]
    pub fn score(a: &[Opt], b: &[Opt], or: bool, merge: bool) -> f64 {
        if a.is_empty() && b.is_empty() {
            return 100.0;
        }
        if a.is_empty() || b.is_empty() {
            return if merge { 0.0 } else { 100.0 };
        }

        // Provisional results O_jk * (1 - |v_j - v_k|), one per consumed pair.
        let mut taken = vec![false; b.len()];
        let mut provisional = Vec::new();
        for j in 0..a.len() {
            for k in 0..b.len() {
                if taken[k] {
                    continue;
                }
                let same = a[j].0.trim().to_lowercase() == b[k].0.trim().to_lowercase();
                if same {
                    taken[k] = true;
                    let o_jk = 100.0;
                    provisional.push(o_jk * (1.0 - (value(a[j].1) - value(b[k].1)).abs()));
                    break;
                }
            }
        }

        if or {
            let mut best = 0.0f64;
            for p in &provisional {
                if *p > best {
                    best = *p;
                }
            }
            best
        } else {
            let mut sum = 0.0;
            for p in &provisional {
                sum += p;
            }
            let denominator = if merge {
                if a.len() > b.len() {
                    a.len()
                } else {
                    b.len()
                }
            } else {
                a.len()
            };
            sum / denominator as f64
        }
    }
}

/// Every option list of length `0..=max_len` over the given phrases and
/// keywords (order matters).
pub fn all_option_lists<'a>(
    phrases: &[&'a str],
    keywords: &[&'a str],
    max_len: usize,
) -> Vec<Vec<(&'a str, &'a str)>> {
    let mut singles = Vec::new();
    for p in phrases {
        for k in keywords {
            singles.push((*p, *k));
        }
    }
    let mut out: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for list in &frontier {
            for s in &singles {
                let mut l = list.clone();
                l.push(*s);
                next.push(l);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// The two option lists of the worked connective example.
pub const EXAMPLE_A: &str = "\
1 EXAMPLE
  a) MUST a
  b) MUST b
  c) MUST c
";

pub const EXAMPLE_B: &str = "\
1 EXAMPLE
  a) RECOMMENDED a
  b) OPTIONAL b
  c) RECOMMENDED d
  d) RECOMMENDED e
";

/// Policy fragment used throughout the format documentation.
pub const SAMPLE_FRAGMENT: &str = "\
1 INTRODUCTION
1.1 Overview
//Gives an overview about the document
1.2 Document name and identification
a) RECOMMENDED Document name
b) MUST Designated identification
Connection AND
1.3 PKI participants
//Described in the subsections
1.3.1 Certification authorities
a) Issues certificates to end users
b) Issues certificates to other users
1.3.1.1 Root authorities
a) Specifies the difference to the CAs
1.3.2 Registration authorities
1.3.3 Subscribers
";

/// proptest strategies shared by the property and acceptance targets.
pub mod gen {
    use cpcompat::{Connective, Keyword, NumberPath, Paragraph, Policy, PolicyOption};
    use proptest::prelude::*;

    pub fn keyword() -> impl Strategy<Value = Option<Keyword>> {
        prop_oneof![
            1 => Just(None),
            4 => prop::sample::select(Keyword::ALL.to_vec()).prop_map(Some),
        ]
    }

    /// Options over a small phrase alphabet so that matches are frequent.
    pub fn option_list(max: usize) -> impl Strategy<Value = Vec<PolicyOption>> {
        prop::collection::vec(
            (
                keyword(),
                prop::sample::select(vec!["a", "b", "c", "A", "b  "]),
            ),
            0..=max,
        )
        .prop_map(|v| {
            v.into_iter()
                .map(|(k, p)| PolicyOption::new(None, k, p).unwrap())
                .collect()
        })
    }

    pub fn nonempty_option_list(max: usize) -> impl Strategy<Value = Vec<PolicyOption>> {
        option_list(max).prop_filter("needs options", |v| !v.is_empty())
    }

    pub fn connective() -> impl Strategy<Value = Connective> {
        prop::sample::select(vec![Connective::And, Connective::Or, Connective::None])
    }

    #[derive(Debug, Clone)]
    pub struct Node {
        pub title: String,
        pub weight: u32,
        pub options: Vec<(bool, Option<Keyword>, String)>,
        pub connective: Connective,
        pub comments: Vec<String>,
        pub gap: u32,
        pub children: Vec<Node>,
    }

    fn phrase() -> impl Strategy<Value = String> {
        "[a-z][a-z]{0,6}( [a-zA-Z]{1,6}){0,3}".prop_filter("not a connection line", |s| {
            !s.split_whitespace()
                .next()
                .unwrap()
                .eq_ignore_ascii_case("connection")
        })
    }

    fn node(depth: usize) -> BoxedStrategy<Node> {
        let title = if depth == 1 {
            "[A-Z]{1,8}( [A-Z]{1,5}){0,2}".boxed()
        } else {
            "[A-Z][a-z]{0,8}( [a-z]{1,6}){0,2}".boxed()
        };
        let children = if depth < 5 {
            prop::collection::vec(node(depth + 1), 0..3).boxed()
        } else {
            Just(Vec::new()).boxed()
        };
        (
            title,
            prop_oneof![3 => Just(1u32), 1 => 2u32..6],
            prop::collection::vec((any::<bool>(), keyword(), phrase()), 0..4),
            connective(),
            prop::collection::vec("//( ?[a-z]{1,5}){0,3}", 0..2),
            0u32..2,
            children,
        )
            .prop_map(
                |(title, weight, options, connective, comments, gap, children)| Node {
                    title,
                    weight,
                    options,
                    connective,
                    comments,
                    gap,
                    children,
                },
            )
            .boxed()
    }

    fn build(parent: Option<&NumberPath>, nodes: &[Node]) -> Vec<Paragraph> {
        let mut segment = 0;
        nodes
            .iter()
            .map(|n| {
                segment += 1 + n.gap;
                let path = match parent {
                    Some(p) => p.child(segment).unwrap(),
                    None => NumberPath::root(segment).unwrap(),
                };
                let mut p = Paragraph::new(path.clone(), n.title.clone());
                p.weight = n.weight;
                p.connective = n.connective;
                p.comments = n.comments.clone();
                p.options = n
                    .options
                    .iter()
                    .enumerate()
                    .map(|(i, (labelled, k, phrase))| {
                        let label = labelled.then(|| (b'a' + i as u8) as char);
                        PolicyOption::new(label, *k, phrase.clone()).unwrap()
                    })
                    .collect();
                p.children = build(Some(&path), &n.children);
                p
            })
            .collect()
    }

    /// Valid policies up to five levels deep.
    pub fn policy() -> impl Strategy<Value = Policy> {
        prop::collection::vec(node(1), 0..4)
            .prop_map(|roots| Policy::new("gen", build(None, &roots)))
    }
}
