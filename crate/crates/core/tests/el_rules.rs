//! Completion rules: hand-derived consequence sets, and random Horn
//! ontologies against a depth-bounded Skolem chase.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use tcpel::el::{entail, Entailment};
use tcpel::io::load_kb;

#[test]
fn hand_derived_rule_cases() {
    let cases = common::rule_cases();
    assert_eq!(cases.len(), 10);
    for case in &cases {
        if let Err(e) = common::check_rule_case(case) {
            panic!("{e}");
        }
    }
}

#[derive(Debug, Clone)]
enum Rule {
    Sub(usize, usize),
    Conj(usize, usize, usize),
    Domain(usize, usize),
    Range(usize, usize),
    RoleSub(usize, usize),
    Compose(usize, usize, usize),
    SomeRight(usize, usize, usize),
    SomeLeft(usize, usize, usize),
    Disjoint(usize, usize),
}

#[derive(Debug, Clone)]
enum Fact {
    Concept(usize, usize),
    Role(usize, usize, usize),
}

const C: [&str; 4] = ["A", "B", "C", "D"];
const R: [&str; 3] = ["r", "s", "t"];
const I: [&str; 3] = ["a", "b", "c"];

fn rule_strategy() -> impl Strategy<Value = Rule> {
    let c = || 0..C.len();
    let r = || 0..R.len();
    prop_oneof![
        (c(), c()).prop_map(|(a, b)| Rule::Sub(a, b)),
        (c(), c(), c()).prop_map(|(a, b, d)| Rule::Conj(a, b, d)),
        (r(), c()).prop_map(|(r, a)| Rule::Domain(r, a)),
        (r(), c()).prop_map(|(r, a)| Rule::Range(r, a)),
        (r(), r()).prop_map(|(r, s)| Rule::RoleSub(r, s)),
        (r(), r(), r()).prop_map(|(r, s, t)| Rule::Compose(r, s, t)),
        (c(), r(), c()).prop_map(|(a, r, b)| Rule::SomeRight(a, r, b)),
        (r(), c(), c()).prop_map(|(r, b, d)| Rule::SomeLeft(r, b, d)),
        (c(), c()).prop_map(|(a, b)| Rule::Disjoint(a, b)),
    ]
}

fn fact_strategy() -> impl Strategy<Value = Fact> {
    prop_oneof![
        (0..C.len(), 0..I.len()).prop_map(|(a, i)| Fact::Concept(a, i)),
        (0..R.len(), 0..I.len(), 0..I.len()).prop_map(|(r, i, j)| Fact::Role(r, i, j)),
    ]
}

fn render(rules: &[Rule], facts: &[Fact]) -> String {
    let mut out = String::new();
    for rule in rules {
        let line = match *rule {
            Rule::Sub(a, b) => format!("{}(X) -> {}(X)", C[a], C[b]),
            Rule::Conj(a, b, d) => format!("{}(X) & {}(X) -> {}(X)", C[a], C[b], C[d]),
            Rule::Domain(r, a) => format!("{}(X,Y) -> {}(X)", R[r], C[a]),
            Rule::Range(r, a) => format!("{}(X,Y) -> {}(Y)", R[r], C[a]),
            Rule::RoleSub(r, s) => format!("{}(X,Y) -> {}(X,Y)", R[r], R[s]),
            Rule::Compose(r, s, t) => format!("{}(X,Y) & {}(Y,Z) -> {}(X,Z)", R[r], R[s], R[t]),
            Rule::SomeRight(a, r, b) => {
                format!("{}(X) -> exists Y.({}(X,Y) & {}(Y))", C[a], R[r], C[b])
            }
            Rule::SomeLeft(r, b, d) => format!("{}(X,Y) & {}(Y) -> {}(X)", R[r], C[b], C[d]),
            Rule::Disjoint(a, b) => format!("{}(X) & {}(X) -> false", C[a], C[b]),
        };
        out.push_str(&line);
        out.push_str(".\n");
    }
    for fact in facts {
        let line = match *fact {
            Fact::Concept(a, i) => format!("{}({})", C[a], I[i]),
            Fact::Role(r, i, j) => format!("{}({},{})", R[r], I[i], I[j]),
        };
        out.push_str(&line);
        out.push_str(".\n");
    }
    out
}

/// Forward chaining with one Skolem successor per existential rule and
/// element, cut off at `depth`. Returns `None` on a clash, otherwise the
/// atoms over named individuals.
fn chase(rules: &[Rule], facts: &[Fact], depth: usize) -> Option<BTreeSet<String>> {
    let mut level: BTreeMap<String, usize> = BTreeMap::new();
    let mut concepts: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut roles: BTreeSet<(usize, String, String)> = BTreeSet::new();
    for f in facts {
        match *f {
            Fact::Concept(a, i) => {
                level.insert(I[i].into(), 0);
                concepts.insert((a, I[i].into()));
            }
            Fact::Role(r, i, j) => {
                level.insert(I[i].into(), 0);
                level.insert(I[j].into(), 0);
                roles.insert((r, I[i].into(), I[j].into()));
            }
        }
    }
    loop {
        let mut new_c: Vec<(usize, String)> = Vec::new();
        let mut new_r: Vec<(usize, String, String)> = Vec::new();
        let has = |a: usize, x: &str| concepts.contains(&(a, x.to_string()));
        for (k, rule) in rules.iter().enumerate() {
            match *rule {
                Rule::Sub(a, b) => {
                    new_c.extend(
                        concepts
                            .iter()
                            .filter(|(c, _)| *c == a)
                            .map(|(_, x)| (b, x.clone())),
                    );
                }
                Rule::Conj(a, b, d) => {
                    new_c.extend(
                        concepts
                            .iter()
                            .filter(|(c, x)| *c == a && has(b, x))
                            .map(|(_, x)| (d, x.clone())),
                    );
                }
                Rule::Domain(r, a) => {
                    new_c.extend(roles.iter().filter(|e| e.0 == r).map(|e| (a, e.1.clone())))
                }
                Rule::Range(r, a) => {
                    new_c.extend(roles.iter().filter(|e| e.0 == r).map(|e| (a, e.2.clone())))
                }
                Rule::RoleSub(r, s) => new_r.extend(
                    roles
                        .iter()
                        .filter(|e| e.0 == r)
                        .map(|e| (s, e.1.clone(), e.2.clone())),
                ),
                Rule::Compose(r, s, t) => {
                    for e in roles.iter().filter(|e| e.0 == r) {
                        for f in roles.iter().filter(|f| f.0 == s && f.1 == e.2) {
                            new_r.push((t, e.1.clone(), f.2.clone()));
                        }
                    }
                }
                Rule::SomeRight(a, r, b) => {
                    for (_, x) in concepts.iter().filter(|(c, _)| *c == a) {
                        let d = level[x];
                        if d >= depth {
                            continue;
                        }
                        let null = format!("_{k}<{x}>");
                        level.entry(null.clone()).or_insert(d + 1);
                        new_r.push((r, x.clone(), null.clone()));
                        new_c.push((b, null));
                    }
                }
                Rule::SomeLeft(r, b, d) => {
                    new_c.extend(
                        roles
                            .iter()
                            .filter(|e| e.0 == r && has(b, &e.2))
                            .map(|e| (d, e.1.clone())),
                    );
                }
                Rule::Disjoint(a, b) => {
                    if concepts.iter().any(|(c, x)| *c == a && has(b, x)) {
                        return None;
                    }
                }
            }
        }
        let before = concepts.len() + roles.len();
        concepts.extend(new_c);
        roles.extend(new_r);
        if concepts.len() + roles.len() == before {
            break;
        }
    }
    let named = |x: &str| !x.starts_with('_');
    let mut out: BTreeSet<String> = concepts
        .iter()
        .filter(|(_, x)| named(x))
        .map(|(a, x)| format!("{}({x})", C[*a]))
        .collect();
    out.extend(
        roles
            .iter()
            .filter(|(_, x, y)| named(x) && named(y))
            .map(|(r, x, y)| format!("{}({x},{y})", R[*r])),
    );
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn saturation_agrees_with_bounded_chase(
        rules in prop::collection::vec(rule_strategy(), 0..7),
        facts in prop::collection::vec(fact_strategy(), 1..6),
    ) {
        let text = render(&rules, &facts);
        let doc = load_kb(&text);
        prop_assume!(doc.is_ok());
        let axioms: Vec<_> = doc.unwrap().kb.axioms.into_iter().map(|a| a.axiom).collect();
        let got = match entail(&axioms) {
            Entailment::Consistent(atoms) => Some(atoms.iter().map(|a| a.to_string()).collect::<BTreeSet<_>>()),
            Entailment::Inconsistent => None,
        };
        let want = chase(&rules, &facts, 6);
        prop_assert_eq!(got, want, "{}", text);
    }
}
