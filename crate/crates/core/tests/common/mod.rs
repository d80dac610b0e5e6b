//! Generators and brute-force checks shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tcpel::classes::{ClassEnumerator, EquivalenceClass};
use tcpel::el::{entail, Entailment, InconsistencyPolicy};
use tcpel::io::{load_kb, KbDocument};
use tcpel::kb::{Atom, ConceptExpr, ElAxiom, MlnProgram, TcpKnowledgeBase};
use tcpel::mln::{GroundMln, World, DEFAULT_GROUNDING_CAP};
use tcpel::numeric::ExactSum;
use tcpel::oracle::{exact_rank_ground, ExactRanking};
use tcpel::rank::{RankConfig, Ranker, StopCondition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
const ROLES: [&str; 3] = ["r", "s", "t"];
const MLN_PREDS: [&str; 3] = ["m", "n", "o"];
const CONSTANTS: [&str; 3] = ["a", "b", "c"];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().unwrap()
}

fn rule_text(rng: &mut ChaCha8Rng) -> String {
    let (a, b, c) = (
        pick(rng, &CONCEPTS),
        pick(rng, &CONCEPTS),
        pick(rng, &CONCEPTS),
    );
    let (r, s, t) = (pick(rng, &ROLES), pick(rng, &ROLES), pick(rng, &ROLES));
    match rng.gen_range(0..9) {
        0 => format!("{a}(X) -> {b}(X)"),
        1 => format!("{a}(X) & {b}(X) -> {c}(X)"),
        2 => format!("{r}(X,Y) -> {a}(X)"),
        3 => format!("{r}(X,Y) -> {a}(Y)"),
        4 => format!("{r}(X,Y) -> {s}(X,Y)"),
        5 => format!("{r}(X,Y) & {s}(Y,Z) -> {t}(X,Z)"),
        6 => format!("{a}(X) -> exists Y.({r}(X,Y) & {b}(Y))"),
        7 => format!("{r}(X,Y) & {b}(Y) -> {c}(X)"),
        _ => format!("{a}(X) & {b}(X) -> false"),
    }
}

fn fact_text(rng: &mut ChaCha8Rng, constants: &[&str]) -> String {
    if rng.gen_bool(0.6) {
        format!("{}({})", pick(rng, &CONCEPTS), pick(rng, constants))
    } else {
        format!(
            "{}({},{})",
            pick(rng, &ROLES),
            pick(rng, constants),
            pick(rng, constants)
        )
    }
}

/// Annotation over distinct MLN predicates, so no two pairs unify.
fn annotation_text(
    rng: &mut ChaCha8Rng,
    preds: &[&str],
    constants: &[&str],
    var: Option<&str>,
) -> String {
    let k = rng.gen_range(1..=preds.len().min(2));
    let chosen: Vec<&str> = preds.choose_multiple(rng, k).copied().collect();
    let pairs: Vec<String> = chosen
        .iter()
        .map(|p| {
            let arg = match var {
                Some(v) if rng.gen_bool(0.7) => v.to_string(),
                _ => pick(rng, constants).to_string(),
            };
            format!("{p}({arg})={}", u8::from(rng.gen_bool(0.7)))
        })
        .collect();
    format!(" @ {{ {} }}", pairs.join(", "))
}

/// A valid random knowledge base with at most 10 ground atoms, 6 ground
/// formulas and 8 annotated axioms, together with its text.
pub fn random_rank_kb(rng: &mut ChaCha8Rng) -> (String, KbDocument, GroundMln) {
    loop {
        let constants: Vec<&str> = CONSTANTS[..rng.gen_range(2..=3)].to_vec();
        let preds: Vec<&str> = MLN_PREDS[..rng.gen_range(2..=3)].to_vec();
        let mut text = String::new();
        let n_axioms = rng.gen_range(3..=10);
        let mut annotated = 0;
        for _ in 0..n_axioms {
            let rule = rng.gen_bool(0.45);
            let body = if rule {
                rule_text(rng)
            } else {
                fact_text(rng, &constants)
            };
            text.push_str(&body);
            if annotated < 8 && rng.gen_bool(0.7) {
                annotated += 1;
                let var = rule.then_some("X");
                text.push_str(&annotation_text(rng, &preds, &constants, var));
            }
            text.push_str(".\n");
        }
        text.push_str(&format!("mln {{\n  const {}.\n", constants.join(" ")));
        for _ in 0..rng.gen_range(2..=5) {
            let k = rng.gen_range(1..=2);
            let atoms: Vec<String> = (0..k)
                .map(|_| {
                    let arg = if rng.gen_bool(0.3) {
                        "X"
                    } else {
                        pick(rng, &constants)
                    };
                    format!("{}({arg})", pick(rng, &preds))
                })
                .collect();
            let w = f64::from(rng.gen_range(-25..=25)) / 10.0;
            text.push_str(&format!("  {w} {}.\n", atoms.join(" & ")));
        }
        text.push_str("}\n");
        let Ok(doc) = load_kb(&text) else { continue };
        let Ok(g) = GroundMln::from_kb(&doc.kb, DEFAULT_GROUNDING_CAP) else {
            continue;
        };
        if g.n() == 0 || g.n() > 10 || g.formulas().len() > 6 {
            continue;
        }
        return (text, doc, g);
    }
}

pub fn random_kb(seed: u64) -> (String, KbDocument, GroundMln) {
    random_rank_kb(&mut rng(seed))
}

/// A random conjunctive ground network with at most `max_atoms` atoms.
pub fn random_class_mln(rng: &mut ChaCha8Rng, max_atoms: usize, max_formulas: usize) -> GroundMln {
    loop {
        let k = rng.gen_range(1..=4);
        let constants: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let preds = ["p", "q", "u"];
        let mut program = MlnProgram::new().with_constants(constants.clone());
        for _ in 0..rng.gen_range(1..=5) {
            let len = rng.gen_range(1..=3);
            let atoms: Vec<Atom> = (0..len)
                .map(|_| {
                    let p = pick(rng, &preds);
                    let arg = if rng.gen_bool(0.25) {
                        ["X", "Y"].choose(rng).unwrap().to_string()
                    } else {
                        constants.choose(rng).unwrap().clone()
                    };
                    Atom::parse_args(p, &[arg.as_str()])
                })
                .collect();
            let w = f64::from(rng.gen_range(-30..=30)) / 10.0;
            program = program.with_formula(w, atoms);
        }
        let kb = TcpKnowledgeBase::new(Vec::new(), program);
        let Ok(g) = GroundMln::from_kb(&kb, DEFAULT_GROUNDING_CAP) else {
            continue;
        };
        if g.n() <= max_atoms && !g.formulas().is_empty() && g.formulas().len() <= max_formulas {
            return g;
        }
    }
}

fn mask_of(g: &GroundMln, w: &World) -> Vec<bool> {
    let mut mask = vec![false; g.formulas().len()];
    for j in g.satisfied_formulas(w).unwrap() {
        mask[j] = true;
    }
    mask
}

fn masks(m: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << m).map(move |k| (0..m).map(|j| k >> (m - 1 - j) & 1 == 1).collect())
}

/// Every class of `g` against exhaustive enumeration: emptiness, members,
/// the partition of all worlds, scores, and the best-first order.
pub fn check_classes(g: &GroundMln) -> Result<(), String> {
    let n = g.n();
    let mut by_mask: BTreeMap<Vec<bool>, BTreeSet<World>> = BTreeMap::new();
    for k in 0..1u64 << n {
        let w = World::from_index(n, k);
        by_mask.entry(mask_of(g, &w)).or_default().insert(w);
    }
    let mut covered = 0u64;
    for mask in masks(g.formulas().len()) {
        let class = EquivalenceClass::from_mask(mask.clone(), g);
        let brute = by_mask.get(&mask).cloned().unwrap_or_default();
        if class.is_empty() != brute.is_empty() {
            return Err(format!(
                "mask {}: is_empty={} but brute force has {} members",
                class.mask_string(),
                class.is_empty(),
                brute.len()
            ));
        }
        let listed: Vec<World> = class.members().collect();
        let set: BTreeSet<World> = listed.iter().cloned().collect();
        if set.len() != listed.len() {
            return Err(format!("mask {}: duplicate members", class.mask_string()));
        }
        if set != brute {
            return Err(format!(
                "mask {}: {} members listed, {} expected",
                class.mask_string(),
                set.len(),
                brute.len()
            ));
        }
        let expected_score: f64 = {
            let mut s = ExactSum::new();
            for (f, &on) in g.formulas().iter().zip(&mask) {
                if on {
                    s.add(f.weight);
                }
            }
            s.value()
        };
        if class.log_score != expected_score {
            return Err(format!(
                "mask {}: score {} != {}",
                class.mask_string(),
                class.log_score,
                expected_score
            ));
        }
        covered += set.len() as u64;
    }
    if covered != 1 << n {
        return Err(format!("classes cover {covered} of {} worlds", 1u64 << n));
    }
    let emitted: Vec<EquivalenceClass> = ClassEnumerator::new(g).collect();
    if emitted.len() != 1 << g.formulas().len() {
        return Err(format!("enumerator emitted {} classes", emitted.len()));
    }
    let distinct: BTreeSet<Vec<bool>> = emitted.iter().map(|c| c.mask.clone()).collect();
    if distinct.len() != emitted.len() {
        return Err("enumerator repeated a class".into());
    }
    if emitted.windows(2).any(|p| p[0].log_score < p[1].log_score) {
        return Err("enumerator order is not best-first".into());
    }
    Ok(())
}

pub fn ranker_config(policy: InconsistencyPolicy) -> RankConfig {
    RankConfig {
        policy,
        ..RankConfig::default()
    }
}

pub fn policy_for(seed: u64) -> InconsistencyPolicy {
    if seed % 3 == 2 {
        InconsistencyPolicy::Skip
    } else {
        InconsistencyPolicy::Explode
    }
}

/// A complete anytime run against exact enumeration: normalized scores
/// within `rel_tol` relative and the same order.
pub fn check_oracle_equivalence(
    doc: &KbDocument,
    g: &GroundMln,
    policy: InconsistencyPolicy,
    rel_tol: f64,
) -> Result<(), String> {
    let exact = exact_rank_ground(&doc.kb, g, policy, 20).map_err(|e| e.to_string())?;
    let result = Ranker::new(&doc.kb, g, ranker_config(policy)).run(&StopCondition::none());
    if !result.complete {
        return Err("run did not complete".into());
    }
    let z = exact.log_z.exp();
    let ours: Vec<String> = result.order().map(|a| a.to_string()).collect();
    let theirs: Vec<String> = exact.atoms.iter().map(|a| a.atom.to_string()).collect();
    if ours != theirs {
        return Err(format!("order {ours:?} != {theirs:?}"));
    }
    for s in &result.scores {
        let p = exact.probability(&s.atom);
        let q = s.score / z;
        if (q - p).abs() > rel_tol * p.abs().max(f64::MIN_POSITIVE) {
            return Err(format!("{}: score/Z = {q} but probability {p}", s.atom));
        }
    }
    Ok(())
}

fn probability(exact: &ExactRanking, atom: &tcpel::kb::GroundAtom) -> f64 {
    exact.probability(atom)
}

/// At every prefix of a full run: the unassigned mass is at most `U`, `U`
/// never grows, and every certified pair agrees with the exact probabilities.
pub fn check_bounds(
    doc: &KbDocument,
    g: &GroundMln,
    policy: InconsistencyPolicy,
    tight: bool,
) -> Result<(), String> {
    let exact = exact_rank_ground(&doc.kb, g, policy, 20).map_err(|e| e.to_string())?;
    let z = exact.log_z.exp();
    let config = RankConfig {
        tight_bound: tight,
        ..ranker_config(policy)
    };
    let mut ranker = Ranker::new(&doc.kb, g, config);
    let mut assigned = ExactSum::new();
    let mut prev_u = f64::INFINITY;
    loop {
        let snap = ranker.snapshot();
        let u = snap.unassigned_bound;
        if u > prev_u {
            return Err(format!(
                "U grew from {prev_u} to {u} after {} worlds",
                snap.worlds_analyzed
            ));
        }
        prev_u = u;
        let remaining = z - assigned.value();
        if remaining > u + 1e-12 * z {
            return Err(format!(
                "remaining mass {remaining} exceeds U = {u} after {} worlds",
                snap.worlds_analyzed
            ));
        }
        for pair in &snap.provable_pairs {
            let (ph, pl) = (
                probability(&exact, &pair.higher),
                probability(&exact, &pair.lower),
            );
            let slack = 1e-12 * ph.max(pl);
            let ok = if pair.strict {
                ph - pl > -slack && (ph > pl || (ph - pl).abs() <= slack)
            } else {
                ph >= pl - slack
            };
            if !ok {
                return Err(format!(
                    "pair {} over {} (strict={}) contradicts probabilities {ph} and {pl}",
                    pair.higher, pair.lower, pair.strict
                ));
            }
        }
        match ranker.step() {
            Some(w) => assigned.add(g.world_log_score(&w).unwrap().exp()),
            None => break,
        }
    }
    if ranker.worlds_analyzed() != 1u128 << g.n() {
        return Err(format!("run analyzed {} worlds", ranker.worlds_analyzed()));
    }
    Ok(())
}

/// A hand-built ontology exercising one completion rule, with its
/// consequences derived by hand. `None` means inconsistent.
pub struct RuleCase {
    pub name: &'static str,
    pub axioms: Vec<ElAxiom>,
    pub expected: Option<Vec<&'static str>>,
}

fn parsed(text: &str) -> Vec<ElAxiom> {
    let doc = load_kb(text).unwrap_or_else(|e| panic!("{e:?}"));
    doc.kb.axioms.into_iter().map(|a| a.axiom).collect()
}

pub fn rule_cases() -> Vec<RuleCase> {
    vec![
        // A(a), A ⊑ B, B ⊑ C: a climbs the hierarchy.
        RuleCase {
            name: "hierarchy",
            axioms: parsed("A(X) -> B(X). B(X) -> C(X). A(a)."),
            expected: Some(vec!["A(a)", "B(a)", "C(a)"]),
        },
        // only a has both conjuncts.
        RuleCase {
            name: "conjunction",
            axioms: parsed("A(X) & B(X) -> C(X). A(a). B(a). A(b)."),
            expected: Some(vec!["A(a)", "B(a)", "C(a)", "A(b)"]),
        },
        // A ⊑ ∃r.B and ∃r.B ⊑ C give C(a) through an anonymous successor.
        RuleCase {
            name: "existential on the right",
            axioms: parsed("A(X) -> exists Y.(r(X,Y) & B(Y)). r(X,Y) & B(Y) -> C(X). A(a)."),
            expected: Some(vec!["A(a)", "C(a)"]),
        },
        // named successor b is a B, so a is a C; b has no r-successor.
        RuleCase {
            name: "existential on the left",
            axioms: parsed("r(X,Y) & B(Y) -> C(X). r(a,b). B(b). r(b,a)."),
            expected: Some(vec!["r(a,b)", "B(b)", "C(a)", "r(b,a)"]),
        },
        // r ⊑ s ⊑ t.
        RuleCase {
            name: "role hierarchy",
            axioms: parsed("r(X,Y) -> s(X,Y). s(X,Y) -> t(X,Y). r(a,b)."),
            expected: Some(vec!["r(a,b)", "s(a,b)", "t(a,b)"]),
        },
        // r ∘ r ⊑ r over a chain of three edges.
        RuleCase {
            name: "role composition",
            axioms: parsed("r(X,Y) & r(Y,Z) -> r(X,Z). r(a,b). r(b,c). r(c,d)."),
            expected: Some(vec![
                "r(a,b)", "r(b,c)", "r(c,d)", "r(a,c)", "r(b,d)", "r(a,d)",
            ]),
        },
        // domain of r and of its subrole s.
        RuleCase {
            name: "domain restriction",
            axioms: parsed("r(X,Y) -> A(X). s(X,Y) -> r(X,Y). s(b,c)."),
            expected: Some(vec!["s(b,c)", "r(b,c)", "A(b)"]),
        },
        // the range reaches the named successor b and the anonymous one of c.
        RuleCase {
            name: "range restriction",
            axioms: parsed(
                "r(X,Y) -> B(Y). A(X) -> exists Y.(r(X,Y)). r(X,Y) & B(Y) -> C(X). r(a,b). A(c).",
            ),
            expected: Some(vec!["r(a,b)", "B(b)", "C(a)", "A(c)", "C(c)"]),
        },
        // the anonymous successor of a is both B and C, which is unsatisfiable.
        RuleCase {
            name: "bottom propagation",
            axioms: parsed(
                "A(X) -> exists Y.(r(X,Y) & B(Y)). B(X) -> C(X). B(X) & C(X) -> false. A(a).",
            ),
            expected: None,
        },
        // A ⊑ {o} makes a equal to o, so B(o) carries over to a and A(a) to o.
        RuleCase {
            name: "nominal instance",
            axioms: vec![
                ElAxiom::gci(ConceptExpr::atomic("A"), ConceptExpr::nominal("o")),
                ElAxiom::concept_assertion("A", "a"),
                ElAxiom::concept_assertion("B", "o"),
            ],
            expected: Some(vec!["A(a)", "B(a)", "A(o)", "B(o)"]),
        },
    ]
}

pub fn check_rule_case(case: &RuleCase) -> Result<(), String> {
    let got = match entail(&case.axioms) {
        Entailment::Consistent(atoms) => Some(
            atoms
                .iter()
                .map(|a| a.to_string())
                .collect::<BTreeSet<String>>(),
        ),
        Entailment::Inconsistent => None,
    };
    let want = case.expected.as_ref().map(|v| {
        v.iter()
            .map(|s| s.to_string())
            .collect::<BTreeSet<String>>()
    });
    if got == want {
        Ok(())
    } else {
        Err(format!("{}: got {got:?}, expected {want:?}", case.name))
    }
}
