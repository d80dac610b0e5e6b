mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;

use tcpel::el::InconsistencyPolicy;
use tcpel::io::{load_kb, parse_kb, report};
use tcpel::mln::GroundMln;
use tcpel::oracle::exact_rank_ground;
use tcpel::rank::{
    anytime_rank, provable_partial_order, provable_partial_order_log, RankConfig, RankError,
    Ranker, StopCondition,
};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name),
    )
    .unwrap()
}

#[test]
fn complete_runs_match_the_oracle_under_both_policies() {
    for seed in 1000..1150 {
        let (text, doc, g) = common::random_kb(seed);
        for policy in [InconsistencyPolicy::Explode, InconsistencyPolicy::Skip] {
            if let Err(e) = common::check_oracle_equivalence(&doc, &g, policy, 1e-9) {
                panic!("seed {seed} {policy:?}: {e}\n{text}");
            }
        }
    }
}

#[test]
fn tight_and_loose_bounds_are_sound_at_every_prefix() {
    for seed in 2000..2100 {
        let (text, doc, g) = common::random_kb(seed);
        for tight in [false, true] {
            if let Err(e) = common::check_bounds(&doc, &g, common::policy_for(seed), tight) {
                panic!("seed {seed} tight={tight}: {e}\n{text}");
            }
        }
    }
}

#[test]
fn tight_bound_never_exceeds_the_loose_one() {
    for seed in 3000..3060 {
        let (_, doc, g) = common::random_kb(seed);
        let mut loose = Ranker::new(&doc.kb, &g, RankConfig::default());
        let mut tight = Ranker::new(
            &doc.kb,
            &g,
            RankConfig {
                tight_bound: true,
                ..RankConfig::default()
            },
        );
        loop {
            assert!(
                tight.log_unassigned_bound() <= loose.log_unassigned_bound(),
                "seed {seed}"
            );
            let (a, b) = (loose.step(), tight.step());
            assert_eq!(
                a, b,
                "seed {seed}: both runs visit worlds in the same order"
            );
            if a.is_none() {
                break;
            }
        }
    }
}

#[test]
fn scores_only_grow_and_reach_the_oracle() {
    let (_, doc, g) = common::random_kb(42);
    let exact = exact_rank_ground(&doc.kb, &g, InconsistencyPolicy::Explode, 20).unwrap();
    let mut ranker = Ranker::new(&doc.kb, &g, RankConfig::default());
    let mut prev = ranker.snapshot();
    while ranker.step().is_some() {
        let snap = ranker.snapshot();
        for s in &prev.scores {
            assert!(snap.score_of(&s.atom) >= s.score);
        }
        prev = snap;
    }
    assert!(prev.complete);
    assert_eq!(prev.unassigned_bound, 0.0);
    let z = exact.log_z.exp();
    for a in &exact.atoms {
        let got = prev.score_of(&a.atom) / z;
        assert!((got - a.probability).abs() <= 1e-12 * a.probability.max(1e-300));
    }
}

#[test]
fn stop_conditions_are_respected() {
    let doc = load_kb(&fixture("conditioned_rule.tcpkb")).unwrap();
    let g = GroundMln::from_kb(&doc.kb, 1_000).unwrap();
    let run = |stop: StopCondition| Ranker::new(&doc.kb, &g, RankConfig::default()).run(&stop);

    let zero = run(StopCondition::worlds(0));
    assert_eq!(zero.worlds_analyzed, 0);
    assert!(zero.scores.is_empty());
    assert!((zero.log_unassigned_bound - (64f64.ln() + 6.9)).abs() < 1e-12);

    let ten = run(StopCondition::worlds(10));
    assert_eq!(ten.worlds_analyzed, 10);
    assert!(!ten.complete);

    let three = run(StopCondition::classes(3));
    assert_eq!(three.classes_analyzed, 3);

    let target = 200.0;
    let bounded = run(StopCondition {
        target_bound: Some(target),
        ..StopCondition::none()
    });
    assert!(bounded.unassigned_bound <= target);
    let earlier = run(StopCondition::worlds(bounded.worlds_analyzed - 1));
    assert!(earlier.unassigned_bound > target);

    let all = run(StopCondition::none());
    assert!(all.complete);
    assert_eq!(all.worlds_analyzed, 64);
    assert_eq!(all.classes_analyzed, 64);

    let timed = run(StopCondition {
        max_seconds: Some(60.0),
        ..StopCondition::none()
    });
    assert_eq!(timed.scores, all.scores);
}

#[test]
fn invalid_knowledge_bases_are_rejected() {
    let doc = parse_kb(&fixture("bad.tcpkb")).unwrap();
    let err = anytime_rank(&doc.kb, &StopCondition::none(), &RankConfig::default()).unwrap_err();
    assert!(
        matches!(err, RankError::Invalid(ref v) if !v.is_empty()),
        "{err}"
    );

    let doc = load_kb(&fixture("form_labeling.tcpkb")).unwrap();
    let config = RankConfig {
        grounding_cap: 2,
        ..RankConfig::default()
    };
    let err = anytime_rank(&doc.kb, &StopCondition::none(), &config).unwrap_err();
    assert!(matches!(err, RankError::Grounding(_)), "{err}");
}

#[test]
fn inconsistent_worlds_feed_the_bottom_mass() {
    let doc = load_kb(&fixture("chain.tcpkb")).unwrap();
    let g = GroundMln::from_kb(&doc.kb, 1_000).unwrap();
    let text =
        "A(X) & B(X) -> false.\nA(a) @ { m(a)=1 }.\nB(a).\nmln {\n  const a.\n  1.0 m(a).\n}\n";
    let bot = load_kb(text).unwrap();
    let bg = GroundMln::from_kb(&bot.kb, 1_000).unwrap();
    let exact = exact_rank_ground(&bot.kb, &bg, InconsistencyPolicy::Explode, 20).unwrap();
    let r = Ranker::new(&bot.kb, &bg, RankConfig::default()).run(&StopCondition::none());
    let z = exact.log_z.exp();
    assert_eq!(r.inconsistent_worlds, 1);
    assert!((r.bottom_mass / z - exact.bottom_probability).abs() < 1e-12);
    assert!((exact.bottom_probability - 1f64.exp() / (1.0 + 1f64.exp())).abs() < 1e-12);
    // under explode the clash world also credits every atom of the signature
    assert!(
        r.score_of(&tcpel::kb::GroundAtom::new("B", ["a"]))
            > r.score_of(&tcpel::kb::GroundAtom::new("A", ["a"]))
    );

    let skip = Ranker::new(
        &bot.kb,
        &bg,
        RankConfig {
            policy: InconsistencyPolicy::Skip,
            ..RankConfig::default()
        },
    )
    .run(&StopCondition::none());
    assert_eq!(skip.score_of(&tcpel::kb::GroundAtom::new("A", ["a"])), 0.0);
    assert!((skip.bottom_mass - r.bottom_mass).abs() == 0.0);

    let chain = Ranker::new(&doc.kb, &g, RankConfig::default()).run(&StopCondition::none());
    assert_eq!(chain.inconsistent_worlds, 0);
    assert!(chain.order().any(|a| a.to_string() == "Motorized(car)"));
}

#[test]
fn tsv_reports_round_trip_bit_for_bit() {
    let (_, doc, g) = common::random_kb(5);
    let r = Ranker::new(&doc.kb, &g, RankConfig::default()).run(&StopCondition::worlds(7));
    let rows = report::parse_tsv(&report::ranking_tsv(&r)).unwrap();
    assert_eq!(rows.len(), r.scores.len());
    for (row, s) in rows.iter().zip(&r.scores) {
        assert_eq!(row.0, s.atom.to_string());
        assert_eq!(row.1.to_bits(), s.score.to_bits());
        assert_eq!(row.2.to_bits(), s.log_score.to_bits());
    }
    let json: serde_json::Value = serde_json::from_str(&report::ranking_json(
        &r,
        &StopCondition::worlds(7),
        &RankConfig::default(),
    ))
    .unwrap();
    assert_eq!(json["s"], 7);
    assert_eq!(
        json["U"].as_f64().unwrap().to_bits(),
        r.unassigned_bound.to_bits()
    );
    assert_eq!(json["order"].as_array().unwrap().len(), r.scores.len());
}

fn pairs_by_definition(scores: &[(usize, f64)], u: f64) -> BTreeSet<(usize, usize, bool)> {
    let mut out = BTreeSet::new();
    for &(a, sa) in scores {
        for &(b, sb) in scores {
            if a != b && sb + u <= sa {
                out.insert((a, b, sb + u < sa));
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn provable_order_follows_its_definition(
        raw in prop::collection::vec(0u32..200, 1..12),
        u in 0u32..100,
    ) {
        let scores: Vec<(usize, f64)> = raw.iter().enumerate().map(|(i, &s)| (i, f64::from(s))).collect();
        let u = f64::from(u);
        let got: BTreeSet<(usize, usize, bool)> =
            provable_partial_order(&scores, u).into_iter().map(|p| (p.higher, p.lower, p.strict)).collect();
        prop_assert_eq!(&got, &pairs_by_definition(&scores, u));
    }

    #[test]
    fn log_space_order_agrees_on_separated_scores(
        raw in prop::collection::vec(1u32..1000, 1..10),
        u in 1u32..300,
    ) {
        let scores: Vec<(usize, f64)> = raw.iter().enumerate().map(|(i, &s)| (i, f64::from(s))).collect();
        let logs: Vec<(usize, f64)> = scores.iter().map(|&(i, s)| (i, s.ln())).collect();
        let u = f64::from(u);
        let lin: BTreeSet<(usize, usize)> = provable_partial_order(&scores, u)
            .into_iter()
            .filter(|p| p.strict)
            .map(|p| (p.higher, p.lower))
            .collect();
        let log: BTreeSet<(usize, usize)> = provable_partial_order_log(&logs, u.ln())
            .into_iter()
            .filter(|p| p.strict)
            .map(|p| (p.higher, p.lower))
            .collect();
        // integer inputs: strict pairs have a gap of at least one
        let safe: BTreeSet<(usize, usize)> = lin
            .iter()
            .copied()
            .filter(|&(a, b)| scores[a].1 - scores[b].1 - u >= 1.0)
            .collect();
        prop_assert!(safe.is_subset(&log));
        prop_assert!(log.is_subset(&lin.union(&pairs_by_definition(&scores, u).iter().map(|p| (p.0, p.1)).collect()).copied().collect()));
    }
}
