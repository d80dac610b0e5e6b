//! Anytime ranking of atomic consequences: classes are consumed best-first,
//! every member world contributes its score to the atoms its induced
//! ontology entails, and an upper bound on the mass not yet distributed
//! certifies part of the final order at any point.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::iter::Peekable;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::binding::induce_ontology;
use crate::classes::{ClassEnumerator, EquivalenceClass, Members};
use crate::el::{atom_universe, entail, Entailment, InconsistencyPolicy};
use crate::kb::{validate_kb, ElAxiom, GroundAtom, Item, TcpKnowledgeBase, Violation};
use crate::mln::{GroundMln, MlnError, World, DEFAULT_GROUNDING_CAP};
use crate::numeric::{ln_remaining_worlds, log_add_exp, ScaledExpSum};

/// Saturation results kept before the memo is flushed.
const MEMO_LIMIT: usize = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum RankError {
    #[error("knowledge base is invalid: {}", .0.iter().map(|(i, v)| format!("{i:?}: {v}")).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<(Item, Violation)>),
    #[error(transparent)]
    Grounding(#[from] MlnError),
}

/// When to stop an anytime run. All fields unset means run to completion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StopCondition {
    pub max_classes: Option<u128>,
    pub max_worlds: Option<u128>,
    pub max_seconds: Option<f64>,
    /// Stop once the unassigned-mass bound is at most this value.
    pub target_bound: Option<f64>,
}

impl StopCondition {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn classes(n: u128) -> Self {
        Self {
            max_classes: Some(n),
            ..Self::default()
        }
    }

    pub fn worlds(n: u128) -> Self {
        Self {
            max_worlds: Some(n),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankConfig {
    pub policy: InconsistencyPolicy,
    /// Bound remaining mass by the next non-empty class instead of the next class.
    pub tight_bound: bool,
    pub grounding_cap: u128,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self {
            policy: InconsistencyPolicy::Explode,
            tight_bound: false,
            grounding_cap: DEFAULT_GROUNDING_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomScore {
    pub atom: GroundAtom,
    pub score: f64,
    pub log_score: f64,
}

/// `higher` is at least as probable as `lower`; strictly more if `strict`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvablePair<L> {
    pub higher: L,
    pub lower: L,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    /// Atoms with a positive score, by descending score then canonical order.
    pub scores: Vec<AtomScore>,
    pub worlds_analyzed: u128,
    pub classes_analyzed: u128,
    pub unassigned_bound: f64,
    pub log_unassigned_bound: f64,
    pub provable_pairs: Vec<ProvablePair<GroundAtom>>,
    /// Score of worlds whose induced ontology is inconsistent.
    pub bottom_mass: f64,
    pub inconsistent_worlds: u128,
    pub n_atoms: usize,
    pub n_formulas: usize,
    pub max_log_score: f64,
    /// Every world was analyzed; scores are `Z · Pr(a)`.
    pub complete: bool,
    pub elapsed_seconds: f64,
}

impl RankingResult {
    pub fn order(&self) -> impl Iterator<Item = &GroundAtom> {
        self.scores.iter().map(|s| &s.atom)
    }

    pub fn score_of(&self, atom: &GroundAtom) -> f64 {
        self.scores
            .iter()
            .find(|s| &s.atom == atom)
            .map_or(0.0, |s| s.score)
    }
}

/// `(2^n − s) · exp(log_score)`, in log space.
pub fn log_unassigned_bound(n: usize, s: u128, log_score: f64) -> f64 {
    let remaining = ln_remaining_worlds(n, s);
    if remaining == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        remaining + log_score
    }
}

/// Upper bound on the total score of the worlds not yet analyzed.
pub fn unassigned_bound(n: usize, s: u128, log_score: f64) -> f64 {
    log_unassigned_bound(n, s, log_score).exp()
}

/// Pairs certified by the bound `u`: `b` is below `a` when `s_b + u ≤ s_a`,
/// strictly when `s_b + u < s_a`. An atom is never paired with itself. Pairs follow the input order of `scores`.
pub fn provable_partial_order<L: Clone>(scores: &[(L, f64)], u: f64) -> Vec<ProvablePair<L>> {
    let mut out = Vec::new();
    for (i, (a, sa)) in scores.iter().enumerate() {
        for (j, (b, sb)) in scores.iter().enumerate() {
            if i == j {
                continue;
            }
            let lhs = sb + u;
            if lhs <= *sa {
                out.push(ProvablePair {
                    higher: a.clone(),
                    lower: b.clone(),
                    strict: lhs < *sa,
                });
            }
        }
    }
    out
}

/// Log-space variant of [`provable_partial_order`] for scores that overflow.
pub fn provable_partial_order_log<L: Clone>(
    log_scores: &[(L, f64)],
    log_u: f64,
) -> Vec<ProvablePair<L>> {
    let mut out = Vec::new();
    for (i, (a, la)) in log_scores.iter().enumerate() {
        for (j, (b, lb)) in log_scores.iter().enumerate() {
            if i == j {
                continue;
            }
            let lhs = log_add_exp(*lb, log_u);
            if lhs <= *la {
                out.push(ProvablePair {
                    higher: a.clone(),
                    lower: b.clone(),
                    strict: lhs < *la,
                });
            }
        }
    }
    out
}

/// State of an anytime run over a grounded knowledge base. [`Ranker::step`]
/// analyzes one world; [`Ranker::run`] steps until a stop condition holds.
pub struct Ranker<'a> {
    kb: &'a TcpKnowledgeBase,
    g: &'a GroundMln,
    config: RankConfig,
    classes: ClassEnumerator<'a>,
    lookahead: VecDeque<EquivalenceClass>,
    current: Option<(f64, Peekable<Members>)>,
    scores: BTreeMap<GroundAtom, ScaledExpSum>,
    bottom: ScaledExpSum,
    universe: BTreeSet<GroundAtom>,
    memo: HashMap<Vec<ElAxiom>, Arc<Entailment>>,
    offset: f64,
    worlds: u128,
    classes_done: u128,
    inconsistent: u128,
    started: Instant,
}

impl<'a> Ranker<'a> {
    pub fn new(kb: &'a TcpKnowledgeBase, g: &'a GroundMln, config: RankConfig) -> Ranker<'a> {
        let offset = g.max_log_score();
        Ranker {
            kb,
            g,
            classes: ClassEnumerator::new(g),
            lookahead: VecDeque::new(),
            current: None,
            scores: BTreeMap::new(),
            bottom: ScaledExpSum::new(offset),
            universe: match config.policy {
                InconsistencyPolicy::Explode => atom_universe(&kb.signature),
                InconsistencyPolicy::Skip => BTreeSet::new(),
            },
            memo: HashMap::new(),
            offset,
            worlds: 0,
            classes_done: 0,
            inconsistent: 0,
            started: Instant::now(),
            config,
        }
    }

    pub fn worlds_analyzed(&self) -> u128 {
        self.worlds
    }

    pub fn classes_analyzed(&self) -> u128 {
        self.classes_done
    }

    fn next_class(&mut self) -> Option<EquivalenceClass> {
        self.lookahead.pop_front().or_else(|| self.classes.next())
    }

    /// Makes `current` a class with members left, counting exhausted and
    /// empty classes as analyzed. Returns false when no class remains.
    fn settle(&mut self) -> bool {
        loop {
            if let Some((_, members)) = &mut self.current {
                if members.peek().is_some() {
                    return true;
                }
                self.current = None;
                self.classes_done += 1;
            }
            match self.next_class() {
                None => return false,
                Some(c) if c.is_empty() => self.classes_done += 1,
                Some(c) => self.current = Some((c.log_score, c.members().peekable())),
            }
        }
    }

    /// Score of the class the bound is taken from: the class in progress, or
    /// at a class boundary the next class (the next non-empty one when the
    /// tight bound is on).
    fn bound_class_score(&mut self) -> Option<f64> {
        if let Some((score, _)) = &self.current {
            return Some(*score);
        }
        if !self.config.tight_bound {
            return match self.lookahead.front() {
                Some(c) => Some(c.log_score),
                None => self.classes.peek_score(),
            };
        }
        let mut i = 0;
        loop {
            if i == self.lookahead.len() {
                let c = self.classes.next()?;
                self.lookahead.push_back(c);
            }
            if !self.lookahead[i].is_empty() {
                return Some(self.lookahead[i].log_score);
            }
            i += 1;
        }
    }

    pub fn log_unassigned_bound(&mut self) -> f64 {
        match self.bound_class_score() {
            Some(score) => log_unassigned_bound(self.g.n(), self.worlds, score),
            None => f64::NEG_INFINITY,
        }
    }

    pub fn unassigned_bound(&mut self) -> f64 {
        self.log_unassigned_bound().exp()
    }

    /// Analyzes the next world and returns it, or `None` once every class
    /// has been consumed.
    pub fn step(&mut self) -> Option<World> {
        let (score, world) = loop {
            if let Some((score, members)) = &mut self.current {
                if let Some(w) = members.next() {
                    break (*score, w);
                }
            }
            if !self.settle() {
                return None;
            }
        };
        self.analyze(&world, score);
        // close the class right away so the bound moves to the next one
        if let Some((_, members)) = &mut self.current {
            if members.peek().is_none() {
                self.current = None;
                self.classes_done += 1;
            }
        }
        Some(world)
    }

    fn analyze(&mut self, w: &World, log_score: f64) {
        self.worlds += 1;
        let induced = induce_ontology(self.kb, w, self.g);
        let entailment = match self.memo.get(&induced) {
            Some(e) => e.clone(),
            None => {
                let e = Arc::new(entail(&induced));
                if self.memo.len() >= MEMO_LIMIT {
                    self.memo.clear();
                }
                self.memo.insert(induced, e.clone());
                e
            }
        };
        if !entailment.is_consistent() {
            self.inconsistent += 1;
            self.bottom.add_log(log_score);
        }
        for atom in entailment.atoms(self.config.policy, &self.universe) {
            self.scores
                .entry(atom.clone())
                .or_insert_with(|| ScaledExpSum::new(self.offset))
                .add_log(log_score);
        }
    }

    fn should_stop(&mut self, stop: &StopCondition, deadline: Option<Instant>) -> bool {
        if stop.max_classes.is_some_and(|m| self.classes_done >= m) {
            return true;
        }
        if stop.max_worlds.is_some_and(|m| self.worlds >= m) {
            return true;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return true;
        }
        if let Some(target) = stop.target_bound {
            if self.unassigned_bound() <= target {
                return true;
            }
        }
        false
    }

    /// Steps until `stop` holds (checked between worlds) or every class is consumed.
    pub fn run(&mut self, stop: &StopCondition) -> RankingResult {
        let deadline = stop
            .max_seconds
            .map(|s| self.started + Duration::from_secs_f64(s.max(0.0)));
        while !self.should_stop(stop, deadline) {
            if self.step().is_none() {
                break;
            }
        }
        self.snapshot()
    }

    /// True when every world has been analyzed.
    pub fn is_complete(&mut self) -> bool {
        ln_remaining_worlds(self.g.n(), self.worlds) == f64::NEG_INFINITY
            || (self.current.is_none()
                && self.lookahead.is_empty()
                && self.classes.peek_score().is_none())
    }

    pub fn snapshot(&mut self) -> RankingResult {
        let log_u = self.log_unassigned_bound();
        let u = log_u.exp();
        let mut scores: Vec<(GroundAtom, f64, f64, f64)> = self
            .scores
            .iter()
            .filter(|(_, s)| s.scaled() > 0.0)
            .map(|(a, s)| (a.clone(), s.scaled(), s.value(), s.log_value()))
            .collect();
        // stable sort keeps canonical order among ties
        scores.sort_by(|x, y| y.1.total_cmp(&x.1));
        let scores: Vec<AtomScore> = scores
            .into_iter()
            .map(|(atom, _, score, log_score)| AtomScore {
                atom,
                score,
                log_score,
            })
            .collect();
        let all_finite = u.is_finite() && scores.iter().all(|s| s.score.is_finite());
        let provable_pairs = if all_finite {
            let lin: Vec<(GroundAtom, f64)> =
                scores.iter().map(|s| (s.atom.clone(), s.score)).collect();
            provable_partial_order(&lin, u)
        } else {
            let log: Vec<(GroundAtom, f64)> = scores
                .iter()
                .map(|s| (s.atom.clone(), s.log_score))
                .collect();
            provable_partial_order_log(&log, log_u)
        };
        let complete = self.is_complete();
        RankingResult {
            scores,
            worlds_analyzed: self.worlds,
            classes_analyzed: self.classes_done,
            unassigned_bound: u,
            log_unassigned_bound: log_u,
            provable_pairs,
            bottom_mass: self.bottom.value(),
            inconsistent_worlds: self.inconsistent,
            n_atoms: self.g.n(),
            n_formulas: self.g.formulas().len(),
            max_log_score: self.offset,
            complete,
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Validates and grounds `kb`, then runs the anytime ranking until `stop`.
pub fn anytime_rank(
    kb: &TcpKnowledgeBase,
    stop: &StopCondition,
    config: &RankConfig,
) -> Result<RankingResult, RankError> {
    let violations = validate_kb(kb);
    if !violations.is_empty() {
        return Err(RankError::Invalid(violations));
    }
    let g = GroundMln::from_kb(kb, config.grounding_cap)?;
    Ok(Ranker::new(kb, &g, config.clone()).run(stop))
}
