//! Exact semantics by enumerating every world in numeric order: partition
//! function, world and marginal probabilities, atom probabilities and the
//! exact ranking. Exponential in the number of ground atoms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binding::induce_ontology;
use crate::el::{atom_universe, entail, Entailment, InconsistencyPolicy};
use crate::kb::{validate_kb, Annotation, ElAxiom, GroundAtom, Item, TcpKnowledgeBase, Violation};
use crate::mln::{GroundMln, MlnError, World, DEFAULT_GROUNDING_CAP};
use crate::numeric::ScaledExpSum;

pub const DEFAULT_ORACLE_CAP: usize = 20;

/// Worlds per parallel work unit.
const CHUNK: u64 = 1 << 12;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("exact enumeration over {n} ground atoms exceeds the cap of {cap}")]
    TooManyAtoms { n: usize, cap: usize },
    #[error("marginal pair `{0}` is not ground")]
    NonGroundPair(String),
    #[error("atom `{0}` is not a ground atom of the program")]
    UnknownAtom(String),
    #[error("knowledge base is invalid: {}", .0.iter().map(|(i, v)| format!("{i:?}: {v}")).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<(Item, Violation)>),
    #[error(transparent)]
    Grounding(#[from] MlnError),
}

fn check_cap(g: &GroundMln, cap: usize) -> Result<(), OracleError> {
    if g.n() > cap || g.n() >= 64 {
        return Err(OracleError::TooManyAtoms { n: g.n(), cap });
    }
    Ok(())
}

fn chunks(n: usize) -> Vec<(u64, u64)> {
    let total = 1u64 << n;
    (0..total.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect()
}

/// `Σ_w exp(score(w) − offset)` restricted to worlds accepted by `keep`.
fn scaled_mass<F>(g: &GroundMln, keep: F) -> ScaledExpSum
where
    F: Fn(&World) -> bool + Sync,
{
    let offset = g.max_log_score();
    let parts: Vec<ScaledExpSum> = chunks(g.n())
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = ScaledExpSum::new(offset);
            for k in lo..hi {
                let w = World::from_index(g.n(), k);
                if keep(&w) {
                    acc.add_log(g.world_log_score(&w).expect("world length"));
                }
            }
            acc
        })
        .collect();
    let mut total = ScaledExpSum::new(offset);
    for p in &parts {
        total.merge(p);
    }
    total
}

/// `ln Z`, the log of the sum of unnormalized scores of all worlds.
pub fn log_partition(g: &GroundMln, cap: usize) -> Result<f64, OracleError> {
    check_cap(g, cap)?;
    Ok(scaled_mass(g, |_| true).log_value())
}

pub fn world_probability(w: &World, g: &GroundMln, cap: usize) -> Result<f64, OracleError> {
    let log_z = log_partition(g, cap)?;
    Ok((g.world_log_score(w)? - log_z).exp())
}

/// Probability that the ground pairs of `partial` all hold.
pub fn marginal_probability(
    partial: &Annotation,
    g: &GroundMln,
    cap: usize,
) -> Result<f64, OracleError> {
    check_cap(g, cap)?;
    let mut fixed = Vec::with_capacity(partial.pairs.len());
    for p in &partial.pairs {
        let atom = p
            .atom
            .to_ground()
            .ok_or_else(|| OracleError::NonGroundPair(p.to_string()))?;
        let i = g
            .atom_index(&atom)
            .ok_or_else(|| OracleError::UnknownAtom(atom.to_string()))?;
        fixed.push((i, p.value));
    }
    let z = scaled_mass(g, |_| true);
    let part = scaled_mass(g, |w| fixed.iter().all(|&(i, v)| w.get(i) == v));
    Ok(part.scaled() / z.scaled())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactAtom {
    pub atom: GroundAtom,
    pub probability: f64,
    /// `ln(Z · Pr(atom))`.
    pub log_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRanking {
    /// Atoms with positive probability, by descending probability then canonical order.
    pub atoms: Vec<ExactAtom>,
    pub log_z: f64,
    /// Probability that the induced ontology is inconsistent.
    pub bottom_probability: f64,
    pub n_atoms: usize,
}

impl ExactRanking {
    pub fn probability(&self, atom: &GroundAtom) -> f64 {
        self.atoms
            .iter()
            .find(|a| &a.atom == atom)
            .map_or(0.0, |a| a.probability)
    }
}

struct Accumulated {
    atoms: BTreeMap<GroundAtom, ScaledExpSum>,
    bottom: ScaledExpSum,
    z: ScaledExpSum,
}

/// Exact ranking of a grounded knowledge base.
pub fn exact_rank_ground(
    kb: &TcpKnowledgeBase,
    g: &GroundMln,
    policy: InconsistencyPolicy,
    cap: usize,
) -> Result<ExactRanking, OracleError> {
    check_cap(g, cap)?;
    let offset = g.max_log_score();
    let universe = match policy {
        InconsistencyPolicy::Explode => atom_universe(&kb.signature),
        InconsistencyPolicy::Skip => BTreeSet::new(),
    };
    let parts: Vec<Accumulated> = chunks(g.n())
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = Accumulated {
                atoms: BTreeMap::new(),
                bottom: ScaledExpSum::new(offset),
                z: ScaledExpSum::new(offset),
            };
            let mut memo: HashMap<Vec<ElAxiom>, Entailment> = HashMap::new();
            for k in lo..hi {
                let w = World::from_index(g.n(), k);
                let score = g.world_log_score(&w).expect("world length");
                acc.z.add_log(score);
                let induced = induce_ontology(kb, &w, g);
                let e = memo.entry(induced).or_insert_with_key(|o| entail(o));
                if !e.is_consistent() {
                    acc.bottom.add_log(score);
                }
                for a in e.atoms(policy, &universe) {
                    acc.atoms
                        .entry(a.clone())
                        .or_insert_with(|| ScaledExpSum::new(offset))
                        .add_log(score);
                }
            }
            acc
        })
        .collect();

    let mut atoms: BTreeMap<GroundAtom, ScaledExpSum> = BTreeMap::new();
    let mut bottom = ScaledExpSum::new(offset);
    let mut z = ScaledExpSum::new(offset);
    for p in &parts {
        z.merge(&p.z);
        bottom.merge(&p.bottom);
        for (a, s) in &p.atoms {
            atoms
                .entry(a.clone())
                .or_insert_with(|| ScaledExpSum::new(offset))
                .merge(s);
        }
    }
    let log_z = z.log_value();
    let mut ranked: Vec<(GroundAtom, f64, f64)> = atoms
        .into_iter()
        .filter(|(_, s)| s.scaled() > 0.0)
        .map(|(a, s)| (a, s.scaled(), s.log_value()))
        .collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1));
    Ok(ExactRanking {
        atoms: ranked
            .into_iter()
            .map(|(atom, scaled, log_score)| ExactAtom {
                atom,
                probability: (scaled / z.scaled()).min(1.0),
                log_score,
            })
            .collect(),
        log_z,
        bottom_probability: bottom.scaled() / z.scaled(),
        n_atoms: g.n(),
    })
}

/// Validates, grounds and ranks `kb` exactly.
pub fn exact_rank(
    kb: &TcpKnowledgeBase,
    policy: InconsistencyPolicy,
    cap: usize,
) -> Result<ExactRanking, OracleError> {
    let violations = validate_kb(kb);
    if !violations.is_empty() {
        return Err(OracleError::Invalid(violations));
    }
    let g = GroundMln::from_kb(kb, DEFAULT_GROUNDING_CAP)?;
    exact_rank_ground(kb, &g, policy, cap)
}

/// Probability that `atom` is entailed by the ontology a random world induces.
pub fn exact_atom_probability(
    kb: &TcpKnowledgeBase,
    atom: &GroundAtom,
    policy: InconsistencyPolicy,
    cap: usize,
) -> Result<f64, OracleError> {
    Ok(exact_rank(kb, policy, cap)?.probability(atom))
}
