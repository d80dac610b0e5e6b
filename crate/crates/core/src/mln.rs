//! Grounding of conjunctive MLN programs and per-world scores.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kb::{
    validate_cmln, GroundAtom, MlnProgram, TcpKnowledgeBase, Term, Violation, DEFAULT_SORT,
};
use crate::numeric::exact_sum;

/// Default refusal threshold for the number of ground formula instances.
pub const DEFAULT_GROUNDING_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MlnError {
    #[error("grounding would produce {projected} formula instances, above the cap of {cap}")]
    GroundingTooLarge { projected: u128, cap: u128 },
    #[error("world has {found} atoms but the grounding has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] Violation),
}

/// A ground conjunction with its weight; `source` is the program formula it
/// was instantiated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundFormula {
    pub atoms: Vec<usize>,
    pub weight: f64,
    pub source: usize,
}

/// Ground cMLN: canonically ordered ground atoms and ground formulas.
#[derive(Debug, Clone)]
pub struct GroundMln {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, usize>,
    formulas: Vec<GroundFormula>,
}

/// Total truth assignment over the atoms of a [`GroundMln`]. The derived
/// order reads the vector as a binary number with atom 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct World(pub Vec<bool>);

impl World {
    pub fn all(n: usize, value: bool) -> World {
        World(vec![value; n])
    }

    /// The world whose bit vector, read with atom 0 as most significant bit, equals `k`.
    pub fn from_index(n: usize, k: u64) -> World {
        debug_assert!(n <= 64);
        World((0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, atom: usize) -> bool {
        self.0[atom]
    }

    pub fn set(&mut self, atom: usize, value: bool) {
        self.0[atom] = value;
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Domain of each argument position of each predicate.
fn position_domains(
    program: &MlnProgram,
    predicates: &BTreeMap<String, usize>,
) -> BTreeMap<String, Vec<Vec<String>>> {
    let all: Vec<String> = program.all_constants().into_iter().collect();
    let sorted = |sort: &str| -> Vec<String> {
        if sort == DEFAULT_SORT && !program.constants.contains_key(DEFAULT_SORT) {
            return all.clone();
        }
        program
            .constants
            .get(sort)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    };
    predicates
        .iter()
        .map(|(p, &arity)| {
            let doms = match program.scopes.get(p) {
                Some(sorts) if sorts.len() == arity => sorts.iter().map(|s| sorted(s)).collect(),
                _ => vec![all.clone(); arity],
            };
            (p.clone(), doms)
        })
        .collect()
}

impl GroundMln {
    /// Grounds a knowledge base's program over its MLN predicates (including
    /// predicates that only occur in annotations).
    pub fn from_kb(kb: &TcpKnowledgeBase, cap: u128) -> Result<GroundMln, MlnError> {
        GroundMln::ground(&kb.mln, &kb.signature.mln_predicates, cap)
    }

    /// Projected number of ground formula instances before deduplication.
    pub fn projected_size(program: &MlnProgram, predicates: &BTreeMap<String, usize>) -> u128 {
        let domains = position_domains(program, predicates);
        program
            .formulas
            .iter()
            .map(|f| {
                let vars = variable_domains(f.formula.atoms().into_iter(), &domains);
                vars.values()
                    .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
            })
            .fold(0u128, u128::saturating_add)
    }

    /// Instantiates every formula with every substitution of constants
    /// allowed by the scoping rules. Atoms are all ground atoms over the
    /// predicates and their position domains, in canonical order.
    pub fn ground(
        program: &MlnProgram,
        predicates: &BTreeMap<String, usize>,
        cap: u128,
    ) -> Result<GroundMln, MlnError> {
        validate_cmln(program)?;
        let projected = Self::projected_size(program, predicates);
        if projected > cap {
            return Err(MlnError::GroundingTooLarge { projected, cap });
        }
        let domains = position_domains(program, predicates);

        let mut atoms = BTreeSet::new();
        for (p, doms) in &domains {
            for args in cartesian(doms) {
                atoms.insert(GroundAtom {
                    predicate: p.clone(),
                    args,
                });
            }
        }
        let atoms: Vec<GroundAtom> = atoms.into_iter().collect();
        let index: HashMap<GroundAtom, usize> = atoms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();

        let mut formulas = Vec::new();
        for (source, f) in program.formulas.iter().enumerate() {
            let conj = f.formula.conjuncts().expect("validated conjunction");
            let vars = variable_domains(conj.iter().copied(), &domains);
            let names: Vec<&String> = vars.keys().collect();
            let doms: Vec<Vec<String>> = vars.values().cloned().collect();
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            'subst: for values in cartesian(&doms) {
                let theta: HashMap<&str, &str> = names
                    .iter()
                    .map(|n| n.as_str())
                    .zip(values.iter().map(String::as_str))
                    .collect();
                let mut ids = Vec::with_capacity(conj.len());
                for a in &conj {
                    let ground = GroundAtom {
                        predicate: a.predicate.clone(),
                        args: a
                            .args
                            .iter()
                            .map(|t| match t {
                                Term::Var(v) => theta[v.as_str()].to_string(),
                                Term::Const(c) => c.clone(),
                            })
                            .collect(),
                    };
                    match index.get(&ground) {
                        Some(&i) => ids.push(i),
                        // constant outside the predicate's scope
                        None => continue 'subst,
                    }
                }
                ids.sort_unstable();
                ids.dedup();
                if seen.insert(ids.clone()) {
                    formulas.push(GroundFormula {
                        atoms: ids,
                        weight: f.weight,
                        source,
                    });
                }
            }
        }
        Ok(GroundMln {
            atoms,
            index,
            formulas,
        })
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &GroundAtom {
        &self.atoms[i]
    }

    pub fn atom_index(&self, atom: &GroundAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn formulas(&self) -> &[GroundFormula] {
        &self.formulas
    }

    /// Weight-sum of the best class: every positive-weight formula true.
    pub fn max_log_score(&self) -> f64 {
        exact_sum(self.formulas.iter().map(|f| f.weight.max(0.0)))
    }

    fn check(&self, w: &World) -> Result<(), MlnError> {
        if w.len() != self.n() {
            return Err(MlnError::LengthMismatch {
                expected: self.n(),
                found: w.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn satisfies(&self, w: &World, formula: usize) -> bool {
        self.formulas[formula].atoms.iter().all(|&a| w.get(a))
    }

    /// Indices of the ground formulas whose atoms are all true in `w`.
    pub fn satisfied_formulas(&self, w: &World) -> Result<Vec<usize>, MlnError> {
        self.check(w)?;
        Ok((0..self.formulas.len())
            .filter(|&j| self.satisfies(w, j))
            .collect())
    }

    /// Sum of the weights of satisfied formulas: the log of the world's
    /// unnormalized score.
    pub fn world_log_score(&self, w: &World) -> Result<f64, MlnError> {
        let sat = self.satisfied_formulas(w)?;
        Ok(exact_sum(sat.iter().map(|&j| self.formulas[j].weight)))
    }

    /// Compares the probabilities of two worlds through their unnormalized
    /// scores; returns the ordering and `log(P(w1) / P(w2))`.
    pub fn compare_worlds(&self, w1: &World, w2: &World) -> Result<(Ordering, f64), MlnError> {
        let s1 = self.world_log_score(w1)?;
        let s2 = self.world_log_score(w2)?;
        let ord = s1.partial_cmp(&s2).expect("finite scores");
        Ok((ord, s1 - s2))
    }

    /// Atoms by predicate, used for annotation matching.
    pub fn atoms_of<'a>(
        &'a self,
        predicate: &'a str,
    ) -> impl Iterator<Item = (usize, &'a GroundAtom)> + 'a {
        let start = self
            .atoms
            .partition_point(|a| a.predicate.as_str() < predicate);
        self.atoms[start..]
            .iter()
            .enumerate()
            .take_while(move |(_, a)| a.predicate == predicate)
            .map(move |(i, a)| (start + i, a))
    }
}

fn variable_domains<'a, I: Iterator<Item = &'a crate::kb::Atom>>(
    atoms: I,
    domains: &BTreeMap<String, Vec<Vec<String>>>,
) -> indexmap_like::OrderedMap {
    let mut out = indexmap_like::OrderedMap::default();
    for a in atoms {
        for (pos, t) in a.args.iter().enumerate() {
            if let Term::Var(v) = t {
                let dom = domains
                    .get(&a.predicate)
                    .and_then(|d| d.get(pos))
                    .cloned()
                    .unwrap_or_default();
                out.intersect(v, dom);
            }
        }
    }
    out
}

mod indexmap_like {
    /// Variables in order of first appearance with their (intersected) domains.
    #[derive(Default)]
    pub struct OrderedMap {
        entries: Vec<(String, Vec<String>)>,
    }

    impl OrderedMap {
        pub fn intersect(&mut self, var: &str, dom: Vec<String>) {
            match self.entries.iter_mut().find(|(v, _)| v == var) {
                Some((_, existing)) => existing.retain(|c| dom.contains(c)),
                None => self.entries.push((var.to_string(), dom)),
            }
        }

        pub fn keys(&self) -> impl Iterator<Item = &String> {
            self.entries.iter().map(|(k, _)| k)
        }

        pub fn values(&self) -> impl Iterator<Item = &Vec<String>> {
            self.entries.iter().map(|(_, v)| v)
        }
    }
}

/// Odometer over the product of `doms`, first position most significant.
fn cartesian(doms: &[Vec<String>]) -> impl Iterator<Item = Vec<String>> + '_ {
    let empty = doms.iter().any(|d| d.is_empty());
    let mut idx = vec![0usize; doms.len()];
    let mut done = empty;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item: Vec<String> = idx.iter().zip(doms).map(|(&i, d)| d[i].clone()).collect();
        done = true;
        for pos in (0..doms.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < doms[pos].len() {
                done = false;
                break;
            }
            idx[pos] = 0;
        }
        Some(item)
    })
}
