//! Equivalence classes of worlds (worlds satisfying the same ground
//! formulas) and their best-first enumeration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::mln::{GroundMln, MlnError, World};
use crate::numeric::exact_sum;

/// A set of worlds identified by which ground formulas they satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    /// `mask[j]` is true iff formula `j` is satisfied by every member.
    pub mask: Vec<bool>,
    pub log_score: f64,
    /// Atoms forced true: the union of the atoms of satisfied formulas.
    pub det: Vec<bool>,
    /// Atom sets of the unsatisfied formulas; each needs a false atom.
    pub neg_clauses: Vec<Vec<usize>>,
}

impl EquivalenceClass {
    pub fn from_mask(mask: Vec<bool>, g: &GroundMln) -> EquivalenceClass {
        assert_eq!(mask.len(), g.formulas().len(), "mask length");
        let mut det = vec![false; g.n()];
        let mut neg_clauses = Vec::new();
        for (f, &on) in g.formulas().iter().zip(&mask) {
            if on {
                for &a in &f.atoms {
                    det[a] = true;
                }
            } else {
                neg_clauses.push(f.atoms.clone());
            }
        }
        let log_score = mask_log_score(&mask, g);
        EquivalenceClass {
            mask,
            log_score,
            det,
            neg_clauses,
        }
    }

    /// The class containing `w`.
    pub fn of(w: &World, g: &GroundMln) -> Result<EquivalenceClass, MlnError> {
        let sat = g.satisfied_formulas(w)?;
        let mut mask = vec![false; g.formulas().len()];
        for j in sat {
            mask[j] = true;
        }
        Ok(EquivalenceClass::from_mask(mask, g))
    }

    /// True iff an unsatisfied formula consists only of forced atoms.
    pub fn is_empty(&self) -> bool {
        self.neg_clauses
            .iter()
            .any(|c| c.iter().all(|&a| self.det[a]))
    }

    /// Members in descending numeric order of their bit vectors.
    pub fn members(&self) -> Members {
        Members::new(self)
    }

    pub fn mask_string(&self) -> String {
        self.mask
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Exact sum of the weights of the formulas set in `mask`, in index order.
pub fn mask_log_score(mask: &[bool], g: &GroundMln) -> f64 {
    exact_sum(
        g.formulas()
            .iter()
            .zip(mask)
            .filter(|(_, &on)| on)
            .map(|(f, _)| f.weight),
    )
}

/// Depth-first stream over the worlds of a class, trying `true` before
/// `false` at every atom. A prefix is kept only if every unsatisfied formula
/// still has an atom that is false or can be made false, so every descent
/// reaches a member.
#[derive(Debug, Clone)]
pub struct Members {
    det: Vec<bool>,
    clauses_of: Vec<Vec<usize>>,
    /// Per unsatisfied formula: atoms that are false or still open.
    open: Vec<usize>,
    world: Vec<bool>,
    started: bool,
    done: bool,
}

impl Members {
    fn new(class: &EquivalenceClass) -> Members {
        let n = class.det.len();
        let mut clauses_of = vec![Vec::new(); n];
        let mut open = Vec::with_capacity(class.neg_clauses.len());
        for (c, atoms) in class.neg_clauses.iter().enumerate() {
            let mut k = 0;
            for &a in atoms {
                if !class.det[a] {
                    clauses_of[a].push(c);
                    k += 1;
                }
            }
            open.push(k);
        }
        let done = class.is_empty();
        Members {
            det: class.det.clone(),
            clauses_of,
            open,
            world: vec![false; n],
            started: false,
            done,
        }
    }

    fn try_true(&mut self, a: usize) -> bool {
        if self.clauses_of[a].iter().any(|&c| self.open[c] == 1) {
            return false;
        }
        for &c in &self.clauses_of[a] {
            self.open[c] -= 1;
        }
        true
    }

    fn untrue(&mut self, a: usize) {
        for &c in &self.clauses_of[a] {
            self.open[c] += 1;
        }
    }

    fn descend(&mut self, from: usize) {
        for a in from..self.world.len() {
            self.world[a] = self.det[a] || self.try_true(a);
        }
    }
}

impl Iterator for Members {
    type Item = World;

    fn next(&mut self) -> Option<World> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend(0);
            return Some(World(self.world.clone()));
        }
        // The deepest free `true` becomes `false`; everything after it is
        // already false or forced, so nothing else needs releasing.
        let mut a = self.world.len();
        loop {
            if a == 0 {
                self.done = true;
                return None;
            }
            a -= 1;
            if self.world[a] && !self.det[a] {
                self.untrue(a);
                self.world[a] = false;
                self.descend(a + 1);
                return Some(World(self.world.clone()));
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    log_score: f64,
    mask: Vec<bool>,
    /// Positions into the cost order that are flipped from the best mask.
    flips: Vec<usize>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_score
            .total_cmp(&other.log_score)
            .then_with(|| self.mask.cmp(&other.mask))
    }
}

/// Yields every mask over the ground formulas exactly once, by
/// non-increasing score and, within equal scores, descending lexicographic
/// mask. Masks are reached from the score-maximal mask by flipping formulas;
/// flip sets grow along the cost order so each has a single parent.
pub struct ClassEnumerator<'g> {
    g: &'g GroundMln,
    best: Vec<bool>,
    /// Formula indices sorted by `|weight|`.
    order: Vec<usize>,
    frontier: BinaryHeap<Candidate>,
    ready: std::collections::VecDeque<Candidate>,
    emitted: u128,
}

impl<'g> ClassEnumerator<'g> {
    pub fn new(g: &'g GroundMln) -> ClassEnumerator<'g> {
        let best: Vec<bool> = g.formulas().iter().map(|f| f.weight >= 0.0).collect();
        let mut order: Vec<usize> = (0..best.len()).collect();
        order.sort_by(|&i, &j| {
            g.formulas()[i]
                .weight
                .abs()
                .total_cmp(&g.formulas()[j].weight.abs())
        });
        let root = Candidate {
            log_score: mask_log_score(&best, g),
            mask: best.clone(),
            flips: Vec::new(),
        };
        ClassEnumerator {
            g,
            best,
            order,
            frontier: BinaryHeap::from([root]),
            ready: Default::default(),
            emitted: 0,
        }
    }

    /// Number of masks, `2^|formulas|` (saturating).
    pub fn total(&self) -> u128 {
        1u128
            .checked_shl(self.best.len() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn emitted(&self) -> u128 {
        self.emitted
    }

    fn candidate(&self, flips: Vec<usize>) -> Candidate {
        let mut mask = self.best.clone();
        for &p in &flips {
            let j = self.order[p];
            mask[j] = !mask[j];
        }
        Candidate {
            log_score: mask_log_score(&mask, self.g),
            mask,
            flips,
        }
    }

    fn expand(&mut self, c: &Candidate) {
        let m = self.order.len();
        match c.flips.last() {
            None if m > 0 => {
                let next = self.candidate(vec![0]);
                self.frontier.push(next);
            }
            None => {}
            Some(&p) if p + 1 < m => {
                let mut extend = c.flips.clone();
                extend.push(p + 1);
                let mut shift = c.flips.clone();
                *shift.last_mut().unwrap() = p + 1;
                let (a, b) = (self.candidate(extend), self.candidate(shift));
                self.frontier.push(a);
                self.frontier.push(b);
            }
            Some(_) => {}
        }
    }

    /// Moves every candidate with the current top score into `ready`,
    /// including equal-score successors discovered on the way.
    fn fill(&mut self) {
        let Some(top) = self.frontier.peek() else {
            return;
        };
        let score = top.log_score;
        let mut batch = Vec::new();
        while self.frontier.peek().is_some_and(|c| c.log_score == score) {
            let c = self.frontier.pop().unwrap();
            self.expand(&c);
            batch.push(c);
        }
        batch.sort_by(|a, b| b.mask.cmp(&a.mask));
        self.ready.extend(batch);
    }

    /// Score of the class the next call to `next` returns.
    pub fn peek_score(&mut self) -> Option<f64> {
        if self.ready.is_empty() {
            self.fill();
        }
        self.ready.front().map(|c| c.log_score)
    }
}

impl Iterator for ClassEnumerator<'_> {
    type Item = EquivalenceClass;

    fn next(&mut self) -> Option<EquivalenceClass> {
        if self.ready.is_empty() {
            self.fill();
        }
        let c = self.ready.pop_front()?;
        self.emitted += 1;
        Some(EquivalenceClass::from_mask(c.mask, self.g))
    }
}
