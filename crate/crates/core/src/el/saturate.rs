use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::normalize::{NodeId, NormalOntology, RoleId, BOTTOM, TOP};
use crate::kb::GroundAtom;

/// Completion rules, used to attribute rule firings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// `C' ∈ S(C), C' ⊑ D ⟹ D ∈ S(C)`
    Subsumption,
    /// `C1, C2 ∈ S(C), C1 ⊓ C2 ⊑ D ⟹ D ∈ S(C)`
    Conjunction,
    /// `C' ∈ S(C), C' ⊑ ∃r.D ⟹ (C, D) ∈ R(r)`
    ExistsRight,
    /// `(C, D) ∈ R(r), D' ∈ S(D), ∃r.D' ⊑ E ⟹ E ∈ S(C)`
    ExistsLeft,
    /// `(C, D) ∈ R(r), ⊥ ∈ S(D) ⟹ ⊥ ∈ S(C)`
    Bottom,
    /// `{a} ∈ S(C) ∩ S(D)`, D reachable from a nominal `⟹ S(D) ⊆ S(C)`
    Nominal,
    /// `(C, D) ∈ R(r), r ⊑ s ⟹ (C, D) ∈ R(s)`
    RoleHierarchy,
    /// `(C, D) ∈ R(r), (D, E) ∈ R(s), r ∘ s ⊑ t ⟹ (C, E) ∈ R(t)`
    Composition,
    /// `(C, D) ∈ R(r), ran(r) ⊑ E ⟹ E ∈ S(D)`
    Range,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::Subsumption,
        Rule::Conjunction,
        Rule::ExistsRight,
        Rule::ExistsLeft,
        Rule::Bottom,
        Rule::Nominal,
        Rule::RoleHierarchy,
        Rule::Composition,
        Rule::Range,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// Least fixpoint of the completion rules: subsumer sets `S(C)` and role
/// edges `R(r)` over the nodes of a normal ontology.
#[derive(Debug, Clone)]
pub struct SaturationState {
    pub ontology: NormalOntology,
    subsumers: Vec<FixedBitSet>,
    /// `edges[r][c]` holds the `r`-successors of node `c`.
    edges: Vec<Vec<FixedBitSet>>,
    firings: [u64; 9],
}

impl SaturationState {
    pub fn node_count(&self) -> usize {
        self.ontology.nodes.len()
    }

    pub fn contains(&self, node: NodeId, subsumer: NodeId) -> bool {
        self.subsumers[node].contains(subsumer)
    }

    pub fn subsumers(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.subsumers[node].ones()
    }

    pub fn has_edge(&self, role: RoleId, from: NodeId, to: NodeId) -> bool {
        self.edges[role][from].contains(to)
    }

    pub fn successors(&self, role: RoleId, from: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges[role][from].ones()
    }

    /// Total number of facts added by rule applications.
    pub fn firings(&self) -> u64 {
        self.firings.iter().sum()
    }

    pub fn firings_of(&self, rule: Rule) -> u64 {
        self.firings[rule.index()]
    }

    /// False iff some individual (or ⊤ itself) is subsumed by ⊥.
    pub fn is_consistent(&self) -> bool {
        if self.contains(TOP, BOTTOM) {
            return false;
        }
        !self
            .ontology
            .individuals()
            .any(|(id, _)| self.contains(id, BOTTOM))
    }

    /// Atomic consequences over named individuals: `A(a)` for atomic `A ∈ S({a})`
    /// and `r(a,b)` whenever `({a}, D) ∈ R(r)` with `{b} ∈ S(D)`.
    pub fn atomic_consequences(&self) -> BTreeSet<GroundAtom> {
        let o = &self.ontology;
        let mut out = BTreeSet::new();
        let individuals: Vec<(NodeId, &str)> = o.individuals().collect();
        for &(id, name) in &individuals {
            for s in self.subsumers(id) {
                if let super::Node::Atomic(a) = &o.nodes[s] {
                    out.insert(GroundAtom::new(a.clone(), [name]));
                }
            }
            for (r, role) in o.roles.iter().enumerate() {
                for d in self.successors(r, id) {
                    for &(other, other_name) in &individuals {
                        if self.contains(d, other) {
                            out.insert(GroundAtom::new(role.clone(), [name, other_name]));
                        }
                    }
                }
            }
        }
        out
    }
}

struct Saturator {
    subsumers: Vec<FixedBitSet>,
    edges: Vec<Vec<FixedBitSet>>,
    firings: [u64; 9],
}

impl Saturator {
    fn add_subsumer(&mut self, node: NodeId, s: NodeId, rule: Rule) -> bool {
        if self.subsumers[node].put(s) {
            false
        } else {
            self.firings[rule.index()] += 1;
            true
        }
    }

    fn add_edge(&mut self, role: RoleId, from: NodeId, to: NodeId, rule: Rule) -> bool {
        if self.edges[role][from].put(to) {
            false
        } else {
            self.firings[rule.index()] += 1;
            true
        }
    }

    fn guard_ok(&self, node: NodeId, guard: Option<NodeId>) -> bool {
        guard.is_none_or(|g| self.subsumers[node].contains(g))
    }
}

/// Applies the completion rules until no rule adds anything.
pub fn saturate(o: NormalOntology) -> SaturationState {
    let n = o.nodes.len();
    let roles = o.roles.len();
    let mut st = Saturator {
        subsumers: (0..n)
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert(c);
                s.insert(TOP);
                s
            })
            .collect(),
        edges: vec![vec![FixedBitSet::with_capacity(n); n]; roles],
        firings: [0; 9],
    };

    let mut exists_left_by_role: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); roles];
    for &(r, a, b) in &o.exists_left {
        exists_left_by_role[r].push((a, b));
    }
    let mut ranges_by_role: Vec<Vec<(NodeId, Option<NodeId>)>> = vec![Vec::new(); roles];
    for rr in &o.ranges {
        ranges_by_role[rr.role].push((rr.concept, rr.object_guard));
    }
    let mut ri_by_role: Vec<Vec<usize>> = vec![Vec::new(); roles];
    for (i, ri) in o.role_inclusions.iter().enumerate() {
        ri_by_role[ri.chain[0]].push(i);
    }
    let nominals: Vec<NodeId> = o.individuals().map(|(id, _)| id).collect();

    loop {
        let mut changed = false;

        for c in 0..n {
            for &(a, b) in &o.subsumptions {
                if st.subsumers[c].contains(a) {
                    changed |= st.add_subsumer(c, b, Rule::Subsumption);
                }
            }
            for &(a1, a2, b) in &o.conjunctions {
                if st.subsumers[c].contains(a1) && st.subsumers[c].contains(a2) {
                    changed |= st.add_subsumer(c, b, Rule::Conjunction);
                }
            }
            for &(a, r, b) in &o.exists_right {
                if st.subsumers[c].contains(a) {
                    changed |= st.add_edge(r, c, b, Rule::ExistsRight);
                }
            }
        }

        for r in 0..roles {
            for c in 0..n {
                let succ: Vec<NodeId> = st.edges[r][c].ones().collect();
                for d in succ {
                    for &(a, b) in &exists_left_by_role[r] {
                        if st.subsumers[d].contains(a) {
                            changed |= st.add_subsumer(c, b, Rule::ExistsLeft);
                        }
                    }
                    if st.subsumers[d].contains(BOTTOM) {
                        changed |= st.add_subsumer(c, BOTTOM, Rule::Bottom);
                    }
                    for &(e, guard) in &ranges_by_role[r] {
                        if st.guard_ok(d, guard) {
                            changed |= st.add_subsumer(d, e, Rule::Range);
                        }
                    }
                    for &i in &ri_by_role[r] {
                        let ri = &o.role_inclusions[i];
                        if !st.guard_ok(c, ri.guards[0]) || !st.guard_ok(d, ri.guards[1]) {
                            continue;
                        }
                        if ri.chain.len() == 1 {
                            changed |= st.add_edge(ri.sup, c, d, Rule::RoleHierarchy);
                        } else {
                            let next: Vec<NodeId> = st.edges[ri.chain[1]][d].ones().collect();
                            for e in next {
                                if st.guard_ok(e, ri.guards[2]) {
                                    changed |= st.add_edge(ri.sup, c, e, Rule::Composition);
                                }
                            }
                        }
                    }
                }
            }
        }

        if !nominals.is_empty() {
            let reach = reachable(&st.edges, &nominals, n);
            for d in reach.ones() {
                for &a in &nominals {
                    if !st.subsumers[d].contains(a) {
                        continue;
                    }
                    for c in 0..n {
                        if c != d
                            && st.subsumers[c].contains(a)
                            && !st.subsumers[d].is_subset(&st.subsumers[c])
                        {
                            let add: Vec<NodeId> =
                                st.subsumers[d].difference(&st.subsumers[c]).collect();
                            for s in add {
                                st.add_subsumer(c, s, Rule::Nominal);
                            }
                            changed = true;
                        }
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }

    SaturationState {
        ontology: o,
        subsumers: st.subsumers,
        edges: st.edges,
        firings: st.firings,
    }
}

fn reachable(edges: &[Vec<FixedBitSet>], roots: &[NodeId], n: usize) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(n);
    let mut stack: Vec<NodeId> = roots.to_vec();
    for &r in roots {
        seen.insert(r);
    }
    while let Some(c) = stack.pop() {
        for role in edges {
            for d in role[c].ones() {
                if !seen.put(d) {
                    stack.push(d);
                }
            }
        }
    }
    seen
}
