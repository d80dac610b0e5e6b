use std::collections::HashMap;
use std::fmt;

use crate::kb::{ConceptExpr, ElAxiom, Term};

pub type NodeId = usize;
pub type RoleId = usize;

pub const TOP: NodeId = 0;
pub const BOTTOM: NodeId = 1;

/// A basic concept of the normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Top,
    Bottom,
    Atomic(String),
    Nominal(String),
    /// Name introduced by normalization; `axiom` is the source axiom's position.
    Fresh {
        axiom: usize,
        seq: usize,
    },
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Top => f.write_str("⊤"),
            Node::Bottom => f.write_str("⊥"),
            Node::Atomic(a) => f.write_str(a),
            Node::Nominal(i) => write!(f, "{{{i}}}"),
            Node::Fresh { axiom, seq } => write!(f, "_X{axiom}_{seq}"),
        }
    }
}

/// `chain ⊑ sup`, optionally restricted to named individuals per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalRoleInclusion {
    pub chain: Vec<RoleId>,
    pub sup: RoleId,
    /// One entry per chain position plus the final one; `Some(n)` requires nominal node `n`.
    pub guards: Vec<Option<NodeId>>,
}

/// `ran(role) ⊑ concept`, optionally only for edges into one individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeRecord {
    pub role: RoleId,
    pub concept: NodeId,
    pub object_guard: Option<NodeId>,
}

/// Normalized ontology over basic concepts (atomic names, ⊤, ⊥, nominals and
/// fresh names).
#[derive(Debug, Clone, Default)]
pub struct NormalOntology {
    pub nodes: Vec<Node>,
    node_index: HashMap<Node, NodeId>,
    pub roles: Vec<String>,
    role_index: HashMap<String, RoleId>,
    /// `A ⊑ B`
    pub subsumptions: Vec<(NodeId, NodeId)>,
    /// `A1 ⊓ A2 ⊑ B`
    pub conjunctions: Vec<(NodeId, NodeId, NodeId)>,
    /// `A ⊑ ∃r.B`
    pub exists_right: Vec<(NodeId, RoleId, NodeId)>,
    /// `∃r.A ⊑ B`
    pub exists_left: Vec<(RoleId, NodeId, NodeId)>,
    pub role_inclusions: Vec<NormalRoleInclusion>,
    pub ranges: Vec<RangeRecord>,
}

impl NormalOntology {
    fn empty() -> Self {
        let mut o = NormalOntology::default();
        o.node(Node::Top);
        o.node(Node::Bottom);
        o
    }

    pub fn node(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.node_index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.node_index.insert(node, id);
        id
    }

    pub fn find_node(&self, node: &Node) -> Option<NodeId> {
        self.node_index.get(node).copied()
    }

    pub fn role(&mut self, name: &str) -> RoleId {
        if let Some(&id) = self.role_index.get(name) {
            return id;
        }
        let id = self.roles.len();
        self.roles.push(name.to_string());
        self.role_index.insert(name.to_string(), id);
        id
    }

    pub fn find_role(&self, name: &str) -> Option<RoleId> {
        self.role_index.get(name).copied()
    }

    pub fn fresh_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Fresh { .. }))
            .count()
    }

    /// Nominal nodes with their individual names.
    pub fn individuals(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.nodes.iter().enumerate().filter_map(|(id, n)| match n {
            Node::Nominal(i) => Some((id, i.as_str())),
            _ => None,
        })
    }

    /// Human-readable listing of the normal forms, one per line.
    pub fn render(&self) -> Vec<String> {
        let n = |id: NodeId| self.nodes[id].to_string();
        let r = |id: RoleId| self.roles[id].as_str();
        let mut out = Vec::new();
        for &(a, b) in &self.subsumptions {
            out.push(format!("{} ⊑ {}", n(a), n(b)));
        }
        for &(a1, a2, b) in &self.conjunctions {
            out.push(format!("{} ⊓ {} ⊑ {}", n(a1), n(a2), n(b)));
        }
        for &(a, role, b) in &self.exists_right {
            out.push(format!("{} ⊑ ∃{}.{}", n(a), r(role), n(b)));
        }
        for &(role, a, b) in &self.exists_left {
            out.push(format!("∃{}.{} ⊑ {}", r(role), n(a), n(b)));
        }
        for ri in &self.role_inclusions {
            let chain: Vec<&str> = ri.chain.iter().map(|&c| r(c)).collect();
            out.push(format!("{} ⊑ {}", chain.join(" ∘ "), r(ri.sup)));
        }
        for rr in &self.ranges {
            out.push(format!("ran({}) ⊑ {}", r(rr.role), n(rr.concept)));
        }
        out
    }
}

struct Normalizer<'a> {
    out: &'a mut NormalOntology,
    axiom: usize,
    seq: usize,
}

impl Normalizer<'_> {
    fn fresh(&mut self) -> NodeId {
        let node = Node::Fresh {
            axiom: self.axiom,
            seq: self.seq,
        };
        self.seq += 1;
        self.out.node(node)
    }

    fn basic(&mut self, c: &ConceptExpr) -> Option<NodeId> {
        match c {
            ConceptExpr::Top => Some(TOP),
            ConceptExpr::Bottom => Some(BOTTOM),
            ConceptExpr::Atomic(a) => Some(self.out.node(Node::Atomic(a.clone()))),
            ConceptExpr::Nominal(i) => Some(self.out.node(Node::Nominal(i.clone()))),
            _ => None,
        }
    }

    /// Returns a basic concept `B` and emits normal forms such that `c ⊑ B`
    /// and `B` can be read as exactly `c`.
    fn lhs(&mut self, c: &ConceptExpr) -> NodeId {
        if let Some(b) = self.basic(c) {
            return b;
        }
        match c {
            ConceptExpr::And(..) => {
                let parts: Vec<NodeId> = c.conjuncts().into_iter().map(|p| self.lhs(p)).collect();
                let mut acc = parts[0];
                for &next in &parts[1..] {
                    let f = self.fresh();
                    self.out.conjunctions.push((acc, next, f));
                    acc = f;
                }
                acc
            }
            ConceptExpr::Exists { role, var, filler } => {
                let filler = bind_filler(var, filler);
                let a = self.lhs(&filler);
                let r = self.out.role(role);
                let f = self.fresh();
                self.out.exists_left.push((r, a, f));
                f
            }
            _ => unreachable!("basic concepts handled above"),
        }
    }

    /// Emits normal forms for `node ⊑ c`.
    fn rhs(&mut self, node: NodeId, c: &ConceptExpr) {
        match c {
            ConceptExpr::Top => {}
            ConceptExpr::And(l, r) => {
                self.rhs(node, l);
                self.rhs(node, r);
            }
            ConceptExpr::Exists { role, var, filler } => {
                let filler = bind_filler(var, filler);
                let r = self.out.role(role);
                // one filler node per existential keeps range consequences local
                let x = self.fresh();
                self.out.exists_right.push((node, r, x));
                self.rhs(x, &filler);
            }
            basic => {
                let b = self.basic(basic).expect("basic concept");
                self.out.subsumptions.push((node, b));
            }
        }
    }

    fn guard(&mut self, t: &Term) -> Option<NodeId> {
        match t {
            Term::Const(c) => Some(self.out.node(Node::Nominal(c.clone()))),
            Term::Var(_) => None,
        }
    }

    fn axiom(&mut self, ax: &ElAxiom) {
        match ax {
            ElAxiom::Gci { subject, lhs, rhs } => {
                let lhs = with_guard(subject, lhs.clone());
                let l = self.lhs(&lhs);
                self.rhs(l, rhs);
            }
            ElAxiom::DomainRestriction {
                role,
                concept,
                subject,
                object,
            } => {
                let edge = ConceptExpr::Exists {
                    role: role.clone(),
                    var: Some(object.clone()),
                    filler: Box::new(ConceptExpr::Top),
                };
                let lhs = with_guard(subject, edge);
                let l = self.lhs(&lhs);
                self.rhs(l, concept);
            }
            ElAxiom::RangeRestriction {
                role,
                concept,
                subject,
                object,
            } => {
                // a bound subject is rejected by the fragment check
                debug_assert!(
                    subject.as_var().is_some(),
                    "range restriction with bound subject"
                );
                let r = self.out.role(role);
                let e = match self.basic(concept) {
                    Some(b) => b,
                    None => {
                        let f = self.fresh();
                        self.rhs(f, concept);
                        f
                    }
                };
                let object_guard = self.guard(object);
                self.out.ranges.push(RangeRecord {
                    role: r,
                    concept: e,
                    object_guard,
                });
            }
            ElAxiom::RoleInclusion { chain, sup, terms } => {
                let chain = chain.iter().map(|c| self.out.role(c)).collect();
                let sup = self.out.role(sup);
                let guards = terms.iter().map(|t| self.guard(t)).collect();
                self.out
                    .role_inclusions
                    .push(NormalRoleInclusion { chain, sup, guards });
            }
            ElAxiom::ConceptAssertion {
                concept,
                individual,
            } => {
                let a = self.out.node(Node::Nominal(individual.clone()));
                self.rhs(a, concept);
            }
            ElAxiom::RoleAssertion {
                role,
                subject,
                object,
            } => {
                let a = self.out.node(Node::Nominal(subject.clone()));
                let b = self.out.node(Node::Nominal(object.clone()));
                let r = self.out.role(role);
                self.out.exists_right.push((a, r, b));
            }
        }
    }
}

fn with_guard(subject: &Term, c: ConceptExpr) -> ConceptExpr {
    match subject {
        Term::Const(i) => ConceptExpr::and(ConceptExpr::Nominal(i.clone()), c),
        Term::Var(_) => c,
    }
}

fn bind_filler(var: &Option<Term>, filler: &ConceptExpr) -> ConceptExpr {
    match var {
        Some(Term::Const(d)) => ConceptExpr::and(ConceptExpr::Nominal(d.clone()), filler.clone()),
        _ => filler.clone(),
    }
}

/// Transforms axioms into normal form. Fresh names are numbered per source
/// axiom, so the result is reproducible for a given axiom order.
///
/// Concept assertions `C(a)` become `{a} ⊑ C`, role assertions `r(a,b)`
/// become `{a} ⊑ ∃r.{b}`, domain restrictions become `∃r.⊤ ⊑ C` and range
/// restrictions are kept as range records.
pub fn normalize(axioms: &[ElAxiom]) -> NormalOntology {
    let mut out = NormalOntology::empty();
    for (i, ax) in axioms.iter().enumerate() {
        let mut n = Normalizer {
            out: &mut out,
            axiom: i,
            seq: 0,
        };
        n.axiom(ax);
    }
    out
}
