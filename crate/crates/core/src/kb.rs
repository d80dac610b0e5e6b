//! Knowledge base model: EL++ axioms in their first-order reading, MLN
//! annotations, the conjunctive MLN program, and structural validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Sort used for constants declared without an explicit sort.
pub const DEFAULT_SORT: &str = "_";

/// Variables start with an uppercase letter or `_`; everything else is a constant.
pub fn is_variable_name(name: &str) -> bool {
    name.chars()
        .next()
        .map(|c| c.is_uppercase() || c == '_')
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn parse(name: &str) -> Term {
        if is_variable_name(name) {
            Term::Var(name.to_string())
        } else {
            Term::Const(name.to_string())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(v) | Term::Const(v) => v,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn substitute(&self, theta: &Substitution) -> Term {
        match self {
            Term::Var(v) => match theta.get(v) {
                Some(c) => Term::Const(c.clone()),
                None => self.clone(),
            },
            Term::Const(_) => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Variable → constant mapping.
pub type Substitution = BTreeMap<String, String>;

/// A ground atom. The derived order (predicate, then argument tuple) is the
/// canonical atom order used everywhere results are sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<P: Into<String>, I: IntoIterator<Item = S>, S: Into<String>>(
        predicate: P,
        args: I,
    ) -> Self {
        Self {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

/// An atom whose arguments may be variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new<P: Into<String>>(predicate: P, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    /// Builds an atom from argument names, classifying each as variable or constant.
    pub fn parse_args<P: Into<String>>(predicate: P, args: &[&str]) -> Self {
        Self::new(predicate, args.iter().map(|a| Term::parse(a)).collect())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn substitute(&self, theta: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.substitute(theta)).collect(),
        }
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let mut args = Vec::with_capacity(self.args.len());
        for t in &self.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                Term::Var(_) => return None,
            }
        }
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Most general unifier of two atoms, if one exists.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    // both atoms come from one annotation, so their variables share a namespace
    let mut bindings: BTreeMap<String, Term> = BTreeMap::new();
    fn resolve(t: &Term, bindings: &BTreeMap<String, Term>) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = &cur {
            match bindings.get(v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        let x = resolve(x, &bindings);
        let y = resolve(y, &bindings);
        match (&x, &y) {
            (Term::Const(c1), Term::Const(c2)) => {
                if c1 != c2 {
                    return None;
                }
            }
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if let Term::Var(w) = other {
                    if w == v {
                        continue;
                    }
                }
                bindings.insert(v.clone(), other.clone());
            }
        }
    }
    let mut theta = Substitution::new();
    for v in bindings.keys() {
        if let Term::Const(c) = resolve(&Term::Var(v.clone()), &bindings) {
            theta.insert(v.clone(), c);
        }
    }
    Some(theta)
}

/// EL++ concept expressions (concrete domains excluded).
///
/// `Exists` optionally carries the logical variable naming its filler in
/// the axiom's first-order reading. Once that variable is bound to a
/// constant `d`, the filler is read as `{d} ⊓ filler`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atomic(String),
    Nominal(String),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists {
        role: String,
        var: Option<Term>,
        filler: Box<ConceptExpr>,
    },
}

impl ConceptExpr {
    pub fn atomic<S: Into<String>>(name: S) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn nominal<S: Into<String>>(name: S) -> Self {
        ConceptExpr::Nominal(name.into())
    }

    pub fn and(left: ConceptExpr, right: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(left), Box::new(right))
    }

    pub fn exists<S: Into<String>>(role: S, filler: ConceptExpr) -> Self {
        ConceptExpr::Exists {
            role: role.into(),
            var: None,
            filler: Box::new(filler),
        }
    }

    pub fn exists_var<S: Into<String>, V: Into<String>>(
        role: S,
        var: V,
        filler: ConceptExpr,
    ) -> Self {
        ConceptExpr::Exists {
            role: role.into(),
            var: Some(Term::parse(&var.into())),
            filler: Box::new(filler),
        }
    }

    /// Left-nested conjunction of the given parts; `Top` when empty.
    pub fn conjunction<I: IntoIterator<Item = ConceptExpr>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(ConceptExpr::and)
            .unwrap_or(ConceptExpr::Top)
    }

    /// Flattened top-level conjuncts.
    pub fn conjuncts(&self) -> Vec<&ConceptExpr> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a ConceptExpr, out: &mut Vec<&'a ConceptExpr>) {
            match c {
                ConceptExpr::And(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn substitute(&self, theta: &Substitution) -> ConceptExpr {
        match self {
            ConceptExpr::And(l, r) => ConceptExpr::and(l.substitute(theta), r.substitute(theta)),
            ConceptExpr::Exists { role, var, filler } => ConceptExpr::Exists {
                role: role.clone(),
                var: var.as_ref().map(|t| t.substitute(theta)),
                filler: Box::new(filler.substitute(theta)),
            },
            other => other.clone(),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ConceptExpr::And(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            ConceptExpr::Exists { var, filler, .. } => {
                if let Some(Term::Var(v)) = var {
                    out.push(v);
                }
                filler.collect_vars(out);
            }
            _ => {}
        }
    }

    fn collect_names(
        &self,
        concepts: &mut BTreeSet<String>,
        roles: &mut BTreeSet<String>,
        individuals: &mut BTreeSet<String>,
    ) {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::Atomic(a) => {
                concepts.insert(a.clone());
            }
            ConceptExpr::Nominal(i) => {
                individuals.insert(i.clone());
            }
            ConceptExpr::And(l, r) => {
                l.collect_names(concepts, roles, individuals);
                r.collect_names(concepts, roles, individuals);
            }
            ConceptExpr::Exists { role, var, filler } => {
                roles.insert(role.clone());
                if let Some(Term::Const(c)) = var {
                    individuals.insert(c.clone());
                }
                filler.collect_names(concepts, roles, individuals);
            }
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Top => f.write_str("⊤"),
            ConceptExpr::Bottom => f.write_str("⊥"),
            ConceptExpr::Atomic(a) => f.write_str(a),
            ConceptExpr::Nominal(i) => write!(f, "{{{i}}}"),
            ConceptExpr::And(l, r) => write!(f, "({l} ⊓ {r})"),
            ConceptExpr::Exists { role, var, filler } => match var {
                Some(Term::Const(c)) => write!(f, "∃{role}.({{{c}}} ⊓ {filler})"),
                _ => write!(f, "∃{role}.{filler}"),
            },
        }
    }
}

/// EL++ axioms in their first-order reading.
///
/// Each variant keeps the logical variables of its canonical translation so
/// annotations can bind them. Substituting a constant for a variable
/// restricts the axiom to that individual.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElAxiom {
    /// `∀subject. lhs(subject) → rhs(subject)`.
    Gci {
        subject: Term,
        lhs: ConceptExpr,
        rhs: ConceptExpr,
    },
    /// `r1(X,Y) [∧ r2(Y,Z)] → sup(X, last)`; `terms` has `chain.len() + 1` entries.
    RoleInclusion {
        chain: Vec<String>,
        sup: String,
        terms: Vec<Term>,
    },
    /// `role(subject, object) → concept(subject)`.
    DomainRestriction {
        role: String,
        concept: ConceptExpr,
        subject: Term,
        object: Term,
    },
    /// `role(subject, object) → concept(object)`.
    RangeRestriction {
        role: String,
        concept: ConceptExpr,
        subject: Term,
        object: Term,
    },
    ConceptAssertion {
        concept: ConceptExpr,
        individual: String,
    },
    RoleAssertion {
        role: String,
        subject: String,
        object: String,
    },
}

impl ElAxiom {
    pub fn gci(lhs: ConceptExpr, rhs: ConceptExpr) -> Self {
        ElAxiom::Gci {
            subject: Term::Var("X".into()),
            lhs,
            rhs,
        }
    }

    pub fn role_inclusion(chain: &[&str], sup: &str) -> Self {
        let terms = ["X", "Y", "Z"]
            .iter()
            .take(chain.len() + 1)
            .map(|v| Term::Var(v.to_string()))
            .collect();
        ElAxiom::RoleInclusion {
            chain: chain.iter().map(|r| r.to_string()).collect(),
            sup: sup.to_string(),
            terms,
        }
    }

    pub fn domain(role: &str, concept: ConceptExpr) -> Self {
        ElAxiom::DomainRestriction {
            role: role.into(),
            concept,
            subject: Term::Var("X".into()),
            object: Term::Var("Y".into()),
        }
    }

    pub fn range(role: &str, concept: ConceptExpr) -> Self {
        ElAxiom::RangeRestriction {
            role: role.into(),
            concept,
            subject: Term::Var("X".into()),
            object: Term::Var("Y".into()),
        }
    }

    pub fn concept_assertion(concept: &str, individual: &str) -> Self {
        ElAxiom::ConceptAssertion {
            concept: ConceptExpr::atomic(concept),
            individual: individual.into(),
        }
    }

    pub fn role_assertion(role: &str, subject: &str, object: &str) -> Self {
        ElAxiom::RoleAssertion {
            role: role.into(),
            subject: subject.into(),
            object: object.into(),
        }
    }

    /// Variables of the axiom's first-order reading, in order of appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            ElAxiom::Gci { subject, lhs, rhs } => {
                if let Term::Var(v) = subject {
                    out.push(v.as_str());
                }
                lhs.collect_vars(&mut out);
                rhs.collect_vars(&mut out);
            }
            ElAxiom::RoleInclusion { terms, .. } => {
                out.extend(terms.iter().filter_map(Term::as_var))
            }
            ElAxiom::DomainRestriction {
                subject, object, ..
            }
            | ElAxiom::RangeRestriction {
                subject, object, ..
            } => {
                out.extend(subject.as_var());
                out.extend(object.as_var());
            }
            ElAxiom::ConceptAssertion { .. } | ElAxiom::RoleAssertion { .. } => {}
        }
        out
    }

    pub fn substitute(&self, theta: &Substitution) -> ElAxiom {
        if theta.is_empty() {
            return self.clone();
        }
        match self {
            ElAxiom::Gci { subject, lhs, rhs } => ElAxiom::Gci {
                subject: subject.substitute(theta),
                lhs: lhs.substitute(theta),
                rhs: rhs.substitute(theta),
            },
            ElAxiom::RoleInclusion { chain, sup, terms } => ElAxiom::RoleInclusion {
                chain: chain.clone(),
                sup: sup.clone(),
                terms: terms.iter().map(|t| t.substitute(theta)).collect(),
            },
            ElAxiom::DomainRestriction {
                role,
                concept,
                subject,
                object,
            } => ElAxiom::DomainRestriction {
                role: role.clone(),
                concept: concept.substitute(theta),
                subject: subject.substitute(theta),
                object: object.substitute(theta),
            },
            ElAxiom::RangeRestriction {
                role,
                concept,
                subject,
                object,
            } => ElAxiom::RangeRestriction {
                role: role.clone(),
                concept: concept.substitute(theta),
                subject: subject.substitute(theta),
                object: object.substitute(theta),
            },
            other => other.clone(),
        }
    }

    /// Adds the concept, role and individual names used by the axiom.
    pub fn collect_names(
        &self,
        concepts: &mut BTreeSet<String>,
        roles: &mut BTreeSet<String>,
        individuals: &mut BTreeSet<String>,
    ) {
        let term = |t: &Term, individuals: &mut BTreeSet<String>| {
            if let Term::Const(c) = t {
                individuals.insert(c.clone());
            }
        };
        match self {
            ElAxiom::Gci { subject, lhs, rhs } => {
                term(subject, individuals);
                lhs.collect_names(concepts, roles, individuals);
                rhs.collect_names(concepts, roles, individuals);
            }
            ElAxiom::RoleInclusion { chain, sup, terms } => {
                roles.extend(chain.iter().cloned());
                roles.insert(sup.clone());
                for t in terms {
                    term(t, individuals);
                }
            }
            ElAxiom::DomainRestriction {
                role,
                concept,
                subject,
                object,
            }
            | ElAxiom::RangeRestriction {
                role,
                concept,
                subject,
                object,
            } => {
                roles.insert(role.clone());
                concept.collect_names(concepts, roles, individuals);
                term(subject, individuals);
                term(object, individuals);
            }
            ElAxiom::ConceptAssertion {
                concept,
                individual,
            } => {
                concept.collect_names(concepts, roles, individuals);
                individuals.insert(individual.clone());
            }
            ElAxiom::RoleAssertion {
                role,
                subject,
                object,
            } => {
                roles.insert(role.clone());
                individuals.insert(subject.clone());
                individuals.insert(object.clone());
            }
        }
    }
}

impl fmt::Display for ElAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let guard = |t: &Term| match t {
            Term::Const(c) => format!("{{{c}}} ⊓ "),
            Term::Var(_) => String::new(),
        };
        match self {
            ElAxiom::Gci { subject, lhs, rhs } => write!(f, "{}{lhs} ⊑ {rhs}", guard(subject)),
            ElAxiom::RoleInclusion { chain, sup, terms } => {
                write!(f, "{} ⊑ {sup}", chain.join(" ∘ "))?;
                if terms.iter().any(|t| matches!(t, Term::Const(_))) {
                    let shown: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                    write!(f, " [{}]", shown.join(","))?;
                }
                Ok(())
            }
            ElAxiom::DomainRestriction {
                role,
                concept,
                subject,
                object,
            } => {
                write!(f, "dom({role}) ⊑ {concept}")?;
                if subject.as_var().is_none() || object.as_var().is_none() {
                    write!(f, " [{subject},{object}]")?;
                }
                Ok(())
            }
            ElAxiom::RangeRestriction {
                role,
                concept,
                subject,
                object,
            } => {
                write!(f, "ran({role}) ⊑ {concept}")?;
                if subject.as_var().is_none() || object.as_var().is_none() {
                    write!(f, " [{subject},{object}]")?;
                }
                Ok(())
            }
            ElAxiom::ConceptAssertion {
                concept,
                individual,
            } => write!(f, "{concept}({individual})"),
            ElAxiom::RoleAssertion {
                role,
                subject,
                object,
            } => write!(f, "{role}({subject},{object})"),
        }
    }
}

/// One `⟨atom, value⟩` pair of a probabilistic annotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotationPair {
    pub atom: Atom,
    pub value: bool,
}

impl fmt::Display for AnnotationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.atom, u8::from(self.value))
    }
}

/// Partial truth assignment to MLN atoms attached to an axiom. Empty means crisp.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Annotation {
    pub pairs: Vec<AnnotationPair>,
}

impl Annotation {
    pub fn crisp() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = (Atom, bool)>>(pairs: I) -> Self {
        Self {
            pairs: pairs
                .into_iter()
                .map(|(atom, value)| AnnotationPair { atom, value })
                .collect(),
        }
    }

    pub fn is_crisp(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.pairs.iter().flat_map(|p| p.atom.variables()).collect()
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotatedAxiom {
    pub axiom: ElAxiom,
    pub annotation: Annotation,
}

impl AnnotatedAxiom {
    pub fn new(axiom: ElAxiom, annotation: Annotation) -> Self {
        Self { axiom, annotation }
    }

    pub fn crisp(axiom: ElAxiom) -> Self {
        Self::new(axiom, Annotation::crisp())
    }

    /// Axiom positions that are constants or bound by the annotation.
    fn bound_variables(&self) -> BTreeSet<String> {
        self.annotation
            .variables()
            .into_iter()
            .map(str::to_string)
            .collect()
    }
}

impl fmt::Display for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.axiom, self.annotation)
    }
}

/// General MLN formula syntax. Only conjunctions of positive atoms are
/// accepted by [`validate_cmln`]; the other connectives exist so that
/// documents using them can be parsed and then rejected with a location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MlnFormula {
    Atom(Atom),
    Not(Box<MlnFormula>),
    And(Vec<MlnFormula>),
    Or(Vec<MlnFormula>),
}

impl MlnFormula {
    pub fn conjunction(atoms: Vec<Atom>) -> Self {
        MlnFormula::And(atoms.into_iter().map(MlnFormula::Atom).collect())
    }

    /// The positive atoms of a conjunctive formula, or `None` otherwise.
    pub fn conjuncts(&self) -> Option<Vec<&Atom>> {
        fn walk<'a>(f: &'a MlnFormula, out: &mut Vec<&'a Atom>) -> bool {
            match f {
                MlnFormula::Atom(a) => {
                    out.push(a);
                    true
                }
                MlnFormula::And(parts) => parts.iter().all(|p| walk(p, out)),
                MlnFormula::Not(_) | MlnFormula::Or(_) => false,
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out).then_some(out)
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        fn walk<'a>(f: &'a MlnFormula, out: &mut Vec<&'a Atom>) {
            match f {
                MlnFormula::Atom(a) => out.push(a),
                MlnFormula::Not(inner) => walk(inner, out),
                MlnFormula::And(parts) | MlnFormula::Or(parts) => {
                    parts.iter().for_each(|p| walk(p, out))
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for MlnFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, parts: &[MlnFormula], op: &str| -> fmt::Result {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                match p {
                    MlnFormula::And(_) | MlnFormula::Or(_) => write!(f, "({p})")?,
                    _ => write!(f, "{p}")?,
                }
            }
            Ok(())
        };
        match self {
            MlnFormula::Atom(a) => write!(f, "{a}"),
            MlnFormula::Not(inner) => match **inner {
                MlnFormula::Atom(_) | MlnFormula::Not(_) => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            MlnFormula::And(parts) => join(f, parts, "&"),
            MlnFormula::Or(parts) => join(f, parts, "|"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFormula {
    pub formula: MlnFormula,
    pub weight: f64,
}

/// Markov logic program: weighted formulas, constants per sort and optional
/// predicate scoping rules.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MlnProgram {
    pub formulas: Vec<WeightedFormula>,
    /// sort → constants; [`DEFAULT_SORT`] holds unsorted constants.
    pub constants: BTreeMap<String, BTreeSet<String>>,
    /// predicate → argument sorts.
    pub scopes: BTreeMap<String, Vec<String>>,
}

impl MlnProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_constants<I: IntoIterator<Item = S>, S: Into<String>>(
        mut self,
        constants: I,
    ) -> Self {
        self.constants
            .entry(DEFAULT_SORT.to_string())
            .or_default()
            .extend(constants.into_iter().map(Into::into));
        self
    }

    pub fn with_sorted_constants<I: IntoIterator<Item = S>, S: Into<String>>(
        mut self,
        sort: &str,
        constants: I,
    ) -> Self {
        self.constants
            .entry(sort.to_string())
            .or_default()
            .extend(constants.into_iter().map(Into::into));
        self
    }

    pub fn with_scope(mut self, predicate: &str, sorts: &[&str]) -> Self {
        self.scopes.insert(
            predicate.to_string(),
            sorts.iter().map(|s| s.to_string()).collect(),
        );
        self
    }

    pub fn with_formula(mut self, weight: f64, atoms: Vec<Atom>) -> Self {
        self.formulas.push(WeightedFormula {
            formula: MlnFormula::conjunction(atoms),
            weight,
        });
        self
    }

    /// Δ_MLN: every declared constant, across sorts.
    pub fn all_constants(&self) -> BTreeSet<String> {
        self.constants.values().flatten().cloned().collect()
    }
}

/// The names a knowledge base is built over.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub concept_names: BTreeSet<String>,
    pub role_names: BTreeSet<String>,
    /// Ontology individuals; MLN constants are shared with the ontology and included.
    pub individuals: BTreeSet<String>,
    pub mln_predicates: BTreeMap<String, usize>,
    pub mln_constants: BTreeSet<String>,
}

impl Signature {
    /// Infers the signature from the axioms, annotations and program.
    /// Conflicting arities are kept at the first seen; [`validate_kb`] reports them.
    pub fn infer(axioms: &[AnnotatedAxiom], mln: &MlnProgram) -> Signature {
        let mut sig = Signature::default();
        for ax in axioms {
            ax.axiom.collect_names(
                &mut sig.concept_names,
                &mut sig.role_names,
                &mut sig.individuals,
            );
            for p in &ax.annotation.pairs {
                sig.mln_predicates
                    .entry(p.atom.predicate.clone())
                    .or_insert(p.atom.args.len());
            }
        }
        for f in &mln.formulas {
            for a in f.formula.atoms() {
                sig.mln_predicates
                    .entry(a.predicate.clone())
                    .or_insert(a.args.len());
            }
        }
        for (p, sorts) in &mln.scopes {
            sig.mln_predicates.entry(p.clone()).or_insert(sorts.len());
        }
        sig.mln_constants = mln.all_constants();
        sig.individuals.extend(sig.mln_constants.iter().cloned());
        sig
    }
}

/// A tightly coupled probabilistic EL++ knowledge base `(O, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcpKnowledgeBase {
    pub signature: Signature,
    pub axioms: Vec<AnnotatedAxiom>,
    pub mln: MlnProgram,
}

impl TcpKnowledgeBase {
    pub fn new(axioms: Vec<AnnotatedAxiom>, mln: MlnProgram) -> Self {
        let signature = Signature::infer(&axioms, &mln);
        Self {
            signature,
            axioms,
            mln,
        }
    }
}

/// A structural validation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("unknown MLN predicate `{predicate}`")]
    UnknownPredicate { predicate: String },
    #[error("predicate `{predicate}` has arity {expected} but is used with {found} arguments")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("annotation pairs {first} and {second} unify; annotation atoms must not be unifiable")]
    UnifiablePairs { first: String, second: String },
    #[error("MLN constant `{constant}` is not declared")]
    UndeclaredConstant { constant: String },
    #[error("formula {formula} is an empty conjunction")]
    EmptyConjunction { formula: usize },
    #[error("formula {formula} has non-finite weight {weight}")]
    NonFiniteWeight { formula: usize, weight: f64 },
    #[error("formula {formula} (`{text}`) is not a conjunction of positive atoms")]
    NotConjunctive { formula: usize, text: String },
    #[error("scope for `{predicate}` names unknown sort `{sort}`")]
    UnknownSort { predicate: String, sort: String },
    #[error("name `{name}` is used both as an MLN predicate and as a {kind} name")]
    SignatureClash { name: String, kind: &'static str },
    #[error("name `{name}` is used both as a concept and as a role")]
    ConceptRoleClash { name: String },
    #[error("unsupported axiom form `{axiom}`: {reason}")]
    UnsupportedForm { axiom: String, reason: String },
    #[error("role `{role}` is the superrole of composition `{chain_axiom}` and carries range restriction `{range_axiom}`")]
    RoleRangeConflict {
        role: String,
        chain_axiom: String,
        range_axiom: String,
    },
    #[error("annotation binds variable `{variable}` of `{axiom}`: {reason}")]
    UnsafeBinding {
        axiom: String,
        variable: String,
        reason: String,
    },
}

/// Checks an annotation against the MLN predicates: declared predicates,
/// correct arity, and no two pairs with unifiable atoms.
pub fn validate_annotation(
    ann: &Annotation,
    predicates: &BTreeMap<String, usize>,
) -> Result<(), Violation> {
    for p in &ann.pairs {
        match predicates.get(&p.atom.predicate) {
            None => {
                return Err(Violation::UnknownPredicate {
                    predicate: p.atom.predicate.clone(),
                })
            }
            Some(&arity) if arity != p.atom.args.len() => {
                return Err(Violation::ArityMismatch {
                    predicate: p.atom.predicate.clone(),
                    expected: arity,
                    found: p.atom.args.len(),
                })
            }
            Some(_) => {}
        }
    }
    for (i, a) in ann.pairs.iter().enumerate() {
        for b in &ann.pairs[i + 1..] {
            if unify(&a.atom, &b.atom).is_some() {
                return Err(Violation::UnifiablePairs {
                    first: a.to_string(),
                    second: b.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Checks that every formula is a non-empty conjunction of positive atoms
/// with a finite weight.
pub fn validate_cmln(m: &MlnProgram) -> Result<(), Violation> {
    for (i, f) in m.formulas.iter().enumerate() {
        let Some(atoms) = f.formula.conjuncts() else {
            return Err(Violation::NotConjunctive {
                formula: i,
                text: f.formula.to_string(),
            });
        };
        if atoms.is_empty() {
            return Err(Violation::EmptyConjunction { formula: i });
        }
        if !f.weight.is_finite() {
            return Err(Violation::NonFiniteWeight {
                formula: i,
                weight: f.weight,
            });
        }
    }
    for (p, sorts) in &m.scopes {
        for s in sorts {
            if s != DEFAULT_SORT && !m.constants.contains_key(s) {
                return Err(Violation::UnknownSort {
                    predicate: p.clone(),
                    sort: s.clone(),
                });
            }
        }
    }
    Ok(())
}

fn unsupported(ax: &ElAxiom, reason: impl Into<String>) -> Violation {
    Violation::UnsupportedForm {
        axiom: ax.to_string(),
        reason: reason.into(),
    }
}

/// Roles reachable upwards from `role` through length-1 role inclusions (reflexive).
fn super_roles<'a>(role: &'a str, context: &'a [AnnotatedAxiom]) -> BTreeSet<&'a str> {
    let mut out = BTreeSet::from([role]);
    let mut frontier = vec![role];
    while let Some(r) = frontier.pop() {
        for ax in context {
            if let ElAxiom::RoleInclusion { chain, sup, .. } = &ax.axiom {
                if chain.len() == 1 && chain[0] == r && out.insert(sup.as_str()) {
                    frontier.push(sup);
                }
            }
        }
    }
    out
}

fn range_on<'a>(roles: &BTreeSet<&str>, context: &'a [AnnotatedAxiom]) -> Option<&'a ElAxiom> {
    context.iter().map(|a| &a.axiom).find(|ax| match ax {
        ElAxiom::RangeRestriction { role, .. } => roles.contains(role.as_str()),
        _ => false,
    })
}

fn check_concept(
    ax: &ElAxiom,
    c: &ConceptExpr,
    seen_vars: &mut BTreeSet<String>,
) -> Result<(), Violation> {
    match c {
        ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Nominal(_) => Ok(()),
        ConceptExpr::Atomic(a) if a.is_empty() => Err(unsupported(ax, "empty concept name")),
        ConceptExpr::Atomic(_) => Ok(()),
        ConceptExpr::And(l, r) => {
            check_concept(ax, l, seen_vars)?;
            check_concept(ax, r, seen_vars)
        }
        ConceptExpr::Exists { role, var, filler } => {
            if role.is_empty() {
                return Err(unsupported(ax, "empty role name"));
            }
            if let Some(Term::Var(v)) = var {
                if !seen_vars.insert(v.clone()) {
                    return Err(unsupported(
                        ax,
                        format!("variable `{v}` names two positions"),
                    ));
                }
            }
            check_concept(ax, filler, seen_vars)
        }
    }
}

/// Checks that an annotated axiom is one of the supported EL++ forms and
/// that it does not combine with `context` in a way the completion rules
/// cannot handle soundly:
///
/// * a role that is (or is above) the superrole of a composition chain must
///   not carry a range restriction;
/// * the subject variable of a range restriction must not be bound;
/// * the subject variable of a role inclusion must not be bound when the
///   superrole (or a role above it) carries a range restriction.
pub fn check_el_fragment(ax: &AnnotatedAxiom, context: &[AnnotatedAxiom]) -> Result<(), Violation> {
    let axiom = &ax.axiom;
    let bound = ax.bound_variables();
    let is_bound = |t: &Term| match t {
        Term::Const(_) => true,
        Term::Var(v) => bound.contains(v),
    };
    match axiom {
        ElAxiom::Gci { subject, lhs, rhs } => {
            let mut seen = BTreeSet::new();
            if let Term::Var(v) = subject {
                seen.insert(v.clone());
            }
            check_concept(axiom, lhs, &mut seen)?;
            check_concept(axiom, rhs, &mut seen)?;
        }
        ElAxiom::RoleInclusion { chain, sup, terms } => {
            if chain.is_empty() || chain.len() > 2 {
                return Err(unsupported(
                    axiom,
                    "role chains must have length 1 or 2; split longer chains",
                ));
            }
            if terms.len() != chain.len() + 1 {
                return Err(unsupported(
                    axiom,
                    "role inclusion needs one term per chain position",
                ));
            }
            let vars: Vec<&str> = terms.iter().filter_map(Term::as_var).collect();
            if vars.iter().collect::<BTreeSet<_>>().len() != vars.len() {
                return Err(unsupported(
                    axiom,
                    "role inclusion variables must be distinct",
                ));
            }
            let supers = super_roles(sup, context);
            if chain.len() == 2 {
                if let Some(range) = range_on(&supers, context) {
                    let role = match range {
                        ElAxiom::RangeRestriction { role, .. } => role.clone(),
                        _ => unreachable!(),
                    };
                    return Err(Violation::RoleRangeConflict {
                        role,
                        chain_axiom: axiom.to_string(),
                        range_axiom: range.to_string(),
                    });
                }
            } else if is_bound(&terms[0]) {
                if let Some(range) = range_on(&supers, context) {
                    return Err(Violation::UnsafeBinding {
                        axiom: axiom.to_string(),
                        variable: terms[0].to_string(),
                        reason: format!("the superrole carries range restriction `{range}`"),
                    });
                }
            }
        }
        ElAxiom::DomainRestriction {
            subject,
            object,
            concept,
            ..
        } => {
            if subject == object {
                return Err(unsupported(
                    axiom,
                    "domain restriction needs two distinct terms",
                ));
            }
            check_concept(axiom, concept, &mut BTreeSet::new())?;
        }
        ElAxiom::RangeRestriction {
            role,
            subject,
            object,
            concept,
        } => {
            if subject == object {
                return Err(unsupported(
                    axiom,
                    "range restriction needs two distinct terms",
                ));
            }
            check_concept(axiom, concept, &mut BTreeSet::new())?;
            if is_bound(subject) {
                return Err(Violation::UnsafeBinding {
                    axiom: axiom.to_string(),
                    variable: subject.to_string(),
                    reason: "ranges restricted to one subject individual are not EL++".into(),
                });
            }
            // the conflict is also reported from the range side
            for other in context {
                if let ElAxiom::RoleInclusion { chain, sup, .. } = &other.axiom {
                    if chain.len() == 2 && super_roles(sup, context).contains(role.as_str()) {
                        return Err(Violation::RoleRangeConflict {
                            role: role.clone(),
                            chain_axiom: other.axiom.to_string(),
                            range_axiom: axiom.to_string(),
                        });
                    }
                }
            }
        }
        ElAxiom::ConceptAssertion {
            concept,
            individual,
        } => {
            if individual.is_empty() {
                return Err(unsupported(axiom, "empty individual name"));
            }
            check_concept(axiom, concept, &mut BTreeSet::new())?;
        }
        ElAxiom::RoleAssertion {
            role,
            subject,
            object,
        } => {
            if role.is_empty() || subject.is_empty() || object.is_empty() {
                return Err(unsupported(axiom, "empty name in role assertion"));
            }
        }
    }
    Ok(())
}

/// Where a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Axiom(usize),
    Formula(usize),
    Program,
    Signature,
}

/// Runs every validator over a knowledge base, collecting all violations.
pub fn validate_kb(kb: &TcpKnowledgeBase) -> Vec<(Item, Violation)> {
    let mut out = Vec::new();
    let sig = &kb.signature;
    for name in sig.mln_predicates.keys() {
        if sig.concept_names.contains(name) {
            out.push((
                Item::Signature,
                Violation::SignatureClash {
                    name: name.clone(),
                    kind: "concept",
                },
            ));
        }
        if sig.role_names.contains(name) {
            out.push((
                Item::Signature,
                Violation::SignatureClash {
                    name: name.clone(),
                    kind: "role",
                },
            ));
        }
    }
    for name in sig.concept_names.intersection(&sig.role_names) {
        out.push((
            Item::Signature,
            Violation::ConceptRoleClash { name: name.clone() },
        ));
    }
    // arity consistency of MLN atoms in formulas
    for (i, f) in kb.mln.formulas.iter().enumerate() {
        for a in f.formula.atoms() {
            let expected = sig.mln_predicates[&a.predicate];
            if expected != a.args.len() {
                out.push((
                    Item::Formula(i),
                    Violation::ArityMismatch {
                        predicate: a.predicate.clone(),
                        expected,
                        found: a.args.len(),
                    },
                ));
            }
            for t in &a.args {
                if let Term::Const(c) = t {
                    if !sig.mln_constants.contains(c) {
                        out.push((
                            Item::Formula(i),
                            Violation::UndeclaredConstant {
                                constant: c.clone(),
                            },
                        ));
                    }
                }
            }
        }
    }
    for (p, sorts) in &kb.mln.scopes {
        let expected = sig.mln_predicates[p];
        if expected != sorts.len() {
            out.push((
                Item::Program,
                Violation::ArityMismatch {
                    predicate: p.clone(),
                    expected,
                    found: sorts.len(),
                },
            ));
        }
    }
    if let Err(v) = validate_cmln(&kb.mln) {
        let item = match &v {
            Violation::EmptyConjunction { formula }
            | Violation::NonFiniteWeight { formula, .. }
            | Violation::NotConjunctive { formula, .. } => Item::Formula(*formula),
            _ => Item::Program,
        };
        out.push((item, v));
    }
    for (i, ax) in kb.axioms.iter().enumerate() {
        if let Err(v) = validate_annotation(&ax.annotation, &sig.mln_predicates) {
            out.push((Item::Axiom(i), v));
        }
        for p in &ax.annotation.pairs {
            for t in &p.atom.args {
                if let Term::Const(c) = t {
                    if !sig.mln_constants.contains(c) {
                        out.push((
                            Item::Axiom(i),
                            Violation::UndeclaredConstant {
                                constant: c.clone(),
                            },
                        ));
                    }
                }
            }
        }
        if let Err(v) = check_el_fragment(ax, &kb.axioms) {
            out.push((Item::Axiom(i), v));
        }
    }
    out
}
