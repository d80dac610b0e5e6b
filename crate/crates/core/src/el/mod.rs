//! Classical EL++ reasoning over induced ontologies: normalization,
//! completion-rule saturation, atomic consequences and consistency.

mod normalize;
mod saturate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use normalize::{
    normalize, Node, NodeId, NormalOntology, NormalRoleInclusion, RangeRecord, RoleId, BOTTOM, TOP,
};
pub use saturate::{saturate, Rule, SaturationState};

use crate::kb::{ElAxiom, GroundAtom, Signature};

/// How atomic consequences of an inconsistent ontology are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InconsistencyPolicy {
    /// An inconsistent ontology entails every ground atom over the signature.
    #[default]
    Explode,
    /// An inconsistent ontology entails nothing; its mass goes to ⊥ only.
    Skip,
}

impl std::str::FromStr for InconsistencyPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "explode" => Ok(Self::Explode),
            "skip" => Ok(Self::Skip),
            other => Err(format!(
                "unknown inconsistency policy `{other}` (expected explode|skip)"
            )),
        }
    }
}

/// Result of classical reasoning over one ontology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Consistent(BTreeSet<GroundAtom>),
    Inconsistent,
}

impl Entailment {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Entailment::Consistent(_))
    }

    /// Atoms credited under `policy`; `universe` is used only when exploding.
    pub fn atoms<'a>(
        &'a self,
        policy: InconsistencyPolicy,
        universe: &'a BTreeSet<GroundAtom>,
    ) -> &'a BTreeSet<GroundAtom> {
        static EMPTY: BTreeSet<GroundAtom> = BTreeSet::new();
        match (self, policy) {
            (Entailment::Consistent(atoms), _) => atoms,
            (Entailment::Inconsistent, InconsistencyPolicy::Explode) => universe,
            (Entailment::Inconsistent, InconsistencyPolicy::Skip) => &EMPTY,
        }
    }
}

/// Saturates `axioms` and reads off consistency and atomic consequences.
pub fn entail(axioms: &[ElAxiom]) -> Entailment {
    let st = saturate(normalize(axioms));
    if st.is_consistent() {
        Entailment::Consistent(st.atomic_consequences())
    } else {
        Entailment::Inconsistent
    }
}

/// Atomic consequences of a consistent ontology; an inconsistent one yields
/// the result of `policy` over the atoms of `signature`.
pub fn atomic_cons(
    axioms: &[ElAxiom],
    policy: InconsistencyPolicy,
    signature: &Signature,
) -> BTreeSet<GroundAtom> {
    match entail(axioms) {
        Entailment::Consistent(atoms) => atoms,
        Entailment::Inconsistent => match policy {
            InconsistencyPolicy::Explode => atom_universe(signature),
            InconsistencyPolicy::Skip => BTreeSet::new(),
        },
    }
}

pub fn is_consistent(axioms: &[ElAxiom]) -> bool {
    saturate(normalize(axioms)).is_consistent()
}

/// Every ground atom over the signature's concept and role names and individuals.
pub fn atom_universe(signature: &Signature) -> BTreeSet<GroundAtom> {
    let mut out = BTreeSet::new();
    for c in &signature.concept_names {
        for a in &signature.individuals {
            out.insert(GroundAtom::new(c.clone(), [a.clone()]));
        }
    }
    for r in &signature.role_names {
        for a in &signature.individuals {
            for b in &signature.individuals {
                out.insert(GroundAtom::new(r.clone(), [a.clone(), b.clone()]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{ConceptExpr as C, Term};

    fn atoms(list: &[(&str, &[&str])]) -> BTreeSet<GroundAtom> {
        list.iter()
            .map(|(p, args)| GroundAtom::new(*p, args.iter().copied()))
            .collect()
    }

    fn rule_p_to_q(x: &str) -> ElAxiom {
        ElAxiom::Gci {
            subject: Term::Const(x.into()),
            lhs: C::atomic("p"),
            rhs: C::atomic("q"),
        }
    }

    #[test]
    fn example_worlds_consequences() {
        let c1 = vec![
            ElAxiom::concept_assertion("p", "a"),
            ElAxiom::concept_assertion("p", "b"),
        ];
        assert_eq!(
            entail(&c1),
            Entailment::Consistent(atoms(&[("p", &["a"]), ("p", &["b"])]))
        );

        let c2 = vec![
            ElAxiom::concept_assertion("p", "a"),
            ElAxiom::concept_assertion("p", "b"),
            ElAxiom::concept_assertion("p", "c"),
            rule_p_to_q("c"),
        ];
        assert_eq!(
            entail(&c2),
            Entailment::Consistent(atoms(&[
                ("p", &["a"]),
                ("p", &["b"]),
                ("p", &["c"]),
                ("q", &["c"])
            ]))
        );
    }

    #[test]
    fn guarded_rule_applies_only_to_its_individual() {
        let o = vec![
            ElAxiom::concept_assertion("p", "a"),
            ElAxiom::concept_assertion("p", "c"),
            rule_p_to_q("c"),
        ];
        let cons = atomic_cons(&o, InconsistencyPolicy::Explode, &Signature::default());
        assert!(cons.contains(&GroundAtom::new("q", ["c"])));
        assert!(!cons.contains(&GroundAtom::new("q", ["a"])));
    }

    #[test]
    fn empty_ontology() {
        assert_eq!(entail(&[]), Entailment::Consistent(BTreeSet::new()));
        assert!(is_consistent(&[]));
    }

    fn form_ontology() -> Vec<ElAxiom> {
        vec![
            ElAxiom::gci(C::atomic("Field"), C::exists("label", C::atomic("Text"))),
            ElAxiom::domain("label", C::atomic("Field")),
            ElAxiom::range("label", C::atomic("Text")),
            ElAxiom::gci(C::and(C::atomic("Field"), C::atomic("Text")), C::Bottom),
        ]
    }

    #[test]
    fn field_and_text_clash() {
        let mut o = form_ontology();
        o.push(ElAxiom::concept_assertion("Field", "f1"));
        assert!(is_consistent(&o));
        o.push(ElAxiom::concept_assertion("Text", "f1"));
        assert!(!is_consistent(&o));
    }

    #[test]
    fn policies_on_inconsistent_ontology() {
        let o = vec![
            ElAxiom::concept_assertion("A", "a"),
            ElAxiom::gci(C::atomic("A"), C::Bottom),
        ];
        let sig = Signature {
            concept_names: ["A".to_string()].into(),
            role_names: ["r".to_string()].into(),
            individuals: ["a".to_string(), "b".to_string()].into(),
            ..Default::default()
        };
        let exploded = atomic_cons(&o, InconsistencyPolicy::Explode, &sig);
        assert_eq!(exploded.len(), 2 + 4);
        assert!(atomic_cons(&o, InconsistencyPolicy::Skip, &sig).is_empty());
        assert_eq!(
            "skip".parse::<InconsistencyPolicy>(),
            Ok(InconsistencyPolicy::Skip)
        );
        assert!("other".parse::<InconsistencyPolicy>().is_err());
    }
}
