//! Matching annotations against worlds and building the classical ontology
//! a world induces.

use std::collections::BTreeSet;

use crate::kb::{Annotation, AnnotationPair, ElAxiom, Substitution, TcpKnowledgeBase, Term};
use crate::mln::{GroundMln, World};

/// One way an annotation holds in a world, with the axiom it instantiates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnnotationMatch {
    pub substitution: Substitution,
    pub instantiated_axiom: ElAxiom,
}

/// All substitutions of the annotation's variables under which every pair
/// `⟨A, x⟩` grounds to an atom of `g` whose value in `w` is `x`. Sorted and
/// without duplicates; the empty annotation yields the empty substitution.
pub fn match_annotation(ann: &Annotation, w: &World, g: &GroundMln) -> Vec<Substitution> {
    let mut out = BTreeSet::new();
    let mut theta = Substitution::new();
    extend(&ann.pairs, w, g, &mut theta, &mut out);
    out.into_iter().collect()
}

fn extend(
    pairs: &[AnnotationPair],
    w: &World,
    g: &GroundMln,
    theta: &mut Substitution,
    out: &mut BTreeSet<Substitution>,
) {
    let Some((pair, rest)) = pairs.split_first() else {
        out.insert(theta.clone());
        return;
    };
    for (i, ground) in g.atoms_of(&pair.atom.predicate) {
        if w.get(i) != pair.value || ground.args.len() != pair.atom.args.len() {
            continue;
        }
        let mut added = Vec::new();
        let mut ok = true;
        for (t, c) in pair.atom.args.iter().zip(&ground.args) {
            match t {
                Term::Const(k) => ok = k == c,
                Term::Var(v) => match theta.get(v) {
                    Some(bound) => ok = bound == c,
                    None => {
                        theta.insert(v.clone(), c.clone());
                        added.push(v.clone());
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            extend(rest, w, g, theta, out);
        }
        for v in added {
            theta.remove(&v);
        }
    }
}

/// Matches of one annotated axiom, with the instantiated axioms.
pub fn annotation_matches(
    axiom: &ElAxiom,
    ann: &Annotation,
    w: &World,
    g: &GroundMln,
) -> Vec<AnnotationMatch> {
    match_annotation(ann, w, g)
        .into_iter()
        .map(|theta| AnnotationMatch {
            instantiated_axiom: axiom.substitute(&theta),
            substitution: theta,
        })
        .collect()
}

/// The axioms active in `w`: every instance `θF` of an annotated axiom
/// `F : λ` whose annotation holds under `θ`. Variables the annotation does
/// not bind stay universally quantified. Sorted, duplicates merged.
pub fn induce_ontology(kb: &TcpKnowledgeBase, w: &World, g: &GroundMln) -> Vec<ElAxiom> {
    let mut out = BTreeSet::new();
    for ax in &kb.axioms {
        if ax.annotation.is_crisp() {
            out.insert(ax.axiom.clone());
            continue;
        }
        for theta in match_annotation(&ax.annotation, w, g) {
            out.insert(ax.axiom.substitute(&theta));
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{AnnotatedAxiom, Atom, ConceptExpr as C, MlnProgram};
    use crate::mln::DEFAULT_GROUNDING_CAP;

    pub(crate) fn conditioned_kb() -> TcpKnowledgeBase {
        let ann = |pairs: &[(&str, &[&str], bool)]| {
            Annotation::new(
                pairs
                    .iter()
                    .map(|(p, args, v)| (Atom::parse_args(*p, args), *v)),
            )
        };
        let axioms = vec![
            AnnotatedAxiom::new(
                ElAxiom::gci(C::atomic("p"), C::atomic("q")),
                ann(&[("m", &["X"], true), ("n", &["X"], false)]),
            ),
            AnnotatedAxiom::new(
                ElAxiom::concept_assertion("p", "a"),
                ann(&[("m", &["a"], true)]),
            ),
            AnnotatedAxiom::new(
                ElAxiom::concept_assertion("p", "b"),
                ann(&[("n", &["a"], true)]),
            ),
            AnnotatedAxiom::new(
                ElAxiom::concept_assertion("p", "c"),
                ann(&[("m", &["c"], true), ("n", &["c"], false)]),
            ),
        ];
        let mln = MlnProgram::new()
            .with_constants(["a", "b", "c"])
            .with_formula(1.5, vec![Atom::parse_args("m", &["X"])])
            .with_formula(0.8, vec![Atom::parse_args("n", &["X"])]);
        TcpKnowledgeBase::new(axioms, mln)
    }

    fn only_false(g: &GroundMln, atom: &str) -> World {
        let mut w = World::all(g.n(), true);
        let i = g
            .atoms()
            .iter()
            .position(|a| a.to_string() == atom)
            .unwrap();
        w.set(i, false);
        w
    }

    #[test]
    fn matching_example_worlds() {
        let kb = conditioned_kb();
        let g = GroundMln::from_kb(&kb, DEFAULT_GROUNDING_CAP).unwrap();
        let ann = &kb.axioms[0].annotation;
        assert!(match_annotation(ann, &World::all(6, true), &g).is_empty());
        let m = match_annotation(ann, &only_false(&g, "n(c)"), &g);
        assert_eq!(
            m,
            vec![Substitution::from([("X".to_string(), "c".to_string())])]
        );
        let ground = &kb.axioms[1].annotation;
        assert_eq!(
            match_annotation(ground, &World::all(6, true), &g),
            vec![Substitution::new()]
        );
        assert_eq!(
            match_annotation(&Annotation::crisp(), &World::all(6, false), &g),
            vec![Substitution::new()]
        );
    }

    #[test]
    fn induced_ontologies() {
        let kb = conditioned_kb();
        let g = GroundMln::from_kb(&kb, DEFAULT_GROUNDING_CAP).unwrap();
        let o1 = induce_ontology(&kb, &World::all(6, true), &g);
        assert_eq!(
            o1,
            vec![
                ElAxiom::concept_assertion("p", "a"),
                ElAxiom::concept_assertion("p", "b")
            ]
        );
        let o2 = induce_ontology(&kb, &only_false(&g, "n(c)"), &g);
        let rule = ElAxiom::Gci {
            subject: Term::Const("c".into()),
            lhs: C::atomic("p"),
            rhs: C::atomic("q"),
        };
        let mut expected = vec![
            ElAxiom::concept_assertion("p", "a"),
            ElAxiom::concept_assertion("p", "b"),
            ElAxiom::concept_assertion("p", "c"),
            rule.clone(),
        ];
        expected.sort();
        assert_eq!(o2, expected);

        let m = annotation_matches(
            &kb.axioms[0].axiom,
            &kb.axioms[0].annotation,
            &only_false(&g, "n(c)"),
            &g,
        );
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].instantiated_axiom, rule);
    }

    #[test]
    fn crisp_kb_induces_itself() {
        let axioms = vec![
            AnnotatedAxiom::crisp(ElAxiom::gci(C::atomic("A"), C::atomic("B"))),
            AnnotatedAxiom::crisp(ElAxiom::concept_assertion("A", "a")),
        ];
        let kb = TcpKnowledgeBase::new(axioms.clone(), MlnProgram::new());
        let g = GroundMln::from_kb(&kb, DEFAULT_GROUNDING_CAP).unwrap();
        let mut expected: Vec<ElAxiom> = axioms.into_iter().map(|a| a.axiom).collect();
        expected.sort();
        assert_eq!(induce_ontology(&kb, &World(vec![]), &g), expected);
    }

    #[test]
    fn free_annotation_variables_merge() {
        // Y does not occur in the axiom: every match yields the same instance
        let kb = TcpKnowledgeBase::new(
            vec![AnnotatedAxiom::new(
                ElAxiom::concept_assertion("A", "a"),
                Annotation::new([(Atom::parse_args("m", &["Y"]), true)]),
            )],
            MlnProgram::new().with_constants(["a", "b"]),
        );
        let g = GroundMln::from_kb(&kb, DEFAULT_GROUNDING_CAP).unwrap();
        let w = World::all(g.n(), true);
        assert_eq!(match_annotation(&kb.axioms[0].annotation, &w, &g).len(), 2);
        assert_eq!(
            induce_ontology(&kb, &w, &g),
            vec![ElAxiom::concept_assertion("A", "a")]
        );
    }
}
