use std::collections::BTreeSet;
use std::fmt::Write;

use crate::kb::{
    Annotation, ConceptExpr, ElAxiom, MlnFormula, TcpKnowledgeBase, Term, DEFAULT_SORT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SerializeError {
    #[error("axiom `{axiom}` has no surface form: {reason}")]
    Inexpressible { axiom: String, reason: String },
    #[error("formula {formula} has no surface form: {reason}")]
    InexpressibleFormula { formula: usize, reason: String },
}

struct Names {
    used: BTreeSet<String>,
    next: usize,
}

impl Names {
    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("V{}", self.next);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn var_name(t: &Term) -> Result<&str, String> {
    match t {
        Term::Var(v) => Ok(v),
        Term::Const(c) => Err(format!("position bound to constant `{c}`")),
    }
}

fn body_atoms(
    c: &ConceptExpr,
    v: &str,
    names: &mut Names,
    out: &mut Vec<String>,
) -> Result<(), String> {
    match c {
        ConceptExpr::Top => Ok(()),
        ConceptExpr::Atomic(a) => {
            out.push(format!("{a}({v})"));
            Ok(())
        }
        ConceptExpr::And(l, r) => {
            body_atoms(l, v, names, out)?;
            body_atoms(r, v, names, out)
        }
        ConceptExpr::Exists { role, var, filler } => {
            let child = match var {
                Some(t) => var_name(t)?.to_string(),
                None => names.fresh(),
            };
            out.push(format!("{role}({v},{child})"));
            body_atoms(filler, &child, names, out)
        }
        ConceptExpr::Bottom => Err("`⊥` on the left".into()),
        ConceptExpr::Nominal(n) => Err(format!("nominal `{{{n}}}`")),
    }
}

fn head_items(
    c: &ConceptExpr,
    v: &str,
    names: &mut Names,
    out: &mut Vec<String>,
) -> Result<(), String> {
    match c {
        ConceptExpr::Atomic(a) => {
            out.push(format!("{a}({v})"));
            Ok(())
        }
        ConceptExpr::And(l, r) => {
            head_items(l, v, names, out)?;
            head_items(r, v, names, out)
        }
        ConceptExpr::Exists { role, var, filler } => {
            let child = match var {
                Some(t) => var_name(t)?.to_string(),
                None => names.fresh(),
            };
            let mut inner = vec![format!("{role}({v},{child})")];
            if **filler != ConceptExpr::Top {
                head_items(filler, &child, names, &mut inner)?;
            }
            out.push(format!("exists {child}.({})", inner.join(" & ")));
            Ok(())
        }
        ConceptExpr::Top => Err("`⊤` on the right".into()),
        ConceptExpr::Bottom => Err("`⊥` inside a conjunction".into()),
        ConceptExpr::Nominal(n) => Err(format!("nominal `{{{n}}}`")),
    }
}

fn atomic_conjunction(c: &ConceptExpr, v: &str) -> Result<String, String> {
    let mut out = Vec::new();
    for part in c.conjuncts() {
        match part {
            ConceptExpr::Atomic(a) => out.push(format!("{a}({v})")),
            other => {
                return Err(format!(
                    "restriction concept `{other}` is not a conjunction of names"
                ))
            }
        }
    }
    Ok(out.join(" & "))
}

fn axiom_text(ax: &ElAxiom) -> Result<String, String> {
    let mut names = Names {
        used: ax.variables().into_iter().map(str::to_string).collect(),
        next: 0,
    };
    Ok(match ax {
        ElAxiom::Gci { subject, lhs, rhs } => {
            let s = var_name(subject)?;
            let mut body = Vec::new();
            body_atoms(lhs, s, &mut names, &mut body)?;
            if body.is_empty() {
                return Err("`⊤` on the left".into());
            }
            let head = if *rhs == ConceptExpr::Bottom {
                "false".to_string()
            } else {
                let mut items = Vec::new();
                head_items(rhs, s, &mut names, &mut items)?;
                items.join(" & ")
            };
            format!("{} -> {head}", body.join(" & "))
        }
        ElAxiom::RoleInclusion { chain, sup, terms } => {
            let v: Vec<&str> = terms.iter().map(var_name).collect::<Result<_, _>>()?;
            match chain.as_slice() {
                [r] => format!("{r}({},{}) -> {sup}({},{})", v[0], v[1], v[0], v[1]),
                [r, s] => format!(
                    "{r}({},{}) & {s}({},{}) -> {sup}({},{})",
                    v[0], v[1], v[1], v[2], v[0], v[2]
                ),
                _ => return Err("role chain longer than two".into()),
            }
        }
        ElAxiom::DomainRestriction {
            role,
            concept,
            subject,
            object,
        } => {
            let (s, o) = (var_name(subject)?, var_name(object)?);
            let head = if *concept == ConceptExpr::Bottom {
                "false".to_string()
            } else {
                atomic_conjunction(concept, s)?
            };
            format!("{role}({s},{o}) -> {head}")
        }
        ElAxiom::RangeRestriction {
            role,
            concept,
            subject,
            object,
        } => {
            let (s, o) = (var_name(subject)?, var_name(object)?);
            format!("{role}({s},{o}) -> {}", atomic_conjunction(concept, o)?)
        }
        ElAxiom::ConceptAssertion {
            concept,
            individual,
        } => match concept {
            ConceptExpr::Atomic(a) => format!("{a}({individual})"),
            other => return Err(format!("assertion of complex concept `{other}`")),
        },
        ElAxiom::RoleAssertion {
            role,
            subject,
            object,
        } => format!("{role}({subject},{object})"),
    })
}

fn annotation_text(ann: &Annotation) -> String {
    let pairs: Vec<String> = ann
        .pairs
        .iter()
        .map(|p| format!("{}={}", p.atom, u8::from(p.value)))
        .collect();
    format!("{{{}}}", pairs.join(", "))
}

fn formula_ok(f: &MlnFormula) -> bool {
    match f {
        MlnFormula::Atom(_) => true,
        MlnFormula::Not(inner) => formula_ok(inner),
        MlnFormula::And(parts) | MlnFormula::Or(parts) => {
            !parts.is_empty() && parts.iter().all(formula_ok)
        }
    }
}

/// Writes a knowledge base in the `.tcpkb` syntax accepted by [`super::parse_kb`].
pub fn serialize_kb(kb: &TcpKnowledgeBase) -> Result<String, SerializeError> {
    let mut out = String::new();
    for ax in &kb.axioms {
        let text = axiom_text(&ax.axiom).map_err(|reason| SerializeError::Inexpressible {
            axiom: ax.axiom.to_string(),
            reason,
        })?;
        out.push_str(&text);
        if !ax.annotation.is_crisp() {
            let _ = write!(out, " @ {}", annotation_text(&ax.annotation));
        }
        out.push_str(".\n");
    }
    let mln = &kb.mln;
    if mln.formulas.is_empty() && mln.constants.is_empty() && mln.scopes.is_empty() {
        return Ok(out);
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str("mln {\n");
    for (sort, constants) in &mln.constants {
        let names: Vec<&str> = constants.iter().map(String::as_str).collect();
        let list = if names.is_empty() {
            String::new()
        } else {
            format!(" {}", names.join(" "))
        };
        if sort == DEFAULT_SORT {
            let _ = writeln!(out, "  const{list}.");
        } else {
            let _ = writeln!(out, "  const {sort}:{list}.");
        }
    }
    for (p, sorts) in &mln.scopes {
        let _ = writeln!(out, "  scope {p}({}).", sorts.join(", "));
    }
    for (i, f) in mln.formulas.iter().enumerate() {
        if !f.weight.is_finite() {
            return Err(SerializeError::InexpressibleFormula {
                formula: i,
                reason: format!("weight {}", f.weight),
            });
        }
        if !formula_ok(&f.formula) {
            return Err(SerializeError::InexpressibleFormula {
                formula: i,
                reason: "empty conjunction or disjunction".into(),
            });
        }
        let _ = writeln!(out, "  {} {}.", f.weight, f.formula);
    }
    out.push_str("}\n");
    Ok(out)
}
