use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, KbDocument, Location};
use crate::kb::{
    is_variable_name, AnnotatedAxiom, Annotation, Atom, ConceptExpr, ElAxiom, MlnFormula,
    MlnProgram, TcpKnowledgeBase, Term, WeightedFormula, DEFAULT_SORT,
};

const SHAPE_CONJ: &str = "A1(X) & ... & An(X) -> B(X)";
const SHAPE_EXISTS_RHS: &str = "A(X) -> exists Y.(r(X,Y) & B(Y))";
const SHAPE_EXISTS_LHS: &str = "r(X,Y) & B(Y) -> A(X)";
const SHAPE_RI: &str = "r(X,Y) -> s(X,Y)";
const SHAPE_CHAIN: &str = "r(X,Y) & s(Y,Z) -> t(X,Z)";
const SHAPE_DOMAIN: &str = "r(X,Y) -> C(X)";
const SHAPE_RANGE: &str = "r(X,Y) -> C(Y)";
const SHAPE_FACT: &str = "A(a). or r(a,b).";

#[derive(Debug, Clone)]
struct RawAtom {
    predicate: String,
    args: Vec<String>,
    at: Location,
}

impl RawAtom {
    fn to_atom(&self) -> Atom {
        Atom::new(
            self.predicate.clone(),
            self.args.iter().map(|a| Term::parse(a)).collect(),
        )
    }
}

/// Formula syntax shared by rule bodies, heads and MLN formulas.
#[derive(Debug, Clone)]
enum Expr {
    Atom(RawAtom),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Exists(String, Vec<Expr>, Location),
    False(Location),
}

fn shape_error(at: Location, reason: impl std::fmt::Display, nearest: &str) -> Diagnostic {
    Diagnostic::new(
        at,
        format!("unsupported axiom shape: {reason}; nearest supported shape: `{nearest}`"),
    )
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn at(&self) -> Location {
        self.toks[self.pos].at
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::new(
            self.at(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Token, Diagnostic> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, Location), Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let at = self.bump().at;
                Ok((s, at))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn atom(&mut self) -> Result<RawAtom, Diagnostic> {
        let (predicate, at) = self.ident("a predicate")?;
        self.expect(Tok::LParen, "`(` after predicate name")?;
        let mut args = vec![self.ident("an argument")?.0];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.ident("an argument")?.0);
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        Ok(RawAtom {
            predicate,
            args,
            at,
        })
    }

    // formula := conj ('|' conj)* ; conj := unary ('&' unary)*
    fn formula(&mut self) -> Result<Expr, Diagnostic> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Expr, Diagnostic> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "false" && *self.peek_at(1) != Tok::LParen => {
                Ok(Expr::False(self.bump().at))
            }
            Tok::Ident(s) if s == "exists" && *self.peek_at(1) != Tok::LParen => {
                let at = self.bump().at;
                let (var, _) = self.ident("a variable after `exists`")?;
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                self.expect(Tok::LParen, "`(` opening the quantified body")?;
                let body = self.formula()?;
                self.expect(Tok::RParen, "`)` closing the quantified body")?;
                Ok(Expr::Exists(var, flatten_and(body), at))
            }
            _ => Ok(Expr::Atom(self.atom()?)),
        }
    }

    fn annotation(&mut self) -> Result<Annotation, Diagnostic> {
        self.expect(Tok::LBrace, "`{` opening the annotation")?;
        let mut pairs = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let atom = self.atom()?;
                self.expect(Tok::Eq, "`=` after annotation atom")?;
                let value = match self.peek() {
                    Tok::Number(n) if n == "0" => false,
                    Tok::Number(n) if n == "1" => true,
                    _ => return Err(self.unexpected("`0` or `1`")),
                };
                self.bump();
                pairs.push((atom.to_atom(), value));
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RBrace, "`,` or `}` in annotation")?;
        Ok(Annotation::new(pairs))
    }

    fn mln_block(&mut self, doc: &mut KbDocument) -> Result<(), Diagnostic> {
        self.bump();
        self.expect(Tok::LBrace, "`{` after `mln`")?;
        loop {
            let at = self.at();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(());
                }
                Tok::Ident(kw) if kw == "const" => {
                    self.bump();
                    let mut sort = DEFAULT_SORT.to_string();
                    if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon {
                        sort = self.ident("a sort name")?.0;
                        self.bump();
                    }
                    let mut names = Vec::new();
                    while let Tok::Ident(name) = self.peek().clone() {
                        if is_variable_name(&name) {
                            return Err(Diagnostic::new(
                                self.at(),
                                format!("constant `{name}` must not start with an uppercase letter or `_`"),
                            ));
                        }
                        self.bump();
                        names.push(name);
                    }
                    self.expect(Tok::Dot, "a constant name or `.`")?;
                    doc.kb.mln.constants.entry(sort).or_default().extend(names);
                }
                Tok::Ident(kw) if kw == "scope" => {
                    self.bump();
                    let atom = self.atom()?;
                    self.expect(Tok::Dot, "`.` after scope")?;
                    doc.kb.mln.scopes.insert(atom.predicate, atom.args);
                }
                Tok::Number(w) => {
                    self.bump();
                    let weight: f64 = w
                        .parse()
                        .map_err(|_| Diagnostic::new(at, format!("invalid weight `{w}`")))?;
                    let body = self.formula()?;
                    self.expect(Tok::Dot, "`.` ending the formula")?;
                    let formula = mln_formula(&body)?;
                    doc.kb
                        .mln
                        .formulas
                        .push(WeightedFormula { formula, weight });
                    doc.formula_locations.push(at);
                }
                _ => return Err(self.unexpected("a weighted formula, `const`, `scope` or `}`")),
            }
        }
    }

    fn statement(&mut self, doc: &mut KbDocument) -> Result<(), Diagnostic> {
        let at = self.at();
        let body = self.formula()?;
        let head = if *self.peek() == Tok::Arrow {
            self.bump();
            Some(self.formula()?)
        } else {
            None
        };
        let annotation = if *self.peek() == Tok::At {
            self.bump();
            self.annotation()?
        } else {
            Annotation::crisp()
        };
        self.expect(Tok::Dot, "`.` ending the statement")?;
        let axiom = match head {
            None => fact(&body, at)?,
            Some(head) => rule(&body, &head, at)?,
        };
        doc.kb.axioms.push(AnnotatedAxiom::new(axiom, annotation));
        doc.axiom_locations.push(at);
        Ok(())
    }
}

fn flatten_and(e: Expr) -> Vec<Expr> {
    match e {
        Expr::And(parts) => parts.into_iter().flat_map(flatten_and).collect(),
        other => vec![other],
    }
}

fn mln_formula(e: &Expr) -> Result<MlnFormula, Diagnostic> {
    fn convert(e: &Expr) -> Result<MlnFormula, Diagnostic> {
        Ok(match e {
            Expr::Atom(a) => MlnFormula::Atom(a.to_atom()),
            Expr::Not(inner) => MlnFormula::Not(Box::new(convert(inner)?)),
            Expr::And(parts) => {
                MlnFormula::And(parts.iter().map(convert).collect::<Result<_, _>>()?)
            }
            Expr::Or(parts) => MlnFormula::Or(parts.iter().map(convert).collect::<Result<_, _>>()?),
            Expr::Exists(_, _, at) => {
                return Err(Diagnostic::new(
                    *at,
                    "quantifiers are not allowed in MLN formulas",
                ))
            }
            Expr::False(at) => {
                return Err(Diagnostic::new(
                    *at,
                    "`false` is not allowed in MLN formulas",
                ))
            }
        })
    }
    let f = convert(e)?;
    // conjunctions of atoms are stored flat, as the builder API does
    Ok(match f.conjuncts() {
        Some(atoms) => MlnFormula::conjunction(atoms.into_iter().cloned().collect()),
        None => f,
    })
}

/// Atoms of a pure conjunction, or a shape error naming what was found.
fn body_atoms(e: &Expr, at: Location, nearest: &str) -> Result<Vec<RawAtom>, Diagnostic> {
    let mut out = Vec::new();
    for part in flatten_and(e.clone()) {
        match part {
            Expr::Atom(a) => out.push(a),
            Expr::Or(_) => {
                return Err(shape_error(
                    at,
                    "disjunction is not supported in axioms",
                    nearest,
                ))
            }
            Expr::Not(_) => {
                return Err(shape_error(
                    at,
                    "negation is not supported in axioms",
                    nearest,
                ))
            }
            Expr::Exists(..) => {
                return Err(shape_error(
                    at,
                    "`exists` may only appear on the right of `->`",
                    SHAPE_EXISTS_LHS,
                ))
            }
            Expr::False(_) => {
                return Err(shape_error(
                    at,
                    "`false` may only appear on the right of `->`",
                    SHAPE_CONJ,
                ))
            }
            Expr::And(_) => unreachable!("flattened"),
        }
    }
    Ok(out)
}

fn fact(body: &Expr, at: Location) -> Result<ElAxiom, Diagnostic> {
    let atoms = body_atoms(body, at, SHAPE_FACT)?;
    let [a] = atoms.as_slice() else {
        return Err(shape_error(
            at,
            "a statement without `->` must be a single fact",
            SHAPE_FACT,
        ));
    };
    if let Some(v) = a.args.iter().find(|x| is_variable_name(x)) {
        return Err(shape_error(
            at,
            format!("fact uses variable `{v}`; facts must be ground"),
            SHAPE_FACT,
        ));
    }
    match a.args.as_slice() {
        [c] => Ok(ElAxiom::concept_assertion(&a.predicate, c)),
        [s, o] => Ok(ElAxiom::role_assertion(&a.predicate, s, o)),
        _ => Err(shape_error(
            at,
            format!(
                "`{}` has {} arguments; facts are unary or binary",
                a.predicate,
                a.args.len()
            ),
            SHAPE_FACT,
        )),
    }
}

fn check_rule_terms(atoms: &[&RawAtom], at: Location) -> Result<(), Diagnostic> {
    for a in atoms {
        if a.args.len() > 2 {
            return Err(shape_error(
                a.at,
                format!(
                    "`{}` has {} arguments; concepts are unary and roles binary",
                    a.predicate,
                    a.args.len()
                ),
                SHAPE_CONJ,
            ));
        }
        if let Some(c) = a.args.iter().find(|x| !is_variable_name(x)) {
            return Err(shape_error(
                at,
                format!("rule mentions constant `{c}`; rules use variables only (bind them with an annotation)"),
                SHAPE_CONJ,
            ));
        }
    }
    Ok(())
}

fn head_atoms(head: &Expr) -> Vec<&RawAtom> {
    fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a RawAtom>) {
        match e {
            Expr::Atom(a) => out.push(a),
            Expr::Not(i) => walk(i, out),
            Expr::And(p) | Expr::Or(p) | Expr::Exists(_, p, _) => {
                p.iter().for_each(|x| walk(x, out))
            }
            Expr::False(_) => {}
        }
    }
    let mut out = Vec::new();
    walk(head, &mut out);
    out
}

fn rule(body: &Expr, head: &Expr, at: Location) -> Result<ElAxiom, Diagnostic> {
    let body = body_atoms(body, at, SHAPE_CONJ)?;
    let mut all: Vec<&RawAtom> = body.iter().collect();
    all.extend(head_atoms(head));
    check_rule_terms(&all, at)?;
    let head_items = flatten_and(head.clone());
    for item in &head_items {
        match item {
            Expr::Or(_) => {
                return Err(shape_error(
                    at,
                    "disjunction is not supported in axioms",
                    SHAPE_CONJ,
                ))
            }
            Expr::Not(_) => {
                return Err(shape_error(
                    at,
                    "negation is not supported in axioms",
                    SHAPE_CONJ,
                ))
            }
            _ => {}
        }
    }
    let head_binary: Vec<&RawAtom> = head_items
        .iter()
        .filter_map(|e| match e {
            Expr::Atom(a) if a.args.len() == 2 => Some(a),
            _ => None,
        })
        .collect();
    let all_binary_body = body.iter().all(|a| a.args.len() == 2);

    // role inclusions
    if !head_binary.is_empty() {
        let [h] = head_binary.as_slice() else {
            return Err(shape_error(
                at,
                "a role inclusion has a single role atom on the right",
                SHAPE_RI,
            ));
        };
        if head_items.len() != 1 || !all_binary_body {
            return Err(shape_error(
                at,
                "role atoms on the right of `->` need `exists` unless the rule is a role inclusion",
                SHAPE_EXISTS_RHS,
            ));
        }
        return match body.as_slice() {
            [r] => {
                if r.args[0] == r.args[1] || h.args != r.args {
                    return Err(shape_error(
                        at,
                        "role inclusion must keep its two distinct variables in order",
                        SHAPE_RI,
                    ));
                }
                Ok(ElAxiom::RoleInclusion {
                    chain: vec![r.predicate.clone()],
                    sup: h.predicate.clone(),
                    terms: r.args.iter().map(|v| Term::Var(v.clone())).collect(),
                })
            }
            [r, s] => {
                let vars = [&r.args[0], &r.args[1], &s.args[1]];
                let distinct: BTreeSet<&&String> = vars.iter().collect();
                if r.args[1] != s.args[0]
                    || distinct.len() != 3
                    || h.args[0] != *vars[0]
                    || h.args[1] != *vars[2]
                {
                    return Err(shape_error(
                        at,
                        "composition must chain three distinct variables",
                        SHAPE_CHAIN,
                    ));
                }
                Ok(ElAxiom::RoleInclusion {
                    chain: vec![r.predicate.clone(), s.predicate.clone()],
                    sup: h.predicate.clone(),
                    terms: vars.iter().map(|v| Term::Var((*v).clone())).collect(),
                })
            }
            _ => Err(shape_error(
                at,
                "role chains longer than two are not supported; split them",
                SHAPE_CHAIN,
            )),
        };
    }

    // domain and range restrictions
    if let [r] = body.as_slice() {
        if r.args.len() == 2 && r.args[0] != r.args[1] {
            let (x, y) = (&r.args[0], &r.args[1]);
            let on = |v: &String| {
                head_items
                    .iter()
                    .all(|e| matches!(e, Expr::Atom(a) if a.args.len() == 1 && &a.args[0] == v))
            };
            let is_false = matches!(head_items.as_slice(), [Expr::False(_)]);
            if is_false || on(x) {
                return Ok(ElAxiom::DomainRestriction {
                    role: r.predicate.clone(),
                    concept: head_concept(&head_items, x, &BTreeSet::new(), at)?,
                    subject: Term::Var(x.clone()),
                    object: Term::Var(y.clone()),
                });
            }
            if on(y) {
                return Ok(ElAxiom::RangeRestriction {
                    role: r.predicate.clone(),
                    concept: head_concept(&head_items, y, &BTreeSet::new(), at)?,
                    subject: Term::Var(x.clone()),
                    object: Term::Var(y.clone()),
                });
            }
            let unary = head_items
                .iter()
                .all(|e| matches!(e, Expr::Atom(a) if a.args.len() == 1));
            if unary {
                return Err(shape_error(
                    at,
                    format!("right-hand atoms must all be about `{x}` (domain) or all about `{y}` (range, as in `{SHAPE_RANGE}`)"),
                    SHAPE_DOMAIN,
                ));
            }
        }
    }

    // general concept inclusions with a tree-shaped body
    let (root, lhs) = body_concept(&body, at)?;
    let used: BTreeSet<String> = body.iter().flat_map(|a| a.args.iter().cloned()).collect();
    let rhs = head_concept(&head_items, &root, &used, at)?;
    Ok(ElAxiom::Gci {
        subject: Term::Var(root),
        lhs,
        rhs,
    })
}

/// Reads a conjunction of atoms as a concept about its root variable: the
/// variable that never occurs as the second argument of a role atom.
fn body_concept(body: &[RawAtom], at: Location) -> Result<(String, ConceptExpr), Diagnostic> {
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    let mut vars: Vec<&str> = Vec::new();
    for a in body {
        for v in &a.args {
            if !vars.contains(&v.as_str()) {
                vars.push(v);
            }
        }
        if a.args.len() == 2 {
            let (p, c) = (a.args[0].as_str(), a.args[1].as_str());
            if p == c || parent.insert(c, p).is_some() {
                return Err(shape_error(
                    at,
                    format!("variable `{c}` is reached by more than one role atom; the body must be tree-shaped"),
                    SHAPE_EXISTS_LHS,
                ));
            }
        }
    }
    let roots: Vec<&str> = vars
        .iter()
        .copied()
        .filter(|v| !parent.contains_key(v))
        .collect();
    let [root] = roots.as_slice() else {
        return Err(shape_error(
            at,
            "the body must be connected through role atoms from a single subject variable",
            SHAPE_EXISTS_LHS,
        ));
    };
    // every variable must lead back to the root without cycles
    for v in &vars {
        let mut cur = *v;
        let mut steps = 0;
        while let Some(p) = parent.get(cur) {
            cur = p;
            steps += 1;
            if steps > vars.len() {
                return Err(shape_error(
                    at,
                    "role atoms in the body form a cycle",
                    SHAPE_EXISTS_LHS,
                ));
            }
        }
        if cur != *root {
            return Err(shape_error(
                at,
                "the body must be tree-shaped",
                SHAPE_EXISTS_LHS,
            ));
        }
    }
    fn concept(v: &str, body: &[RawAtom]) -> ConceptExpr {
        let parts = body.iter().filter(|a| a.args[0] == v).map(|a| {
            if a.args.len() == 1 {
                ConceptExpr::atomic(&a.predicate)
            } else {
                ConceptExpr::Exists {
                    role: a.predicate.clone(),
                    var: Some(Term::Var(a.args[1].clone())),
                    filler: Box::new(concept(&a.args[1], body)),
                }
            }
        });
        ConceptExpr::conjunction(parts)
    }
    Ok((root.to_string(), concept(root, body)))
}

fn head_concept(
    items: &[Expr],
    subject: &str,
    used: &BTreeSet<String>,
    at: Location,
) -> Result<ConceptExpr, Diagnostic> {
    if let [Expr::False(_)] = items {
        return Ok(ConceptExpr::Bottom);
    }
    let mut parts = Vec::new();
    for item in items {
        match item {
            Expr::Atom(a) if a.args.len() == 1 && a.args[0] == subject => {
                parts.push(ConceptExpr::atomic(&a.predicate))
            }
            Expr::Atom(a) if a.args.len() == 1 => {
                return Err(shape_error(
                    at,
                    format!(
                        "`{}({})` on the right is not about the subject `{subject}`",
                        a.predicate, a.args[0]
                    ),
                    SHAPE_CONJ,
                ))
            }
            Expr::Atom(a) => {
                return Err(shape_error(
                    at,
                    format!("role atom `{}` on the right needs `exists`", a.predicate),
                    SHAPE_EXISTS_RHS,
                ))
            }
            Expr::Exists(var, inner, _) => {
                if used.contains(var) || var == subject || !is_variable_name(var) {
                    return Err(shape_error(
                        at,
                        format!("`exists {var}` must introduce a fresh variable"),
                        SHAPE_EXISTS_RHS,
                    ));
                }
                let links: Vec<&RawAtom> = inner
                    .iter()
                    .filter_map(|e| match e {
                        Expr::Atom(a) if a.args.len() == 2 => Some(a),
                        _ => None,
                    })
                    .collect();
                let [link] = links.as_slice() else {
                    return Err(shape_error(
                        at,
                        format!("`exists {var}` needs exactly one role atom"),
                        SHAPE_EXISTS_RHS,
                    ));
                };
                if link.args[0] != subject || link.args[1] != *var {
                    return Err(shape_error(
                        at,
                        format!(
                            "the role atom under `exists {var}` must be `{}({subject},{var})`",
                            link.predicate
                        ),
                        SHAPE_EXISTS_RHS,
                    ));
                }
                let rest: Vec<Expr> = inner
                    .iter()
                    .filter(|e| !matches!(e, Expr::Atom(a) if a.args.len() == 2))
                    .cloned()
                    .collect();
                let mut used = used.clone();
                used.insert(var.clone());
                used.insert(subject.to_string());
                let filler = if rest.is_empty() {
                    ConceptExpr::Top
                } else {
                    head_concept(&rest, var, &used, at)?
                };
                parts.push(ConceptExpr::Exists {
                    role: link.predicate.clone(),
                    var: Some(Term::Var(var.clone())),
                    filler: Box::new(filler),
                });
            }
            Expr::False(_) => {
                return Err(shape_error(
                    at,
                    "`false` must be the whole right-hand side",
                    SHAPE_CONJ,
                ))
            }
            Expr::And(_) | Expr::Or(_) | Expr::Not(_) => {
                return Err(shape_error(
                    at,
                    "only conjunctions are supported on the right",
                    SHAPE_CONJ,
                ))
            }
        }
    }
    if parts.is_empty() {
        return Err(shape_error(at, "empty right-hand side", SHAPE_CONJ));
    }
    Ok(ConceptExpr::conjunction(parts))
}

/// Parses a `.tcpkb` document. Only syntax and axiom shapes are checked;
/// see [`KbDocument::validate`] for the structural checks.
pub fn parse_kb(text: &str) -> Result<KbDocument, Diagnostic> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut doc = KbDocument {
        kb: TcpKnowledgeBase::new(Vec::new(), MlnProgram::new()),
        axiom_locations: Vec::new(),
        formula_locations: Vec::new(),
    };
    while *p.peek() != Tok::Eof {
        if p.is_keyword("mln") && *p.peek_at(1) == Tok::LBrace {
            p.mln_block(&mut doc)?;
        } else {
            p.statement(&mut doc)?;
        }
    }
    doc.kb = TcpKnowledgeBase::new(
        std::mem::take(&mut doc.kb.axioms),
        std::mem::take(&mut doc.kb.mln),
    );
    Ok(doc)
}
