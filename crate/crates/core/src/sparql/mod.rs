//! Compilation of checkable axioms into SPARQL violation queries.
//!
//! A compiled query returns no solutions exactly when its axiom holds in
//! the graph it runs on. Queries expect the closed graph with every literal
//! replaced by the canonical literal of its value (see [`normalize_literals`]),
//! so that `COUNT(DISTINCT ...)` counts values.

mod algebra;
mod eval;

use std::collections::BTreeSet;

use thiserror::Error;

pub use algebra::{Expr, Pattern, Select, Slot, Var};
pub use eval::{evaluate, Solution};

use crate::constraint::{Axiom, AxiomSet, ClassExpr, PropExpr};
use crate::interpretation::{DatatypeError, DatatypeRegistry};
use crate::rdf::ns::RDF_TYPE;
use crate::rdf::{Graph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coverage {
    Full,
    Unsupported(String),
}

impl Coverage {
    pub fn is_full(&self) -> bool {
        matches!(self, Coverage::Full)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledQuery {
    pub axiom: Axiom,
    /// Empty for unsupported axioms.
    pub text: String,
    pub coverage: Coverage,
    pub query: Option<Select>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlError {
    #[error("axiom mentions the defined class <{0}>")]
    DefinedClassInAxiom(String),
}

struct Unsupported(String);

struct Compiler<'r> {
    next: usize,
    registry: &'r DatatypeRegistry,
}

fn var(v: &Var) -> Slot {
    Slot::Var(v.clone())
}

fn triple(s: &Var, p: &str, o: &Var) -> Pattern {
    Pattern::Triple(var(s), Slot::Term(Term::iri(p)), var(o))
}

fn not_exists(ps: Vec<Pattern>) -> Pattern {
    Pattern::Filter(Expr::NotExists(Box::new(Pattern::Group(ps))))
}

fn nothing(x: &Var) -> Pattern {
    Pattern::Values(vec![x.clone()], Vec::new())
}

impl Compiler<'_> {
    fn fresh(&mut self) -> Var {
        let v = Var(format!("v{}", self.next));
        self.next += 1;
        v
    }

    /// Binds `x` to every element of the domain: every non-literal term of the graph.
    fn thing(&mut self, x: &Var) -> Pattern {
        let (a, b) = (self.fresh(), self.fresh());
        Pattern::Group(vec![Pattern::Union(vec![
            Pattern::Triple(var(x), var(&a), var(&b)),
            Pattern::Triple(var(&a), var(x), var(&b)),
            Pattern::Group(vec![
                Pattern::Triple(var(&a), var(&b), var(x)),
                Pattern::Filter(Expr::Not(Box::new(Expr::IsLiteral(x.clone())))),
            ]),
        ])])
    }

    fn individual(t: &Term) -> Result<Term, Unsupported> {
        match t {
            Term::Iri(_) => Ok(t.clone()),
            _ => Err(Unsupported(format!("individual {t} cannot be named in a query"))),
        }
    }

    /// Binds `x` to the domain elements in the extension of `c`.
    fn class(&mut self, c: &ClassExpr, x: &Var) -> Result<Pattern, Unsupported> {
        Ok(match c {
            ClassExpr::Named(iri) => Pattern::Triple(var(x), Slot::Term(Term::iri(RDF_TYPE)), Slot::Term(Term::iri(iri.as_str()))),
            ClassExpr::Thing => self.thing(x),
            ClassExpr::Nominal(ts) => {
                let mut rows = Vec::new();
                for t in ts.iter().filter(|t| !t.is_literal()) {
                    rows.push(vec![Self::individual(t)?]);
                }
                Pattern::Values(vec![x.clone()], rows)
            }
            ClassExpr::Datatype(_) => nothing(x),
            ClassExpr::And(cs) if cs.is_empty() => self.thing(x),
            ClassExpr::And(cs) => Pattern::Group(cs.iter().map(|c| self.class(c, x)).collect::<Result<_, _>>()?),
            ClassExpr::Or(cs) if cs.is_empty() => nothing(x),
            ClassExpr::Or(cs) => Pattern::Group(vec![Pattern::Union(
                cs.iter().map(|c| self.class(c, x)).collect::<Result<_, _>>()?,
            )]),
            ClassExpr::Not(inner) => {
                if crate::checker::mentions_data(inner) {
                    return Err(Unsupported("complement of a data range".into()));
                }
                let all = self.thing(x);
                let inner = self.class(inner, x)?;
                Pattern::Group(vec![all, not_exists(vec![inner])])
            }
            ClassExpr::Some(p, q) => {
                let y = self.fresh();
                let path = self.path(p, x, &y)?;
                let filler = self.filler(q, &y)?;
                Pattern::Group(vec![path, filler])
            }
            ClassExpr::All(p, q) => {
                let y = self.fresh();
                let all = self.thing(x);
                let path = self.path(p, x, &y)?;
                let filler = self.filler(q, &y)?;
                Pattern::Group(vec![all, not_exists(vec![path, not_exists(vec![filler])])])
            }
            ClassExpr::Min(0, ..) => self.thing(x),
            ClassExpr::Min(k, p, q) => self.at_least(x, *k as u64, p, q.as_deref())?,
            ClassExpr::Max(k, p, q) => {
                let all = self.thing(x);
                let over = self.at_least(x, *k as u64 + 1, p, q.as_deref())?;
                Pattern::Group(vec![all, Pattern::Minus(Box::new(over))])
            }
            ClassExpr::Exact(k, p, q) => {
                let min = self.class(&ClassExpr::Min(*k, p.clone(), q.clone()), x)?;
                let max = self.class(&ClassExpr::Max(*k, p.clone(), q.clone()), x)?;
                Pattern::Group(vec![min, max])
            }
        })
    }

    /// Subjects with at least `k` distinct qualifying fillers.
    fn at_least(&mut self, x: &Var, k: u64, p: &PropExpr, q: Option<&ClassExpr>) -> Result<Pattern, Unsupported> {
        let y = self.fresh();
        let mut body = vec![self.path(p, x, &y)?];
        if let Some(q) = q {
            body.push(self.filler(q, &y)?);
        }
        Ok(Pattern::Select(Box::new(Select {
            distinct: false,
            projection: vec![x.clone()],
            pattern: body,
            group_by: vec![x.clone()],
            having: Some(Expr::CountAtLeast(y, k)),
        })))
    }

    /// Binds `y` to domain elements and graph literals whose value is in `c`.
    fn filler(&mut self, c: &ClassExpr, y: &Var) -> Result<Pattern, Unsupported> {
        let nodes = self.class(c, y)?;
        Ok(match self.data(c, y)? {
            None => nodes,
            Some(values) => Pattern::Group(vec![Pattern::Union(vec![nodes, values])]),
        })
    }

    /// The data part of `c`, or `None` when `c` contains no values.
    fn data(&mut self, c: &ClassExpr, y: &Var) -> Result<Option<Pattern>, Unsupported> {
        Ok(match c {
            ClassExpr::Datatype(d) => {
                let mut dts: Vec<String> = self
                    .registry
                    .get(d)
                    .map(|dt| dt.kinds().iter().map(|k| k.canonical_datatype().to_owned()).collect())
                    .unwrap_or_default();
                dts.sort();
                dts.dedup();
                let (s, p) = (self.fresh(), self.fresh());
                Some(Pattern::Group(vec![
                    Pattern::Triple(var(&s), var(&p), var(y)),
                    Pattern::Filter(Expr::DatatypeIn(y.clone(), dts)),
                ]))
            }
            ClassExpr::Nominal(ts) if ts.iter().any(Term::is_literal) => {
                let mut rows = Vec::new();
                for t in ts {
                    if let Term::Literal(lit) = t {
                        let value = self
                            .registry
                            .literal_value(lit)
                            .map_err(|e| Unsupported(e.to_string()))?;
                        rows.push(vec![Term::Literal(value.canonical_literal())]);
                    }
                }
                Some(Pattern::Values(vec![y.clone()], rows))
            }
            ClassExpr::And(cs) => {
                let mut parts = Vec::new();
                for c in cs {
                    match self.data(c, y)? {
                        Some(p) => parts.push(p),
                        None => return Ok(None),
                    }
                }
                (!parts.is_empty()).then_some(Pattern::Group(parts))
            }
            ClassExpr::Or(cs) => {
                let mut parts = Vec::new();
                for c in cs {
                    parts.extend(self.data(c, y)?);
                }
                (!parts.is_empty()).then(|| Pattern::Group(vec![Pattern::Union(parts)]))
            }
            _ => None,
        })
    }

    /// Binds `(s, o)` to the pairs of `p`.
    fn path(&mut self, p: &PropExpr, s: &Var, o: &Var) -> Result<Pattern, Unsupported> {
        Ok(match p {
            PropExpr::Named(iri) => triple(s, iri, o),
            PropExpr::Inv(q) => {
                let inner = self.path(q, o, s)?;
                Pattern::Group(vec![inner, Pattern::Filter(Expr::Not(Box::new(Expr::IsLiteral(s.clone()))))])
            }
            PropExpr::Chain(a, b) => {
                let m = self.fresh();
                let first = self.path(a, s, &m)?;
                let second = self.path(b, &m, o)?;
                Pattern::Group(vec![first, second])
            }
            PropExpr::Restrict(q, dom) => {
                let inner = self.path(q, s, o)?;
                let dom = self.class(dom, s)?;
                Pattern::Group(vec![inner, dom])
            }
        })
    }

    fn axiom(&mut self, a: &Axiom) -> Result<Select, Unsupported> {
        let x = Var("x".into());
        let select = |projection: Vec<Var>, pattern: Vec<Pattern>| Select {
            distinct: true,
            projection,
            pattern,
            group_by: Vec::new(),
            having: None,
        };
        Ok(match a {
            Axiom::SubClass(l, r) => {
                let l = self.class(l, &x)?;
                let r = self.class(r, &x)?;
                select(vec![x], vec![l, not_exists(vec![r])])
            }
            Axiom::EquivClass(l, r) => {
                let (l1, r1) = (self.class(l, &x)?, self.class(r, &x)?);
                let (r2, l2) = (self.class(r, &x)?, self.class(l, &x)?);
                let union = Pattern::Union(vec![
                    Pattern::Group(vec![l1, not_exists(vec![r1])]),
                    Pattern::Group(vec![r2, not_exists(vec![l2])]),
                ]);
                select(vec![x], vec![union])
            }
            Axiom::SubProp(l, r) => {
                let y = Var("y".into());
                let l = self.path(l, &x, &y)?;
                let r = self.path(r, &x, &y)?;
                select(vec![x, y], vec![l, not_exists(vec![r])])
            }
            Axiom::Member(t, c) => {
                let t = Self::individual(t)?;
                let c = self.class(c, &x)?;
                select(vec![x.clone()], vec![Pattern::Values(vec![x], vec![vec![t]]), not_exists(vec![c])])
            }
            Axiom::Different(ts) => {
                let (a, b) = (Var("x".into()), Var("y".into()));
                let mut rows = Vec::new();
                for (k, s) in ts.iter().enumerate() {
                    for t in &ts[k + 1..] {
                        rows.push(vec![Self::individual(s)?, Self::individual(t)?]);
                    }
                }
                select(
                    vec![a.clone(), b.clone()],
                    vec![Pattern::Values(vec![a.clone(), b.clone()], rows), Pattern::Filter(Expr::SameTerm(a, b))],
                )
            }
        })
    }
}

/// Compiles one axiom. Axioms naming a class in `defined` are rejected,
/// since their meaning depends on recognition.
pub fn compile_axiom(a: &Axiom, defined: &BTreeSet<String>, registry: &DatatypeRegistry) -> Result<CompiledQuery, SparqlError> {
    if let Some(c) = a.classes().into_iter().find(|c| defined.contains(*c)) {
        return Err(SparqlError::DefinedClassInAxiom(c.to_owned()));
    }
    let mut compiler = Compiler { next: 0, registry };
    Ok(match compiler.axiom(a) {
        Ok(q) => CompiledQuery {
            axiom: a.clone(),
            text: q.to_sparql(),
            coverage: Coverage::Full,
            query: Some(q),
        },
        Err(Unsupported(reason)) => CompiledQuery {
            axiom: a.clone(),
            text: String::new(),
            coverage: Coverage::Unsupported(reason),
            query: None,
        },
    })
}

/// Compiles every axiom, one query each. Axioms mentioning a class in
/// `defined` come back unsupported.
pub fn compile_set(axioms: &AxiomSet, defined: &BTreeSet<String>, registry: &DatatypeRegistry) -> Vec<CompiledQuery> {
    axioms
        .iter()
        .map(|a| {
            compile_axiom(a, defined, registry).unwrap_or_else(|_| CompiledQuery {
                axiom: a.clone(),
                text: String::new(),
                coverage: Coverage::Unsupported("defined class".into()),
                query: None,
            })
        })
        .collect()
}

/// Replaces every literal by the canonical literal of its value.
pub fn normalize_literals(g: &Graph, registry: &DatatypeRegistry) -> Result<Graph, DatatypeError> {
    let mut out = Graph::new();
    for t in g.iter() {
        let object = match t.object() {
            Term::Literal(lit) => Term::Literal(registry.literal_value(lit)?.canonical_literal()),
            other => other.clone(),
        };
        out.insert(Triple::new(t.subject().clone(), t.predicate().clone(), object).expect("subject and predicate unchanged"));
    }
    Ok(out)
}
