use std::collections::{BTreeMap, HashMap};
use std::ops::Deref;
use std::rc::Rc;

use thiserror::Error;

use crate::constraint::{Axiom, ClassExpr, PropExpr};
use crate::interpretation::{DatatypeError, Filler, Interpretation, NodeId, NodeSet, Relation, ValueId};
use crate::rdf::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("class <{0}> has no extension in the interpretation")]
    UnboundClassName(String),
    #[error("property <{0}> is not a property of the graph")]
    UnboundPropertyName(String),
    #[error("individual {0} is not in the domain of the interpretation")]
    UnboundIndividual(Term),
    #[error("Not({0}) would need a complement inside the data domain, which is infinite")]
    UnsupportedDataComplement(String),
    #[error(transparent)]
    Datatype(#[from] DatatypeError),
}

/// Whether the expression can contain data values, so complementing it
/// would reach into the data domain.
pub fn mentions_data(c: &ClassExpr) -> bool {
    match c {
        ClassExpr::Datatype(_) => true,
        ClassExpr::Nominal(ts) => ts.iter().any(Term::is_literal),
        ClassExpr::And(cs) | ClassExpr::Or(cs) => cs.iter().any(mentions_data),
        _ => false,
    }
}

/// Rejects a complement over data anywhere in the axiom, whether or not
/// evaluation would reach it.
pub fn check_complements(a: &Axiom) -> Result<(), EvalError> {
    let mut bad = None;
    a.walk_classes(&mut |c| {
        if let ClassExpr::Not(inner) = c {
            if bad.is_none() && mentions_data(inner) {
                bad = Some(inner.to_string());
            }
        }
    });
    bad.map_or(Ok(()), |e| Err(EvalError::UnsupportedDataComplement(e)))
}

/// A property extension, borrowed from the graph or computed.
#[derive(Debug, Clone)]
pub enum Rel<'i> {
    Graph(&'i Relation),
    Derived(Rc<Relation>),
}

impl Deref for Rel<'_> {
    type Target = Relation;

    fn deref(&self) -> &Relation {
        match self {
            Rel::Graph(r) => r,
            Rel::Derived(r) => r,
        }
    }
}

/// Decides membership of values in a class expression.
#[derive(Debug, Clone)]
enum ValueTest {
    Never,
    Datatype(String),
    OneOf(Vec<ValueId>),
    All(Vec<ValueTest>),
    Any(Vec<ValueTest>),
}

/// Evaluates expressions over one interpretation, with `overlay` giving
/// extensions of new classes that take precedence over the interpretation's.
pub struct Evaluator<'i> {
    interp: &'i Interpretation,
    overlay: Option<&'i BTreeMap<String, NodeSet>>,
    classes: HashMap<ClassExpr, Rc<NodeSet>>,
    props: HashMap<PropExpr, Rel<'i>>,
}

impl<'i> Evaluator<'i> {
    pub fn new(interp: &'i Interpretation) -> Self {
        Evaluator {
            interp,
            overlay: None,
            classes: HashMap::new(),
            props: HashMap::new(),
        }
    }

    pub fn with_overlay(interp: &'i Interpretation, overlay: &'i BTreeMap<String, NodeSet>) -> Self {
        Evaluator {
            overlay: Some(overlay),
            ..Self::new(interp)
        }
    }

    pub fn interpretation(&self) -> &'i Interpretation {
        self.interp
    }

    fn n(&self) -> usize {
        self.interp.domain_size()
    }

    fn named_class(&self, iri: &str) -> Result<Option<&NodeSet>, EvalError> {
        if let Some(set) = self.overlay.and_then(|o| o.get(iri)) {
            return Ok(Some(set));
        }
        if let Some(set) = self.interp.defined(iri) {
            return Ok(Some(set));
        }
        if self.interp.class_extension(&Term::iri(iri)).is_some() {
            return Ok(None);
        }
        Err(EvalError::UnboundClassName(iri.to_owned()))
    }

    fn named_property(&self, iri: &str) -> Result<&'i Relation, EvalError> {
        self.interp
            .property(&Term::iri(iri))
            .ok_or_else(|| EvalError::UnboundPropertyName(iri.to_owned()))
    }

    fn individual(&self, t: &Term) -> Result<NodeId, EvalError> {
        self.interp
            .node_id(t)
            .ok_or_else(|| EvalError::UnboundIndividual(t.clone()))
    }

    /// The extension of a class expression.
    pub fn eval_class(&mut self, c: &ClassExpr) -> Result<Rc<NodeSet>, EvalError> {
        if let Some(hit) = self.classes.get(c) {
            return Ok(hit.clone());
        }
        let n = self.n();
        let set = match c {
            ClassExpr::Named(iri) => match self.named_class(iri)? {
                Some(set) => set.clone(),
                None => NodeSet::from_nodes(
                    n,
                    self.interp
                        .class_extension(&Term::iri(iri.as_str()))
                        .expect("checked by named_class")
                        .iter()
                        .copied(),
                ),
            },
            ClassExpr::Thing => NodeSet::full(n),
            ClassExpr::Nominal(ts) => {
                let mut set = NodeSet::empty(n);
                for t in ts.iter().filter(|t| !t.is_literal()) {
                    set.insert(self.individual(t)?);
                }
                set
            }
            ClassExpr::Datatype(_) => NodeSet::empty(n),
            ClassExpr::And(cs) => {
                let mut set = NodeSet::full(n);
                for c in cs {
                    set.intersect_with(&*self.eval_class(c)?);
                }
                set
            }
            ClassExpr::Or(cs) => {
                let mut set = NodeSet::empty(n);
                for c in cs {
                    set.union_with(&*self.eval_class(c)?);
                }
                set
            }
            ClassExpr::Not(inner) => {
                if mentions_data(inner) {
                    return Err(EvalError::UnsupportedDataComplement(inner.to_string()));
                }
                self.eval_class(inner)?.complement()
            }
            ClassExpr::All(p, q) => {
                let rel = self.eval_prop(p)?;
                let (nodes, values) = self.qualifier(q)?;
                let mut set = NodeSet::full(n);
                for (x, f) in rel.pairs() {
                    if !self.qualifies(f, &nodes, &values) {
                        set.remove(x);
                    }
                }
                set
            }
            ClassExpr::Some(p, q) => {
                let rel = self.eval_prop(p)?;
                let (nodes, values) = self.qualifier(q)?;
                let mut set = NodeSet::empty(n);
                for (x, f) in rel.pairs() {
                    if self.qualifies(f, &nodes, &values) {
                        set.insert(x);
                    }
                }
                set
            }
            ClassExpr::Min(k, p, q) | ClassExpr::Max(k, p, q) | ClassExpr::Exact(k, p, q) => {
                let k = *k as usize;
                let rel = self.eval_prop(p)?;
                let counts = self.counts(&rel, q.as_deref())?;
                let keep = |count: usize| match c {
                    ClassExpr::Min(..) => count >= k,
                    ClassExpr::Max(..) => count <= k,
                    _ => count == k,
                };
                let mut set = if keep(0) { NodeSet::full(n) } else { NodeSet::empty(n) };
                for (x, count) in counts {
                    if keep(count) {
                        set.insert(x);
                    } else {
                        set.remove(x);
                    }
                }
                set
            }
        };
        let set = Rc::new(set);
        self.classes.insert(c.clone(), set.clone());
        Ok(set)
    }

    /// Qualifying filler counts for every subject with at least one filler.
    fn counts(&mut self, rel: &Relation, q: Option<&ClassExpr>) -> Result<Vec<(NodeId, usize)>, EvalError> {
        let qual = q.map(|q| self.qualifier(q)).transpose()?;
        let mut out = Vec::new();
        for x in rel.subjects() {
            let fillers = rel.fillers(x);
            let count = match &qual {
                None => fillers.len(),
                Some((nodes, values)) => fillers.iter().filter(|&&f| self.qualifies(f, nodes, values)).count(),
            };
            out.push((x, count));
        }
        Ok(out)
    }

    fn qualifier(&mut self, q: &ClassExpr) -> Result<(Rc<NodeSet>, ValueTest), EvalError> {
        Ok((self.eval_class(q)?, self.value_test(q)?))
    }

    fn qualifies(&self, f: Filler, nodes: &NodeSet, values: &ValueTest) -> bool {
        match f {
            Filler::Node(y) => nodes.contains(y),
            Filler::Value(v) => self.value_passes(v, values),
        }
    }

    fn value_test(&self, c: &ClassExpr) -> Result<ValueTest, EvalError> {
        Ok(match c {
            ClassExpr::Datatype(d) => ValueTest::Datatype(d.clone()),
            ClassExpr::Nominal(ts) => {
                let mut ids = Vec::new();
                for t in ts {
                    if let Term::Literal(lit) = t {
                        ids.extend(self.interp.literal_value_id(lit)?);
                    }
                }
                ValueTest::OneOf(ids)
            }
            ClassExpr::And(cs) => ValueTest::All(cs.iter().map(|c| self.value_test(c)).collect::<Result<_, _>>()?),
            ClassExpr::Or(cs) => ValueTest::Any(cs.iter().map(|c| self.value_test(c)).collect::<Result<_, _>>()?),
            _ => ValueTest::Never,
        })
    }

    fn value_passes(&self, v: ValueId, t: &ValueTest) -> bool {
        match t {
            ValueTest::Never => false,
            ValueTest::Datatype(d) => self.interp.registry().value_space_contains(d, self.interp.value(v)),
            ValueTest::OneOf(ids) => ids.contains(&v),
            ValueTest::All(ts) => ts.iter().all(|t| self.value_passes(v, t)),
            ValueTest::Any(ts) => ts.iter().any(|t| self.value_passes(v, t)),
        }
    }

    /// Whether a value belongs to a class expression.
    pub fn value_in(&self, v: ValueId, c: &ClassExpr) -> Result<bool, EvalError> {
        Ok(self.value_passes(v, &self.value_test(c)?))
    }

    /// The extension of a property expression.
    pub fn eval_prop(&mut self, p: &PropExpr) -> Result<Rel<'i>, EvalError> {
        if let Some(hit) = self.props.get(p) {
            return Ok(hit.clone());
        }
        let rel = match p {
            PropExpr::Named(iri) => Rel::Graph(self.named_property(iri)?),
            PropExpr::Inv(q) => {
                let inner = self.eval_prop(q)?;
                Rel::Derived(Rc::new(Relation::from_pairs(
                    inner.pairs().filter_map(|(x, f)| f.as_node().map(|y| (y, Filler::Node(x)))),
                )))
            }
            PropExpr::Chain(a, b) => {
                let first = self.eval_prop(a)?;
                let second = self.eval_prop(b)?;
                let pairs = first.pairs().flat_map(|(x, f)| {
                    let next: &[Filler] = match f.as_node() {
                        Some(y) => second.fillers(y),
                        None => &[],
                    };
                    next.iter().map(move |&g| (x, g))
                });
                Rel::Derived(Rc::new(Relation::from_pairs(pairs.collect::<Vec<_>>())))
            }
            PropExpr::Restrict(q, dom) => {
                let inner = self.eval_prop(q)?;
                let dom = self.eval_class(dom)?;
                Rel::Derived(Rc::new(Relation::from_pairs(inner.pairs().filter(|(x, _)| dom.contains(*x)))))
            }
        };
        self.props.insert(p.clone(), rel.clone());
        Ok(rel)
    }

    /// Whether node `x` belongs to `c`, evaluated without building whole
    /// extensions.
    pub fn member(&self, x: NodeId, c: &ClassExpr) -> Result<bool, EvalError> {
        Ok(match c {
            ClassExpr::Named(iri) => match self.named_class(iri)? {
                Some(set) => set.contains(x),
                None => self
                    .interp
                    .class_extension(&Term::iri(iri.as_str()))
                    .is_some_and(|m| m.binary_search(&x).is_ok()),
            },
            ClassExpr::Thing => true,
            ClassExpr::Nominal(ts) => {
                let mut found = false;
                for t in ts.iter().filter(|t| !t.is_literal()) {
                    found |= self.individual(t)? == x;
                }
                found
            }
            ClassExpr::Datatype(_) => false,
            ClassExpr::And(cs) => {
                for c in cs {
                    if !self.member(x, c)? {
                        return Ok(false);
                    }
                }
                true
            }
            ClassExpr::Or(cs) => {
                for c in cs {
                    if self.member(x, c)? {
                        return Ok(true);
                    }
                }
                false
            }
            ClassExpr::Not(inner) => {
                if mentions_data(inner) {
                    return Err(EvalError::UnsupportedDataComplement(inner.to_string()));
                }
                !self.member(x, inner)?
            }
            ClassExpr::All(p, q) => {
                for f in self.fillers(x, p)? {
                    if !self.filler_in(f, q)? {
                        return Ok(false);
                    }
                }
                true
            }
            ClassExpr::Some(p, q) => {
                for f in self.fillers(x, p)? {
                    if self.filler_in(f, q)? {
                        return Ok(true);
                    }
                }
                false
            }
            ClassExpr::Min(k, p, q) | ClassExpr::Max(k, p, q) | ClassExpr::Exact(k, p, q) => {
                let count = self.qualified_fillers(x, p, q.as_deref())?.len();
                let k = *k as usize;
                match c {
                    ClassExpr::Min(..) => count >= k,
                    ClassExpr::Max(..) => count <= k,
                    _ => count == k,
                }
            }
        })
    }

    /// Fillers of `x` under `p` that belong to `q` (all fillers if `q` is absent).
    pub fn qualified_fillers(&self, x: NodeId, p: &PropExpr, q: Option<&ClassExpr>) -> Result<Vec<Filler>, EvalError> {
        let mut out = Vec::new();
        for f in self.fillers(x, p)? {
            if q.map_or(Ok(true), |q| self.filler_in(f, q))? {
                out.push(f);
            }
        }
        Ok(out)
    }

    pub fn filler_in(&self, f: Filler, c: &ClassExpr) -> Result<bool, EvalError> {
        match f {
            Filler::Node(y) => self.member(y, c),
            Filler::Value(v) => self.value_in(v, c),
        }
    }

    /// Distinct fillers of `x` under `p`, sorted.
    pub fn fillers(&self, x: NodeId, p: &PropExpr) -> Result<Vec<Filler>, EvalError> {
        let mut out = match p {
            PropExpr::Named(iri) => return Ok(self.named_property(iri)?.fillers(x).to_vec()),
            PropExpr::Inv(q) => self.subjects(x, q)?.into_iter().map(Filler::Node).collect(),
            PropExpr::Chain(a, b) => {
                let mut out = Vec::new();
                for f in self.fillers(x, a)? {
                    if let Filler::Node(y) = f {
                        out.extend(self.fillers(y, b)?);
                    }
                }
                out
            }
            PropExpr::Restrict(q, dom) => {
                if !self.member(x, dom)? {
                    return Ok(Vec::new());
                }
                return self.fillers(x, q);
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Distinct nodes `x` with `(x, y)` in `p`, sorted.
    pub fn subjects(&self, y: NodeId, p: &PropExpr) -> Result<Vec<NodeId>, EvalError> {
        let mut out = match p {
            PropExpr::Named(iri) => return Ok(self.named_property(iri)?.subjects_of(y).to_vec()),
            PropExpr::Inv(q) => self.fillers(y, q)?.into_iter().filter_map(Filler::as_node).collect(),
            PropExpr::Chain(a, b) => {
                let mut out = Vec::new();
                for m in self.subjects(y, b)? {
                    out.extend(self.subjects(m, a)?);
                }
                out
            }
            PropExpr::Restrict(q, dom) => {
                let mut out = Vec::new();
                for x in self.subjects(y, q)? {
                    if self.member(x, dom)? {
                        out.push(x);
                    }
                }
                out
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// The extension of `c` in `i`.
pub fn eval_class(i: &Interpretation, c: &ClassExpr) -> Result<NodeSet, EvalError> {
    Ok((*Evaluator::new(i).eval_class(c)?).clone())
}

/// The extension of `p` in `i`.
pub fn eval_prop(i: &Interpretation, p: &PropExpr) -> Result<Relation, EvalError> {
    Ok((*Evaluator::new(i).eval_prop(p)?).clone())
}
