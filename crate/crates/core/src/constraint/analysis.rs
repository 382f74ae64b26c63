use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Axiom, AxiomSet, ClassExpr, ConstraintError, PropExpr};
use crate::interpretation::is_standard_datatype;
use crate::rdf::{ns, Graph, Term, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("axiom {axiom} uses property <{property}>, which the graph does not have; constraints may add classes but not properties")]
    NewProperty { axiom: usize, property: String },
    #[error("axiom {axiom} names individual {individual}, which the graph does not have; constraints may add classes but not individuals")]
    NewIndividual { axiom: usize, individual: Term },
}

/// Class names used by `axioms` that are not classes of `v`.
///
/// Fails if any property or individual is missing from the vocabulary.
pub fn new_vocabulary(axioms: &AxiomSet, v: &Vocabulary) -> Result<BTreeSet<String>, VocabularyError> {
    let mut new = BTreeSet::new();
    for (i, a) in axioms.iter().enumerate() {
        if let Some(p) = a.properties().into_iter().find(|p| !v.has_property(p)) {
            return Err(VocabularyError::NewProperty {
                axiom: i,
                property: p.to_owned(),
            });
        }
        if let Some(t) = a.individuals().into_iter().find(|t| !v.individuals.contains(t)) {
            return Err(VocabularyError::NewIndividual {
                axiom: i,
                individual: t.clone(),
            });
        }
        new.extend(a.classes().into_iter().filter(|c| !v.has_class(c)).map(str::to_owned));
    }
    Ok(new)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefinitionKind {
    /// `A EquivalentTo E`
    Equivalence,
    /// `A SubClassOf E`
    Inclusion,
}

/// A class axiom whose left-hand side is a bare new class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition<'a> {
    pub axiom: usize,
    pub kind: DefinitionKind,
    pub body: &'a ClassExpr,
}

/// Definitions of each new class, in axiom order. Every new class has an
/// entry, possibly empty.
pub fn definitions<'a>(axioms: &'a AxiomSet, new: &BTreeSet<String>) -> BTreeMap<String, Vec<Definition<'a>>> {
    let mut out: BTreeMap<String, Vec<Definition<'a>>> = new.iter().map(|c| (c.clone(), Vec::new())).collect();
    for (i, a) in axioms.iter().enumerate() {
        let (name, kind, body) = match a {
            Axiom::EquivClass(ClassExpr::Named(n), body) => (n, DefinitionKind::Equivalence, body),
            Axiom::SubClass(ClassExpr::Named(n), body) => (n, DefinitionKind::Inclusion, body),
            _ => continue,
        };
        if let Some(defs) = out.get_mut(name) {
            defs.push(Definition { axiom: i, kind, body });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

fn class_polarities(c: &ClassExpr, pol: Polarity, new: &BTreeSet<String>, out: &mut BTreeSet<(String, Polarity)>) {
    let both = |c: &ClassExpr, out: &mut BTreeSet<(String, Polarity)>| {
        class_polarities(c, Polarity::Positive, new, out);
        class_polarities(c, Polarity::Negative, new, out);
    };
    match c {
        ClassExpr::Named(n) if new.contains(n) => {
            out.insert((n.clone(), pol));
        }
        ClassExpr::Named(_) | ClassExpr::Thing | ClassExpr::Nominal(_) | ClassExpr::Datatype(_) => {}
        ClassExpr::And(cs) | ClassExpr::Or(cs) => cs.iter().for_each(|c| class_polarities(c, pol, new, out)),
        ClassExpr::Not(c) => class_polarities(c, pol.flip(), new, out),
        // a bigger property can only break a universal
        ClassExpr::All(p, c) => {
            prop_polarities(p, pol.flip(), new, out);
            class_polarities(c, pol, new, out);
        }
        ClassExpr::Some(p, c) => {
            prop_polarities(p, pol, new, out);
            class_polarities(c, pol, new, out);
        }
        ClassExpr::Min(_, p, q) => {
            prop_polarities(p, pol, new, out);
            if let Some(q) = q {
                class_polarities(q, pol, new, out);
            }
        }
        ClassExpr::Max(_, p, q) => {
            prop_polarities(p, pol.flip(), new, out);
            if let Some(q) = q {
                class_polarities(q, pol.flip(), new, out);
            }
        }
        ClassExpr::Exact(_, p, q) => {
            for pol in [Polarity::Positive, Polarity::Negative] {
                prop_polarities(p, pol, new, out);
            }
            if let Some(q) = q {
                both(q, out);
            }
        }
    }
}

fn prop_polarities(p: &PropExpr, pol: Polarity, new: &BTreeSet<String>, out: &mut BTreeSet<(String, Polarity)>) {
    match p {
        PropExpr::Named(_) => {}
        PropExpr::Inv(p) => prop_polarities(p, pol, new, out),
        PropExpr::Chain(p, q) => {
            prop_polarities(p, pol, new, out);
            prop_polarities(q, pol, new, out);
        }
        // the pair set grows with the domain class
        PropExpr::Restrict(p, dom) => {
            prop_polarities(p, pol, new, out);
            class_polarities(dom, pol, new, out);
        }
    }
}

/// Signed edges from each new class to the new classes its definitions use.
pub fn dependency_graph(axioms: &AxiomSet, new: &BTreeSet<String>) -> BTreeMap<String, BTreeSet<(String, Polarity)>> {
    definitions(axioms, new)
        .into_iter()
        .map(|(name, defs)| {
            let mut edges = BTreeSet::new();
            for d in defs {
                class_polarities(d.body, Polarity::Positive, new, &mut edges);
            }
            (name, edges)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monotonicity {
    /// Recursive, and every dependency is positive.
    Monotone,
    /// Not certified monotone.
    NonMonotone,
    /// No recursion is reachable from the class.
    NonRecursive,
}

impl Monotonicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Monotone => "MONOTONE",
            Monotonicity::NonMonotone => "NON_MONOTONE",
            Monotonicity::NonRecursive => "NON_RECURSIVE",
        }
    }
}

fn reachable(graph: &BTreeMap<String, BTreeSet<(String, Polarity)>>, from: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from.to_owned()];
    while let Some(c) = stack.pop() {
        if seen.insert(c.clone()) {
            if let Some(edges) = graph.get(&c) {
                stack.extend(edges.iter().map(|(d, _)| d.clone()));
            }
        }
    }
    seen
}

fn on_cycle(graph: &BTreeMap<String, BTreeSet<(String, Polarity)>>, c: &str) -> bool {
    graph
        .get(c)
        .is_some_and(|edges| edges.iter().any(|(d, _)| reachable(graph, d).contains(c)))
}

/// Classifies every new class of `axioms` by a signed dependency analysis.
///
/// A class whose reachable classes include no cycle is non-recursive. A
/// recursive class is monotone when every edge reachable from it is
/// positive or points at a class fixed outright by equivalence
/// definitions without recursion; anything else is non-monotone.
pub fn monotonicity_check(axioms: &AxiomSet, new: &BTreeSet<String>) -> BTreeMap<String, Monotonicity> {
    let graph = dependency_graph(axioms, new);
    let defs = definitions(axioms, new);
    let cyclic: BTreeSet<&String> = graph.keys().filter(|c| on_cycle(&graph, c)).collect();
    // a class is determined when it and everything it reaches are acyclic and
    // pinned by an equivalence, so every extension model agrees on it
    let determined = |c: &str| {
        reachable(&graph, c).iter().all(|d| {
            !cyclic.contains(d) && defs[d].iter().any(|def| def.kind == DefinitionKind::Equivalence)
        })
    };
    graph
        .keys()
        .map(|c| {
            let closure = reachable(&graph, c);
            let safe = closure.iter().all(|d| {
                graph[d]
                    .iter()
                    .all(|(e, pol)| *pol == Polarity::Positive || determined(e))
            });
            let verdict = match (closure.iter().any(|d| cyclic.contains(d)), safe) {
                (_, false) => Monotonicity::NonMonotone,
                (false, true) => Monotonicity::NonRecursive,
                (true, true) => Monotonicity::Monotone,
            };
            (c.clone(), verdict)
        })
        .collect()
}

/// Turns removed `rdfs:domain`/`rdfs:range` statements into constraints.
///
/// `p rdfs:domain C` becomes `Some(p, Thing) SubClassOf C` and
/// `p rdfs:range C` becomes `Thing SubClassOf All(p, C)`.
pub fn domain_range_to_constraints(removed: &Graph) -> Result<AxiomSet, ConstraintError> {
    let mut set = AxiomSet::new();
    for t in removed {
        let not_dr = || ConstraintError::NotDomainRange(Box::new(t.clone()));
        let (Some(p), Some(c)) = (t.subject().as_iri(), t.object().as_iri()) else {
            return Err(not_dr());
        };
        let class = if is_standard_datatype(c) {
            ClassExpr::Datatype(c.to_owned())
        } else {
            ClassExpr::named(c)
        };
        let axiom = if t.predicate().is_iri(ns::RDFS_DOMAIN) {
            Axiom::SubClass(ClassExpr::some(PropExpr::named(p), ClassExpr::Thing), class)
        } else if t.predicate().is_iri(ns::RDFS_RANGE) {
            Axiom::SubClass(ClassExpr::Thing, ClassExpr::all(PropExpr::named(p), class))
        } else {
            return Err(not_dr());
        };
        set.push(axiom, t.to_string(), 0)?;
    }
    Ok(set)
}
