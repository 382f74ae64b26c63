//! Datatype registry and the canonical interpretation of a graph.
//!
//! The domain is every class, property and individual of the graph, each
//! node denoting itself. Class extensions come from `rdf:type` triples and
//! property extensions are the graph projected by predicate, with literal
//! objects replaced by their values. The data domain is never materialized.

mod datatype;
mod sets;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

pub use datatype::{
    is_standard_datatype, literal_value, Datatype, DatatypeError, DatatypeRegistry, Decimal, Double, Value,
    ValueKind,
};
pub use sets::{Filler, NodeId, NodeSet, Relation, ValueId};

use crate::rdf::{ns, vocabulary, Graph, Literal, Term, Triple, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("the graph is empty, so its interpretation would have an empty domain; validating nothing is vacuous")]
    EmptyGraph,
    #[error("{source} (in triple {triple})")]
    Literal {
        triple: Box<Triple>,
        #[source]
        source: DatatypeError,
    },
    #[error("triple {0} states membership in a datatype")]
    DatatypeMembershipTriple(Box<Triple>),
}

/// The canonical interpretation of a graph, plus extensions for classes
/// defined outside it.
#[derive(Debug, Clone)]
pub struct Interpretation {
    nodes: Vec<Term>,
    node_ids: HashMap<Term, NodeId>,
    values: Vec<Value>,
    value_ids: HashMap<Value, ValueId>,
    classes: HashMap<Term, Vec<NodeId>>,
    properties: HashMap<Term, Relation>,
    defined: BTreeMap<String, NodeSet>,
    vocabulary: Vocabulary,
    registry: DatatypeRegistry,
}

/// Builds the canonical interpretation of `g`.
pub fn canonical_interpretation(g: &Graph, reg: &DatatypeRegistry) -> Result<Interpretation, InterpretationError> {
    if g.is_empty() {
        return Err(InterpretationError::EmptyGraph);
    }
    let vocab = vocabulary(g);
    let domain: BTreeSet<&Term> = vocab
        .classes
        .iter()
        .chain(&vocab.properties)
        .chain(&vocab.individuals)
        .collect();
    let nodes: Vec<Term> = domain.into_iter().cloned().collect();
    let node_ids: HashMap<Term, NodeId> = nodes
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), NodeId(i as u32)))
        .collect();

    let mut values = Vec::new();
    let mut value_ids = HashMap::new();
    let mut members: HashMap<Term, Vec<NodeId>> = vocab.classes.iter().map(|c| (c.clone(), Vec::new())).collect();
    let mut pairs: HashMap<Term, Vec<(NodeId, Filler)>> =
        vocab.properties.iter().map(|p| (p.clone(), Vec::new())).collect();

    for t in g {
        let s = node_ids[t.subject()];
        let filler = match t.object() {
            Term::Literal(lit) => {
                let v = reg.literal_value(lit).map_err(|source| InterpretationError::Literal {
                    triple: Box::new(t.clone()),
                    source,
                })?;
                let id = *value_ids.entry(v.clone()).or_insert_with(|| {
                    values.push(v);
                    ValueId(values.len() as u32 - 1)
                });
                Filler::Value(id)
            }
            node => Filler::Node(node_ids[node]),
        };
        if t.predicate().is_iri(ns::RDF_TYPE) {
            if let Some(iri) = t.object().as_iri() {
                if reg.contains(iri) {
                    return Err(InterpretationError::DatatypeMembershipTriple(Box::new(t.clone())));
                }
            }
            if let Some(m) = members.get_mut(t.object()) {
                m.push(s);
            }
        }
        pairs.get_mut(t.predicate()).expect("predicates are properties").push((s, filler));
    }

    let classes = members
        .into_iter()
        .map(|(c, mut m)| {
            m.sort_unstable();
            m.dedup();
            (c, m)
        })
        .collect();
    let properties = pairs.into_iter().map(|(p, ps)| (p, Relation::from_pairs(ps))).collect();
    Ok(Interpretation {
        nodes,
        node_ids,
        values,
        value_ids,
        classes,
        properties,
        defined: BTreeMap::new(),
        vocabulary: vocab,
        registry: reg.clone(),
    })
}

impl Interpretation {
    pub fn domain_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn nodes(&self) -> &[Term] {
        &self.nodes
    }

    pub fn node_id(&self, t: &Term) -> Option<NodeId> {
        self.node_ids.get(t).copied()
    }

    pub fn term(&self, n: NodeId) -> &Term {
        &self.nodes[n.index()]
    }

    pub fn value(&self, v: ValueId) -> &Value {
        &self.values[v.0 as usize]
    }

    pub fn value_id(&self, v: &Value) -> Option<ValueId> {
        self.value_ids.get(v).copied()
    }

    /// The value id of a literal, or `None` if no graph literal has its value.
    pub fn literal_value_id(&self, lit: &Literal) -> Result<Option<ValueId>, DatatypeError> {
        Ok(self.value_id(&self.registry.literal_value(lit)?))
    }

    /// Renders a filler as a term; values use their canonical literal.
    pub fn filler_term(&self, f: Filler) -> Term {
        match f {
            Filler::Node(n) => self.term(n).clone(),
            Filler::Value(v) => Term::Literal(self.value(v).canonical_literal()),
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn registry(&self) -> &DatatypeRegistry {
        &self.registry
    }

    /// Members of a graph class, sorted.
    pub fn class_extension(&self, class: &Term) -> Option<&[NodeId]> {
        self.classes.get(class).map(Vec::as_slice)
    }

    pub fn property(&self, p: &Term) -> Option<&Relation> {
        self.properties.get(p)
    }

    /// Extension of a class defined outside the graph.
    pub fn defined(&self, iri: &str) -> Option<&NodeSet> {
        self.defined.get(iri)
    }

    pub fn defined_classes(&self) -> impl Iterator<Item = (&str, &NodeSet)> {
        self.defined.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn set_defined(&mut self, iri: impl Into<String>, ext: NodeSet) {
        assert_eq!(ext.domain_size(), self.domain_size(), "defined extension over a different domain");
        self.defined.insert(iri.into(), ext);
    }

    pub fn clear_defined(&mut self) {
        self.defined.clear();
    }

    /// One sorted line per class and property extension.
    pub fn dump(&self) -> String {
        let names = |ids: &mut dyn Iterator<Item = NodeId>| {
            let mut v: Vec<String> = ids.map(|n| self.term(n).to_string()).collect();
            v.sort();
            v.join(" ")
        };
        let mut lines = Vec::new();
        lines.push(format!("domain {}", names(&mut self.domain())));
        for (c, m) in &self.classes {
            lines.push(format!("class {c} = {{{}}}", names(&mut m.iter().copied())));
        }
        for (c, m) in &self.defined {
            lines.push(format!("defined <{c}> = {{{}}}", names(&mut m.iter())));
        }
        for (p, r) in &self.properties {
            let mut pairs: Vec<String> = r
                .pairs()
                .map(|(x, f)| format!("({} {})", self.term(x), self.filler_term(f)))
                .collect();
            pairs.sort();
            lines.push(format!("property {p} = {{{}}}", pairs.join(" ")));
        }
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}
