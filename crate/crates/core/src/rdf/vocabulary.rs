use std::collections::BTreeSet;

use super::{ns, Graph, Term};

/// Classes, properties and individuals named by a graph.
///
/// The three sets may overlap: a class is also an individual whenever it
/// occurs as a node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub classes: BTreeSet<Term>,
    pub properties: BTreeSet<Term>,
    pub individuals: BTreeSet<Term>,
}

impl Vocabulary {
    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.properties.is_empty() && self.individuals.is_empty()
    }

    pub fn has_class(&self, iri: &str) -> bool {
        self.classes.contains(&Term::iri(iri))
    }

    pub fn has_property(&self, iri: &str) -> bool {
        self.properties.contains(&Term::iri(iri))
    }
}

/// Extracts the vocabulary of `g`.
///
/// Classes are the objects of `rdf:type` triples plus anything typed
/// `rdfs:Class`; properties are all predicates plus anything typed
/// `rdf:Property`; individuals are all non-literal nodes.
pub fn vocabulary(g: &Graph) -> Vocabulary {
    let mut v = Vocabulary::default();
    for t in g {
        v.properties.insert(t.predicate().clone());
        v.individuals.insert(t.subject().clone());
        if !t.object().is_literal() {
            v.individuals.insert(t.object().clone());
        }
        if t.predicate().is_iri(ns::RDF_TYPE) {
            let object = t.object();
            if !object.is_literal() {
                v.classes.insert(object.clone());
            }
            if object.is_iri(ns::RDFS_CLASS) {
                v.classes.insert(t.subject().clone());
            }
            if object.is_iri(ns::RDF_PROPERTY) {
                v.properties.insert(t.subject().clone());
            }
        }
    }
    v
}
