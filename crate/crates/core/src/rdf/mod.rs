//! RDF terms, triples and graphs.
//!
//! Graphs are plain finite sets of triples. Blank nodes are graph-scoped
//! constants and are treated exactly like IRIs by everything downstream.

pub mod ns;
mod turtle;
mod vocabulary;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

pub use turtle::{parse_turtle, TurtleError};
pub(crate) use turtle::resolve_iri;
pub use vocabulary::{vocabulary, Vocabulary};

/// A literal: lexical form plus datatype IRI.
///
/// Language-tagged strings use [`ns::RDF_LANG_STRING`] with the tag folded
/// into the lexical form as `value@tag`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: String,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Literal::new(lexical, ns::XSD_STRING)
    }

    pub fn lang_string(value: &str, tag: &str) -> Self {
        Literal::new(format!("{value}@{tag}"), ns::RDF_LANG_STRING)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    /// Splits a language-string lexical form into `(value, tag)`.
    pub fn language_parts(&self) -> Option<(&str, &str)> {
        if self.datatype != ns::RDF_LANG_STRING {
            return None;
        }
        self.lexical.rsplit_once('@')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    pub fn literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal::new(lexical, datatype))
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    /// `true` for IRIs equal to `iri`.
    pub fn is_iri(&self, iri: &str) -> bool {
        matches!(self, Term::Iri(i) if i == iri)
    }
}

pub(crate) fn escape_string(s: &str, out: &mut impl fmt::Write) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c if (c as u32) < 0x20 || c as u32 == 0x7f => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        if let Some((value, tag)) = self.language_parts() {
            escape_string(value, f)?;
            return write!(f, "\"@{tag}");
        }
        escape_string(&self.lexical, f)?;
        write!(f, "\"^^<{}>", self.datatype)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("triple subject may not be a literal: {0}")]
    LiteralSubject(Term),
    #[error("triple predicate must be an IRI: {0}")]
    NonIriPredicate(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TripleError> {
        if subject.is_literal() {
            return Err(TripleError::LiteralSubject(subject));
        }
        if !matches!(predicate, Term::Iri(_)) {
            return Err(TripleError::NonIriPredicate(predicate));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Builds a triple whose three terms are all IRIs.
    pub fn iris(subject: &str, predicate: &str, object: &str) -> Self {
        Triple {
            subject: Term::iri(subject),
            predicate: Term::iri(predicate),
            object: Term::iri(object),
        }
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    /// The predicate IRI. Always present by construction.
    pub fn predicate_iri(&self) -> &str {
        self.predicate.as_iri().expect("predicate is an IRI")
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A finite set of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Inserts a triple, returning `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn is_subset(&self, other: &Graph) -> bool {
        self.triples.is_subset(&other.triples)
    }

    pub fn union(&self, other: &Graph) -> Graph {
        Graph {
            triples: self.triples.union(&other.triples).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &Graph) -> Graph {
        Graph {
            triples: self.triples.difference(&other.triples).cloned().collect(),
        }
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.predicate.is_iri(predicate))
    }

    /// Blank node labels used anywhere in the graph.
    pub fn blank_labels(&self) -> BTreeSet<&str> {
        let mut labels = BTreeSet::new();
        for t in &self.triples {
            for term in [&t.subject, &t.object] {
                if let Term::Blank(label) = term {
                    labels.insert(label.as_str());
                }
            }
        }
        labels
    }

    /// Unions `other` into `self`, renaming any of `other`'s blank nodes whose
    /// labels are already used here so the two graphs' blank nodes stay apart.
    pub fn merge_disjoint(&mut self, other: Graph) {
        let taken: HashSet<String> = self.blank_labels().into_iter().map(str::to_owned).collect();
        if taken.is_empty() {
            self.triples.extend(other.triples);
            return;
        }
        let incoming: HashSet<String> = other.blank_labels().into_iter().map(str::to_owned).collect();
        let rename = |term: Term| -> Term {
            match term {
                Term::Blank(label) if taken.contains(&label) => {
                    let mut n = 1;
                    loop {
                        let fresh = format!("{label}_{n}");
                        if !taken.contains(&fresh) && !incoming.contains(&fresh) {
                            return Term::Blank(fresh);
                        }
                        n += 1;
                    }
                }
                other => other,
            }
        };
        for t in other.triples {
            let (s, p, o) = t.into_parts();
            self.triples.insert(Triple {
                subject: rename(s),
                predicate: p,
                object: rename(o),
            });
        }
    }

    /// One triple per line, terms fully expanded, sorted.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl IntoIterator for Graph {
    type Item = Triple;
    type IntoIter = std::collections::btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Set difference in both directions: `(g1 \ g2, g2 \ g1)`.
pub fn graph_diff(g1: &Graph, g2: &Graph) -> (Graph, Graph) {
    (g1.difference(g2), g2.difference(g1))
}
