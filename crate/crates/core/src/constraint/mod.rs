//! The constraint and recognition language.
//!
//! Class and property expressions, axioms over them, a line-oriented text
//! syntax with a matching printer, and the static analyses recognition needs.

mod analysis;
mod parser;
mod print;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use analysis::{
    definitions, dependency_graph, domain_range_to_constraints, monotonicity_check, new_vocabulary, Definition,
    DefinitionKind, Monotonicity, Polarity, VocabularyError,
};
pub use parser::parse_constraints;
pub use print::Printer;

use crate::rdf::{Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassExpr {
    Named(String),
    Thing,
    Nominal(Vec<Term>),
    Datatype(String),
    And(Vec<ClassExpr>),
    Or(Vec<ClassExpr>),
    Not(Box<ClassExpr>),
    All(PropExpr, Box<ClassExpr>),
    Some(PropExpr, Box<ClassExpr>),
    Min(u32, PropExpr, Option<Box<ClassExpr>>),
    Max(u32, PropExpr, Option<Box<ClassExpr>>),
    Exact(u32, PropExpr, Option<Box<ClassExpr>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropExpr {
    Named(String),
    Inv(Box<PropExpr>),
    Chain(Box<PropExpr>, Box<PropExpr>),
    Restrict(Box<PropExpr>, Box<ClassExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SubClass(ClassExpr, ClassExpr),
    EquivClass(ClassExpr, ClassExpr),
    SubProp(PropExpr, PropExpr),
    Member(Term, ClassExpr),
    Different(Vec<Term>),
}

impl ClassExpr {
    pub fn named(iri: impl Into<String>) -> Self {
        ClassExpr::Named(iri.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ClassExpr) -> Self {
        ClassExpr::Not(Box::new(c))
    }

    pub fn all(p: PropExpr, c: ClassExpr) -> Self {
        ClassExpr::All(p, Box::new(c))
    }

    pub fn some(p: PropExpr, c: ClassExpr) -> Self {
        ClassExpr::Some(p, Box::new(c))
    }

    pub fn min(n: u32, p: PropExpr, q: Option<ClassExpr>) -> Self {
        ClassExpr::Min(n, p, q.map(Box::new))
    }

    pub fn max(n: u32, p: PropExpr, q: Option<ClassExpr>) -> Self {
        ClassExpr::Max(n, p, q.map(Box::new))
    }

    pub fn exact(n: u32, p: PropExpr, q: Option<ClassExpr>) -> Self {
        ClassExpr::Exact(n, p, q.map(Box::new))
    }

    /// Visits every class expression inside `self`, including `self` and
    /// the domains of property restrictions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ClassExpr)) {
        f(self);
        match self {
            ClassExpr::Named(_) | ClassExpr::Thing | ClassExpr::Nominal(_) | ClassExpr::Datatype(_) => {}
            ClassExpr::And(cs) | ClassExpr::Or(cs) => cs.iter().for_each(|c| c.walk(f)),
            ClassExpr::Not(c) => c.walk(f),
            ClassExpr::All(p, c) | ClassExpr::Some(p, c) => {
                p.walk_classes(f);
                c.walk(f);
            }
            ClassExpr::Min(_, p, q) | ClassExpr::Max(_, p, q) | ClassExpr::Exact(_, p, q) => {
                p.walk_classes(f);
                if let Some(q) = q {
                    q.walk(f);
                }
            }
        }
    }

    /// Every named property inside `self`.
    pub fn properties(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            ClassExpr::All(p, _)
            | ClassExpr::Some(p, _)
            | ClassExpr::Min(_, p, _)
            | ClassExpr::Max(_, p, _)
            | ClassExpr::Exact(_, p, _) => p.collect_names(&mut out),
            _ => {}
        });
        out
    }

    /// Whether any named class inside `self` satisfies `pred`.
    pub fn mentions_class(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |c| {
            if let ClassExpr::Named(iri) = c {
                found |= pred(iri);
            }
        });
        found
    }
}

impl PropExpr {
    pub fn named(iri: impl Into<String>) -> Self {
        PropExpr::Named(iri.into())
    }

    pub fn inv(p: PropExpr) -> Self {
        PropExpr::Inv(Box::new(p))
    }

    pub fn chain(p: PropExpr, q: PropExpr) -> Self {
        PropExpr::Chain(Box::new(p), Box::new(q))
    }

    pub fn restrict(p: PropExpr, dom: ClassExpr) -> Self {
        PropExpr::Restrict(Box::new(p), Box::new(dom))
    }

    fn walk_classes<'a>(&'a self, f: &mut dyn FnMut(&'a ClassExpr)) {
        match self {
            PropExpr::Named(_) => {}
            PropExpr::Inv(p) => p.walk_classes(f),
            PropExpr::Chain(p, q) => {
                p.walk_classes(f);
                q.walk_classes(f);
            }
            PropExpr::Restrict(p, c) => {
                p.walk_classes(f);
                c.walk(f);
            }
        }
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PropExpr::Named(iri) => out.push(iri),
            PropExpr::Inv(p) | PropExpr::Restrict(p, _) => p.collect_names(out),
            PropExpr::Chain(p, q) => {
                p.collect_names(out);
                q.collect_names(out);
            }
        }
    }

    /// Every named property inside `self`, including those in restriction domains.
    pub fn properties(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        self.walk_classes(&mut |c| {
            if let ClassExpr::All(p, _)
            | ClassExpr::Some(p, _)
            | ClassExpr::Min(_, p, _)
            | ClassExpr::Max(_, p, _)
            | ClassExpr::Exact(_, p, _) = c
            {
                p.collect_names(&mut out);
            }
        });
        out
    }

    /// Visits every class expression inside `self`.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ClassExpr)) {
        self.walk_classes(f);
    }
}

impl Axiom {
    /// Every class expression inside the axiom.
    pub fn walk_classes<'a>(&'a self, f: &mut dyn FnMut(&'a ClassExpr)) {
        match self {
            Axiom::SubClass(l, r) | Axiom::EquivClass(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Axiom::SubProp(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Axiom::Member(_, c) => c.walk(f),
            Axiom::Different(_) => {}
        }
    }

    /// Every named property inside the axiom.
    pub fn properties(&self) -> Vec<&str> {
        let mut out = Vec::new();
        if let Axiom::SubProp(l, r) = self {
            out.extend(l.properties());
            out.extend(r.properties());
        }
        self.walk_classes(&mut |c| {
            if let ClassExpr::All(p, _)
            | ClassExpr::Some(p, _)
            | ClassExpr::Min(_, p, _)
            | ClassExpr::Max(_, p, _)
            | ClassExpr::Exact(_, p, _) = c
            {
                p.collect_names(&mut out);
            }
        });
        out
    }

    /// Every non-literal individual named by the axiom.
    pub fn individuals(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        match self {
            Axiom::Member(t, _) => out.push(t),
            Axiom::Different(ts) => out.extend(ts),
            _ => {}
        }
        self.walk_classes(&mut |c| {
            if let ClassExpr::Nominal(ts) = c {
                out.extend(ts.iter().filter(|t| !t.is_literal()));
            }
        });
        out
    }

    /// Every named class inside the axiom.
    pub fn classes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk_classes(&mut |c| {
            if let ClassExpr::Named(iri) = c {
                out.push(iri.as_str());
            }
        });
        out
    }

    /// The class named by a bare left-hand side of a class axiom.
    pub fn defined_name(&self) -> Option<&str> {
        match self {
            Axiom::SubClass(ClassExpr::Named(a), _) | Axiom::EquivClass(ClassExpr::Named(a), _) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undefined prefix '{prefix}:'")]
    UnresolvedPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
    #[error("line {line}: <{class}> already has an equivalence definition (line {first_line})")]
    DuplicateDefinition {
        class: String,
        line: usize,
        first_line: usize,
    },
    #[error("{line}:{column}: Different needs at least two individuals")]
    TooFewIndividuals { line: usize, column: usize },
    #[error("{line}:{column}: {term} is listed twice in Different")]
    RepeatedIndividual { line: usize, column: usize, term: Term },
    #[error("{0} is not an rdfs:domain or rdfs:range statement over IRIs")]
    NotDomainRange(Box<Triple>),
}

/// An ordered list of axioms with the text each came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomSet {
    axioms: Vec<Axiom>,
    sources: Vec<String>,
    lines: Vec<usize>,
    equivalences: BTreeMap<String, usize>,
}

impl AxiomSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set whose sources are the printed axioms.
    pub fn from_axioms(axioms: impl IntoIterator<Item = Axiom>) -> Result<Self, ConstraintError> {
        let mut set = Self::new();
        for a in axioms {
            let source = a.to_string();
            set.push(a, source, 0)?;
        }
        Ok(set)
    }

    /// Appends an axiom. `line` is the source line, or 0 for generated axioms.
    pub fn push(&mut self, axiom: Axiom, source: String, line: usize) -> Result<(), ConstraintError> {
        if let Axiom::EquivClass(ClassExpr::Named(a), _) = &axiom {
            if let Some(&first) = self.equivalences.get(a) {
                return Err(ConstraintError::DuplicateDefinition {
                    class: a.clone(),
                    line,
                    first_line: self.lines[first],
                });
            }
            self.equivalences.insert(a.clone(), self.axioms.len());
        }
        self.axioms.push(axiom);
        self.sources.push(source);
        self.lines.push(line);
        Ok(())
    }

    /// Appends every axiom of `other`.
    pub fn extend(&mut self, other: AxiomSet) -> Result<(), ConstraintError> {
        for ((a, s), l) in other.axioms.into_iter().zip(other.sources).zip(other.lines) {
            self.push(a, s, l)?;
        }
        Ok(())
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn source(&self, i: usize) -> &str {
        &self.sources[i]
    }

    pub fn line(&self, i: usize) -> usize {
        self.lines[i]
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter()
    }

    /// One printed axiom per line; parses back to an equal set.
    pub fn to_text(&self) -> String {
        self.axioms.iter().map(|a| format!("{a}\n")).collect()
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::default().class(f, self)
    }
}

impl fmt::Display for PropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::default().prop(f, self)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::default().axiom(f, self)
    }
}
