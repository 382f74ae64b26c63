//! Closed-world Description Logic validation and recognition over RDF graphs.
//!
//! An RDF graph, after an optional RDFS closure, is read as one complete
//! interpretation. Constraint axioms are model-checked against it, newly
//! defined classes are recognized as their greatest consistent extensions, and
//! checkable axioms can be compiled to SPARQL violation queries.

pub mod rdf;
pub mod rdfs;
pub mod interpretation;
pub mod constraint;
pub mod checker;
pub mod recognition;
pub mod corpus;
pub mod sparql;

use thiserror::Error;

pub use checker::{validate, validate_with, ValidateOptions, Validation, ValidationReport, Verdict, Witness};
pub use constraint::{parse_constraints, Axiom, AxiomSet, ClassExpr, PropExpr};
pub use interpretation::{canonical_interpretation, DatatypeRegistry, Interpretation, NodeId, NodeSet};
pub use rdf::{parse_turtle, Graph, Literal, Term, Triple};
pub use rdfs::{closure, ClosureProfile, ProfileName};
pub use recognition::{recognize, RecognitionResult};

/// Any failure of the validation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Turtle(#[from] rdf::TurtleError),
    #[error(transparent)]
    Constraint(#[from] constraint::ConstraintError),
    #[error(transparent)]
    Interpretation(#[from] interpretation::InterpretationError),
    #[error(transparent)]
    Vocabulary(#[from] constraint::VocabularyError),
    #[error(transparent)]
    Eval(#[from] checker::EvalError),
    #[error(transparent)]
    Recognition(#[from] recognition::RecognitionError),
}
