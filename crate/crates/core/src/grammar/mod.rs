//! Path grammars: contexts, rules and attributes, their DSL and RDF
//! encodings, and static validation.

mod dsl;
mod model;
mod triples;
mod validate;

pub use dsl::{parse_grammar_dsl, parse_grammar_dsl_with_prefixes, serialize_dsl};
pub use model::{
    rebind_endpoints, Attribute, ContextId, ContextKind, EdgeDirection, EdgeSpec, Grammar,
    GrammarContext, Rule,
};
pub use triples::{grammar_to_triples, load_grammar_from_triples};
pub use validate::{validate_grammar, Severity, Violation, ViolationKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: undeclared context '{name}'")]
    UndeclaredContext {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("context '{0}' declared twice")]
    DuplicateContext(ContextId),
    #[error("grammar needs exactly one entry context, found {0}")]
    EntryCount(usize),
    #[error("grammar needs exactly one exit context, found {0}")]
    ExitCount(usize),
    #[error("invalid grammar: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("context {context}: missing rwr:forResource")]
    MissingForResource { context: String },
    #[error("{node}: {message}")]
    Malformed { node: String, message: String },
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
