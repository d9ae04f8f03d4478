//! In-memory semantic network: triple storage, pattern matching and the
//! subsumption checks used by the traversal rules.

mod graph;
mod ntriples;
mod resource;

pub use graph::{Graph, GraphBuilder, IdTriple, Subsumption, TermId, Triple, TriplePattern};
pub use ntriples::{load_ntriples, load_ntriples_with, parse_into};
pub use resource::{PrefixMap, Resource};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}invalid triple: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, reason: String },
}
