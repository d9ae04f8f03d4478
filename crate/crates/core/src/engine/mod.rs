//! Discrete walkers executing a grammar over a graph.
//!
//! A walker carries its full traversal history `g` and its recorded path `q`.
//! Each generation every live walker runs its context's rules in order;
//! `traverse` rules yield the legal transitions and the walker is cloned once
//! per transition. Walkers that land on the exit context run the exit's rules
//! immediately and finish.

mod machine;
mod program;
mod walker;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{ContextId, Grammar};
use crate::triple_store::{Graph, PrefixMap, Resource, Triple};

pub use machine::{Engine, Expansion};
pub use walker::Walker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    /// Subject to object, written `+`.
    Forward,
    /// Object to subject, written `-`.
    Backward,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Forward => "+",
            Direction::Backward => "-",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(Direction::Forward),
            "-" | "\u{2212}" => Some(Direction::Backward),
            _ => None,
        }
    }
}

/// The edge a step arrived by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Via {
    pub predicate: Resource,
    pub direction: Direction,
}

/// One time step of a path: a vertex and, after the first step, the edge used
/// to reach it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathStep {
    pub vertex: Resource,
    pub via: Option<Via>,
}

impl PathStep {
    pub fn start(vertex: Resource) -> Self {
        Self { vertex, via: None }
    }

    pub fn arrive(vertex: Resource, predicate: Resource, direction: Direction) -> Self {
        Self {
            vertex,
            via: Some(Via {
                predicate,
                direction,
            }),
        }
    }
}

/// A returned path, one element of `Q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathRecord {
    pub steps: Vec<PathStep>,
}

impl PathRecord {
    pub fn new(steps: Vec<PathStep>) -> Self {
        Self { steps }
    }

    pub fn edge_length(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    /// Length of the flat `(v0, p1, d1, v1, ...)` tuple.
    pub fn flattened_len(&self) -> usize {
        if self.steps.is_empty() {
            0
        } else {
            3 * self.edge_length() + 1
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Resource> {
        self.steps.iter().map(|s| &s.vertex)
    }

    pub fn first(&self) -> Option<&Resource> {
        self.steps.first().map(|s| &s.vertex)
    }

    pub fn last(&self) -> Option<&Resource> {
        self.steps.last().map(|s| &s.vertex)
    }

    /// Whether `v` occurs anywhere but the first and last position.
    pub fn has_interior(&self, v: &Resource) -> bool {
        let n = self.steps.len();
        n > 2 && self.steps[1..n - 1].iter().any(|s| &s.vertex == v)
    }

    /// `(v0) -[p1,+]-> (v1) ...` with IRIs compacted where a prefix matches.
    pub fn display_with(&self, prefixes: &PrefixMap) -> String {
        let mut out = String::new();
        for (k, step) in self.steps.iter().enumerate() {
            match &step.via {
                Some(via) => {
                    out.push_str(&format!(
                        " -[{},{}]-> ",
                        via.predicate.compact(prefixes),
                        via.direction.symbol()
                    ));
                }
                None if k > 0 => out.push_str(" -> "),
                None => {}
            }
            out.push_str(&format!("({})", step.vertex.compact(prefixes)));
        }
        out
    }
}

impl fmt::Display for PathRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&PrefixMap::new()))
    }
}

/// A legal move out of the walker's current vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Transition {
    pub triple: Triple,
    pub direction: Direction,
    pub next_context: ContextId,
}

impl Transition {
    /// The vertex the walker moves to.
    pub fn destination(&self) -> &Resource {
        match self.direction {
            Direction::Forward => &self.triple.object,
            Direction::Backward => &self.triple.subject,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Stop after the first generation that finishes a walker.
    ShortestOnly,
    /// Run until no walker is left.
    #[default]
    AllPaths,
}

pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: RunMode,
    /// Generations before the run is cut off.
    pub max_steps: usize,
    /// Worker threads for frontier expansion; 1 runs inline.
    pub threads: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::AllPaths,
            max_steps: DEFAULT_MAX_STEPS,
            threads: 1,
        }
    }
}

impl EngineConfig {
    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("entry resource {0} does not occur in the graph")]
    UnresolvableEntry(Resource),
    #[error("context {context}: {rule} reaches position {position}, before the start of the path")]
    StepOutOfRange {
        context: ContextId,
        rule: String,
        position: i64,
    },
    #[error("run cut off after {max_steps} generations ({} paths found so far)", partial.len())]
    Truncated {
        max_steps: usize,
        partial: BTreeSet<PathRecord>,
    },
    #[error("resource {0} does not occur in the graph")]
    UnknownResource(Resource),
    #[error("unknown context {0}")]
    UnknownContext(ContextId),
    #[error("invalid engine configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RunStats {
    pub generations: usize,
    /// Legal transitions produced, one per successor walker.
    pub transitions: usize,
    /// Candidate triples inspected while computing legal edges.
    pub triples_scanned: usize,
    pub walkers_created: usize,
    pub max_frontier: usize,
}

impl RunStats {
    pub(crate) fn absorb(&mut self, other: &RunStats) {
        self.transitions += other.transitions;
        self.triples_scanned += other.triples_scanned;
        self.walkers_created += other.walkers_created;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkerSummary {
    pub id: u64,
    pub context: ContextId,
    pub vertex: Resource,
    pub time: usize,
    pub finished: bool,
}

/// What one generation did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationTrace {
    /// Time index of the walkers being expanded.
    pub time: usize,
    pub expanded: Vec<WalkerSummary>,
    /// Legal transitions per expanded walker id.
    pub transitions: Vec<(u64, Transition)>,
    /// Every walker emitted this generation, finished or not.
    pub produced: Vec<WalkerSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Trace {
    pub generations: Vec<GenerationTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub records: BTreeSet<PathRecord>,
    /// Each record with the smallest id of a walker that produced it, by id.
    pub walkers: Vec<(u64, PathRecord)>,
    pub stats: RunStats,
}

/// Runs `grammar` over `graph` and returns `Q`.
pub fn run(
    graph: &Graph,
    grammar: &Grammar,
    mode: RunMode,
    max_steps: usize,
) -> Result<BTreeSet<PathRecord>, EngineError> {
    let config = EngineConfig::default()
        .with_mode(mode)
        .with_max_steps(max_steps);
    Ok(Engine::new(graph, grammar, config)?.run()?.records)
}
