//! Grammar-based shortest paths and the metrics built on them.
//!
//! Every pairwise quantity `s(i, j)` is the edge length of the shortest
//! record of the grammar rebound to entry `i` and exit `j`. Aggregates skip
//! unreachable targets and report how many they skipped.

mod projection;

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Engine, EngineConfig, EngineError, PathRecord, RunMode};
use crate::grammar::Grammar;
use crate::triple_store::{Graph, Resource};

pub use projection::{
    degree, degree_projected, project, projection_adjacency, projection_vertices, unlabeled_distances,
    unlabeled_oracle_geodesics, unlabeled_oracle_with, NamespaceFilter,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    ShortestPath,
    Eccentricity,
    Radius,
    Diameter,
    Closeness,
    Betweenness,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::ShortestPath,
        MetricKind::Eccentricity,
        MetricKind::Radius,
        MetricKind::Diameter,
        MetricKind::Closeness,
        MetricKind::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::ShortestPath => "shortest-path",
            MetricKind::Eccentricity => "eccentricity",
            MetricKind::Radius => "radius",
            MetricKind::Diameter => "diameter",
            MetricKind::Closeness => "closeness",
            MetricKind::Betweenness => "betweenness",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    ShortestPath { from: Resource, to: Resource },
    Eccentricity(Resource),
    Radius,
    Diameter,
    Closeness(Resource),
    Betweenness(Resource),
}

impl Metric {
    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::ShortestPath { .. } => MetricKind::ShortestPath,
            Metric::Eccentricity(_) => MetricKind::Eccentricity,
            Metric::Radius => MetricKind::Radius,
            Metric::Diameter => MetricKind::Diameter,
            Metric::Closeness(_) => MetricKind::Closeness,
            Metric::Betweenness(_) => MetricKind::Betweenness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetricValue {
    Natural(u64),
    Real(f64),
    Undefined,
}

impl MetricValue {
    pub fn is_defined(self) -> bool {
        !matches!(self, MetricValue::Undefined)
    }

    pub fn as_natural(self) -> Option<u64> {
        match self {
            MetricValue::Natural(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_real(self) -> Option<f64> {
        match self {
            MetricValue::Real(x) => Some(x),
            MetricValue::Natural(n) => Some(n as f64),
            MetricValue::Undefined => None,
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Natural(n) => write!(f, "{n}"),
            MetricValue::Real(x) => write!(f, "{x}"),
            MetricValue::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult {
    pub kind: MetricKind,
    pub value: MetricValue,
    /// Tied shortest records; filled for shortest path only.
    pub witness_paths: BTreeSet<PathRecord>,
    /// Targets (or vertices, for radius and diameter) left out as undefined.
    pub skipped_targets: usize,
}

impl MetricResult {
    pub fn new(kind: MetricKind, value: MetricValue) -> Self {
        Self {
            kind,
            value,
            witness_paths: BTreeSet::new(),
            skipped_targets: 0,
        }
    }

    fn skipping(mut self, skipped: usize) -> Self {
        self.skipped_targets = skipped;
        self
    }
}

/// The shortest records between one pair, all of one length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Shortest {
    pub paths: BTreeSet<PathRecord>,
}

impl Shortest {
    pub fn length(&self) -> Option<usize> {
        self.paths.iter().map(PathRecord::edge_length).min()
    }

    /// Tied shortest records with `i` strictly inside.
    pub fn through(&self, i: &Resource) -> usize {
        self.paths.iter().filter(|p| p.has_interior(i)).count()
    }
}

/// Metric evaluation for one grammar over one graph.
pub struct Geodesics<'g> {
    engine: Engine<'g>,
}

impl<'g> Geodesics<'g> {
    /// The engine runs in ShortestOnly mode whatever `config` says.
    pub fn new(graph: &'g Graph, grammar: &Grammar, config: EngineConfig) -> Result<Self, EngineError> {
        let engine = Engine::new(graph, grammar, config.with_mode(RunMode::ShortestOnly))?;
        Ok(Self { engine })
    }

    pub fn engine(&self) -> &Engine<'g> {
        &self.engine
    }

    /// Shortest records of the grammar with its own endpoints.
    pub fn shortest(&self) -> Result<Shortest, EngineError> {
        Ok(Shortest {
            paths: minimal(self.engine.run()?.records),
        })
    }

    /// Shortest records of the grammar rebound to `i` and `j`.
    pub fn shortest_between(&self, i: &Resource, j: &Resource) -> Result<Shortest, EngineError> {
        if !self.engine.graph().contains_resource(i) {
            return Ok(Shortest::default());
        }
        let out = self.engine.with_endpoints(i, j).run()?;
        Ok(Shortest {
            paths: minimal(out.records),
        })
    }

    /// Shortest records from `i` to each of `targets`, in target order, from
    /// one shared run.
    pub fn shortest_from(&self, i: &Resource, targets: &[Resource]) -> Result<Vec<Shortest>, EngineError> {
        if !self.engine.graph().contains_resource(i) {
            return Ok(vec![Shortest::default(); targets.len()]);
        }
        Ok(self
            .engine
            .run_to_targets(i, targets)?
            .into_iter()
            .map(|paths| Shortest { paths: minimal(paths) })
            .collect())
    }

    /// Row `k` holds the shortest records from the `k`-th vertex to every
    /// other vertex, both in set order.
    pub fn table(&self, vertices: &BTreeSet<Resource>) -> Result<Vec<Vec<Shortest>>, EngineError> {
        let sources: Vec<&Resource> = vertices.iter().collect();
        let row = |i: &&Resource| {
            let targets: Vec<Resource> = vertices.iter().filter(|j| j != i).cloned().collect();
            self.shortest_from(i, &targets)
        };
        match self.engine.pool() {
            Some(pool) => pool.install(|| sources.par_iter().map(row).collect()),
            None => sources.iter().map(row).collect(),
        }
    }

    /// `s(i, j)` for every target other than `i`, in target order.
    pub fn distances_from(
        &self,
        i: &Resource,
        targets: &BTreeSet<Resource>,
    ) -> Result<Vec<Option<usize>>, EngineError> {
        let others: Vec<Resource> = targets.iter().filter(|j| *j != i).cloned().collect();
        Ok(self.shortest_from(i, &others)?.iter().map(Shortest::length).collect())
    }

    pub fn shortest_path(&self) -> Result<MetricResult, EngineError> {
        Ok(shortest_result(self.shortest()?))
    }

    pub fn shortest_path_between(&self, i: &Resource, j: &Resource) -> Result<MetricResult, EngineError> {
        Ok(shortest_result(self.shortest_between(i, j)?))
    }

    pub fn eccentricity(&self, i: &Resource, targets: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        Ok(eccentricity_of(&self.distances_from(i, targets)?))
    }

    pub fn radius(&self, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        Ok(extremum(MetricKind::Radius, &self.eccentricities(vertices)?))
    }

    pub fn diameter(&self, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        Ok(extremum(MetricKind::Diameter, &self.eccentricities(vertices)?))
    }

    /// Eccentricity of every vertex against the whole set.
    pub fn eccentricities(&self, vertices: &BTreeSet<Resource>) -> Result<Vec<Option<u64>>, EngineError> {
        Ok(self
            .table(vertices)?
            .iter()
            .map(|row| {
                let d: Vec<Option<usize>> = row.iter().map(Shortest::length).collect();
                eccentricity_of(&d).value.as_natural()
            })
            .collect())
    }

    pub fn closeness(&self, i: &Resource, targets: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        Ok(closeness_of(&self.distances_from(i, targets)?))
    }

    pub fn betweenness(&self, i: &Resource, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        let rest: BTreeSet<Resource> = vertices.iter().filter(|v| *v != i).cloned().collect();
        let counts: Vec<(usize, usize)> = self
            .table(&rest)?
            .iter()
            .flatten()
            .map(|s| (s.through(i), s.paths.len()))
            .collect();
        Ok(betweenness_of(&counts))
    }

    pub fn compute(&self, metric: &Metric, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
        match metric {
            Metric::ShortestPath { from, to } => self.shortest_path_between(from, to),
            Metric::Eccentricity(i) => self.eccentricity(i, vertices),
            Metric::Radius => self.radius(vertices),
            Metric::Diameter => self.diameter(vertices),
            Metric::Closeness(i) => self.closeness(i, vertices),
            Metric::Betweenness(i) => self.betweenness(i, vertices),
        }
    }
}

fn minimal(records: BTreeSet<PathRecord>) -> BTreeSet<PathRecord> {
    let Some(min) = records.iter().map(PathRecord::edge_length).min() else {
        return records;
    };
    records.into_iter().filter(|r| r.edge_length() == min).collect()
}

/// Every `(j, k)` with `j ≠ k`, sorted.
pub fn ordered_pairs(vertices: &BTreeSet<Resource>) -> Vec<(Resource, Resource)> {
    vertices
        .iter()
        .flat_map(|j| vertices.iter().filter(move |k| *k != j).map(move |k| (j.clone(), k.clone())))
        .collect()
}

// The aggregations below are shared with the encoded-store evaluation so
// both routes produce bit-identical values.

pub(crate) fn shortest_result(s: Shortest) -> MetricResult {
    let value = s.length().map_or(MetricValue::Undefined, |n| MetricValue::Natural(n as u64));
    let mut r = MetricResult::new(MetricKind::ShortestPath, value);
    r.witness_paths = s.paths;
    r
}

pub(crate) fn eccentricity_of(distances: &[Option<usize>]) -> MetricResult {
    let skipped = distances.iter().filter(|d| d.is_none()).count();
    let value = distances
        .iter()
        .flatten()
        .max()
        .map_or(MetricValue::Undefined, |&d| MetricValue::Natural(d as u64));
    MetricResult::new(MetricKind::Eccentricity, value).skipping(skipped)
}

pub(crate) fn extremum(kind: MetricKind, eccentricities: &[Option<u64>]) -> MetricResult {
    let skipped = eccentricities.iter().filter(|e| e.is_none()).count();
    let defined = eccentricities.iter().flatten().copied();
    let value = match kind {
        MetricKind::Radius => defined.min(),
        _ => defined.max(),
    };
    MetricResult::new(kind, value.map_or(MetricValue::Undefined, MetricValue::Natural)).skipping(skipped)
}

pub(crate) fn closeness_of(distances: &[Option<usize>]) -> MetricResult {
    let skipped = distances.iter().filter(|d| d.is_none()).count();
    let sum: usize = distances.iter().flatten().sum();
    let value = if sum == 0 {
        MetricValue::Undefined
    } else {
        MetricValue::Real(1.0 / sum as f64)
    };
    MetricResult::new(MetricKind::Closeness, value).skipping(skipped)
}

/// `counts` holds `(|σ̂(j,k,i)|, |σ(j,k)|)` per ordered pair, in pair order.
pub(crate) fn betweenness_of(counts: &[(usize, usize)]) -> MetricResult {
    let mut b = 0.0;
    let mut skipped = 0;
    for &(through, total) in counts {
        if total == 0 {
            skipped += 1;
        } else {
            b += through as f64 / total as f64;
        }
    }
    MetricResult::new(MetricKind::Betweenness, MetricValue::Real(b)).skipping(skipped)
}

/// `s(i, j)` for the grammar's own endpoints.
pub fn shortest_path(graph: &Graph, grammar: &Grammar, max_steps: usize) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default().with_max_steps(max_steps))?.shortest_path()
}

pub fn eccentricity(
    graph: &Graph,
    grammar: &Grammar,
    i: &Resource,
    targets: &BTreeSet<Resource>,
) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default())?.eccentricity(i, targets)
}

pub fn radius(graph: &Graph, grammar: &Grammar, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default())?.radius(vertices)
}

pub fn diameter(graph: &Graph, grammar: &Grammar, vertices: &BTreeSet<Resource>) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default())?.diameter(vertices)
}

pub fn closeness(
    graph: &Graph,
    grammar: &Grammar,
    i: &Resource,
    targets: &BTreeSet<Resource>,
) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default())?.closeness(i, targets)
}

pub fn betweenness(
    graph: &Graph,
    grammar: &Grammar,
    i: &Resource,
    vertices: &BTreeSet<Resource>,
) -> Result<MetricResult, EngineError> {
    Geodesics::new(graph, grammar, EngineConfig::default())?.betweenness(i, vertices)
}
