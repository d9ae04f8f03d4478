//! Degree counts and the unlabeled, undirected view of a graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::triple_store::{Graph, Resource, Triple};
use crate::vocab;

/// Namespaces whose triples are dropped from the projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceFilter {
    excluded: Vec<String>,
}

impl Default for NamespaceFilter {
    /// Excludes the rdf and rdfs namespaces.
    fn default() -> Self {
        Self::excluding([vocab::RDF, vocab::RDFS])
    }
}

impl NamespaceFilter {
    /// Keeps every triple.
    pub fn none() -> Self {
        Self { excluded: Vec::new() }
    }

    pub fn excluding<I, S>(namespaces: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            excluded: namespaces.into_iter().map(Into::into).collect(),
        }
    }

    pub fn namespaces(&self) -> &[String] {
        &self.excluded
    }

    fn excludes_resource(&self, r: &Resource) -> bool {
        r.as_iri()
            .is_some_and(|iri| self.excluded.iter().any(|ns| iri.starts_with(ns.as_str())))
    }

    /// Whether any term of `t` falls in an excluded namespace.
    pub fn excludes(&self, t: &Triple) -> bool {
        [&t.subject, &t.predicate, &t.object]
            .into_iter()
            .any(|r| self.excludes_resource(r))
    }
}

/// The triples of `graph` that survive `filter`, with the same prefixes and
/// subsumption mode.
pub fn project(graph: &Graph, filter: &NamespaceFilter) -> Graph {
    let mut builder = Graph::builder();
    builder.prefixes_mut().extend(graph.prefixes());
    for t in graph.triples().filter(|t| !filter.excludes(t)) {
        builder
            .insert(t)
            .expect("triples of a graph are valid");
    }
    builder.build_with(graph.subsumption())
}

/// `(|Γ⁻(i)|, |Γ⁺(i)|)` over every triple, whatever its predicate.
pub fn degree(graph: &Graph, i: &Resource) -> (usize, usize) {
    match graph.term_id(i) {
        None => (0, 0),
        Some(id) => (graph.incoming(id).count(), graph.outgoing(id).count()),
    }
}

/// [`degree`] counted on the projection.
pub fn degree_projected(graph: &Graph, i: &Resource, filter: &NamespaceFilter) -> (usize, usize) {
    degree(&project(graph, filter), i)
}

/// Vertices of the projection: every subject and object of a kept triple.
pub fn projection_vertices(graph: &Graph, filter: &NamespaceFilter) -> BTreeSet<Resource> {
    graph
        .triples()
        .filter(|t| !filter.excludes(t))
        .flat_map(|t| [t.subject, t.object])
        .collect()
}

/// Undirected adjacency of the projection.
pub fn projection_adjacency(
    graph: &Graph,
    filter: &NamespaceFilter,
) -> BTreeMap<Resource, BTreeSet<Resource>> {
    let mut adj: BTreeMap<Resource, BTreeSet<Resource>> = BTreeMap::new();
    for t in graph.triples().filter(|t| !filter.excludes(t)) {
        adj.entry(t.subject.clone()).or_default().insert(t.object.clone());
        adj.entry(t.object).or_default().insert(t.subject);
    }
    adj
}

/// BFS distances from `i` on the projection.
pub fn unlabeled_distances(graph: &Graph, filter: &NamespaceFilter, i: &Resource) -> BTreeMap<Resource, usize> {
    bfs(&projection_adjacency(graph, filter), i)
}

pub(crate) fn bfs(adj: &BTreeMap<Resource, BTreeSet<Resource>>, i: &Resource) -> BTreeMap<Resource, usize> {
    let mut dist = BTreeMap::from([(i.clone(), 0)]);
    let mut queue = VecDeque::from([i.clone()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for w in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w.clone());
            }
        }
    }
    dist
}

/// Classic BFS distance between `i` and `j` on the undirected, unlabeled
/// projection under the default namespace filter. `None` when disconnected.
pub fn unlabeled_oracle_geodesics(graph: &Graph, i: &Resource, j: &Resource) -> Option<usize> {
    unlabeled_oracle_with(graph, &NamespaceFilter::default(), i, j)
}

pub fn unlabeled_oracle_with(graph: &Graph, filter: &NamespaceFilter, i: &Resource, j: &Resource) -> Option<usize> {
    if i == j {
        return Some(0);
    }
    unlabeled_distances(graph, filter, i).get(j).copied()
}
