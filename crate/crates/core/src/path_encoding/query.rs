//! Conjunctive queries over an encoded store and the metrics built on them.

use std::collections::BTreeSet;

use super::{decode_path, objects, segments, subjects, EncodedPathVocabulary, EncodingError};
use crate::geodesics::{
    betweenness_of, closeness_of, eccentricity_of, extremum, ordered_pairs, shortest_result, Metric, MetricKind,
    MetricResult, Shortest,
};
use crate::triple_store::{Graph, Resource};

/// A path node and a membership index on it.
pub type PathPosition = (Resource, usize);

fn rdf_type() -> Resource {
    Resource::iri(crate::vocab::RDF_TYPE)
}

/// Grammar nodes whose walkers answer `(i, j)`: bindings of `grammar_id` to
/// that pair, and `grammar_id` itself when it is marked with that pair or not
/// marked at all.
fn grammar_nodes(store: &Graph, grammar_id: &Resource, i: &Resource, j: &Resource) -> Vec<Resource> {
    let v = EncodedPathVocabulary::default();
    let mut out = Vec::new();
    let mut candidates = vec![grammar_id.clone()];
    candidates.extend(subjects(store, &v.instance_of, grammar_id));
    for g in candidates {
        let entries = objects(store, &g, &v.entry_resource);
        let exits = objects(store, &g, &v.exit_resource);
        let unmarked = &g == grammar_id && entries.is_empty() && exits.is_empty();
        if unmarked || (entries.contains(i) && exits.contains(j)) {
            out.push(g);
        }
    }
    out
}

/// Whether the store records a run of `grammar_id` bound to `(i, j)`,
/// even one that found no paths.
fn covers(store: &Graph, grammar_id: &Resource, i: &Resource, j: &Resource) -> bool {
    let v = EncodedPathVocabulary::default();
    let mut candidates = vec![grammar_id.clone()];
    candidates.extend(subjects(store, &v.instance_of, grammar_id));
    candidates.iter().any(|g| {
        objects(store, g, &v.entry_resource).contains(i) && objects(store, g, &v.exit_resource).contains(j)
    })
}

/// `X_{i,j}`: paths of walkers running `grammar_id` whose `rdf:_1` segment
/// has vertex `i` and whose last segment, at `rdf:_n`, has vertex `j`; each
/// as `(path, n)`.
pub fn query_x(store: &Graph, i: &Resource, j: &Resource, grammar_id: &Resource) -> BTreeSet<PathPosition> {
    let v = EncodedPathVocabulary::default();
    let mut out = BTreeSet::new();
    for g in grammar_nodes(store, grammar_id, i, j) {
        for walker in subjects(store, &v.uses_grammar, &g) {
            if !objects(store, &walker, &rdf_type()).contains(&v.geodesic_walker) {
                continue;
            }
            for path in objects(store, &walker, &v.has_q_path) {
                let segs = segments(store, &path);
                let starts = segs
                    .get(&1)
                    .is_some_and(|s| objects(store, s, &v.has_vertex).contains(i));
                let Some((&n, last)) = segs.iter().next_back() else {
                    continue;
                };
                if starts && objects(store, last, &v.has_vertex).contains(j) {
                    out.insert((path, n));
                }
            }
        }
    }
    out
}

/// Smallest position in `x`; `None` when `x` is empty.
pub fn min_segments(x: &BTreeSet<PathPosition>) -> Option<usize> {
    x.iter().map(|(_, n)| *n).min()
}

/// Paths sitting at the smallest position of `x`.
pub fn ms_shortest_paths(x: &BTreeSet<PathPosition>) -> BTreeSet<Resource> {
    match min_segments(x) {
        None => BTreeSet::new(),
        Some(min) => x.iter().filter(|(_, n)| *n == min).map(|(p, _)| p.clone()).collect(),
    }
}

/// `Y_{j,k,i}`: shortest paths from `j` to `k` with `i` at a position before
/// the one `k` occupies.
pub fn query_y(store: &Graph, j: &Resource, k: &Resource, i: &Resource, grammar_id: &Resource) -> BTreeSet<Resource> {
    let v = EncodedPathVocabulary::default();
    let x = query_x(store, j, k, grammar_id);
    let Some(min) = min_segments(&x) else {
        return BTreeSet::new();
    };
    x.into_iter()
        .filter(|(_, n)| *n == min)
        .filter(|(path, n)| {
            segments(store, path)
                .iter()
                .any(|(m, seg)| m < n && objects(store, seg, &v.has_vertex).contains(i))
        })
        .map(|(path, _)| path)
        .collect()
}

fn distance(store: &Graph, grammar_id: &Resource, i: &Resource, j: &Resource) -> Option<usize> {
    min_segments(&query_x(store, i, j, grammar_id)).map(|n| n - 1)
}

fn required_pairs(metric: &Metric, vertices: &BTreeSet<Resource>) -> Vec<(Resource, Resource)> {
    let from = |i: &Resource| -> Vec<(Resource, Resource)> {
        vertices.iter().filter(|j| *j != i).map(|j| (i.clone(), j.clone())).collect()
    };
    match metric {
        Metric::ShortestPath { from, to } => vec![(from.clone(), to.clone())],
        Metric::Eccentricity(i) | Metric::Closeness(i) => from(i),
        Metric::Radius | Metric::Diameter => ordered_pairs(vertices),
        Metric::Betweenness(i) => {
            let rest: BTreeSet<Resource> = vertices.iter().filter(|v| *v != i).cloned().collect();
            ordered_pairs(&rest)
        }
    }
}

/// Evaluates `metric` over `vertices` using only queries against `store`.
pub fn p_encoded_metric(
    metric: &Metric,
    store: &Graph,
    grammar_id: &Resource,
    vertices: &BTreeSet<Resource>,
) -> Result<MetricResult, EncodingError> {
    let missing: Vec<(Resource, Resource)> = required_pairs(metric, vertices)
        .into_iter()
        .filter(|(i, j)| !covers(store, grammar_id, i, j))
        .collect();
    if !missing.is_empty() {
        return Err(EncodingError::IncompleteStore { missing });
    }
    let row = |i: &Resource| -> Vec<Option<usize>> {
        vertices
            .iter()
            .filter(|j| *j != i)
            .map(|j| distance(store, grammar_id, i, j))
            .collect()
    };
    Ok(match metric {
        Metric::ShortestPath { from, to } => {
            let x = query_x(store, from, to, grammar_id);
            let paths = ms_shortest_paths(&x)
                .iter()
                .map(|p| decode_path(store, p))
                .collect::<Result<_, _>>()?;
            shortest_result(Shortest { paths })
        }
        Metric::Eccentricity(i) => eccentricity_of(&row(i)),
        Metric::Closeness(i) => closeness_of(&row(i)),
        Metric::Radius | Metric::Diameter => {
            let kind = if *metric == Metric::Radius {
                MetricKind::Radius
            } else {
                MetricKind::Diameter
            };
            let ecc: Vec<Option<u64>> = vertices
                .iter()
                .map(|i| eccentricity_of(&row(i)).value.as_natural())
                .collect();
            extremum(kind, &ecc)
        }
        Metric::Betweenness(i) => {
            let counts: Vec<(usize, usize)> = required_pairs(metric, vertices)
                .iter()
                .map(|(j, k)| {
                    let total = ms_shortest_paths(&query_x(store, j, k, grammar_id)).len();
                    (query_y(store, j, k, i, grammar_id).len(), total)
                })
                .collect();
            betweenness_of(&counts)
        }
    })
}
