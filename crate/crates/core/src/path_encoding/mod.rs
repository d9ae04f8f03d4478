//! Walkers and their recorded paths as triples, and metrics recomputed from
//! those triples alone.
//!
//! A record becomes a walker node linked to the grammar it ran and to a path
//! node. The path lists one segment per time step under `rdf:_1 … rdf:_k`:
//!
//! ```text
//! rwrx:Walker_1  rdf:type rwr:GeodesicWalker ; rwr:usesGrammar g ; rwr:hasQPath rwrx:Path_1 .
//! rwrx:Path_1    rdf:type rwr:Path ; rdf:_1 rwrx:Segment_1_1 ; rdf:_2 rwrx:Segment_1_2 .
//! rwrx:Segment_1_2 rwr:hasVertex v ; rwr:hasPredicate p ; rwr:hasDirection "+" .
//! ```
//!
//! Stores that answer metric queries also record which `(i, j)` bindings they
//! hold. A grammar run on its own endpoints marks the grammar node with
//! `rwr:entryResource` and `rwr:exitResource`. A run on rebound endpoints gets
//! its own `rwr:BoundGrammar` node, linked back by `rwr:instanceOf`.

mod query;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{Direction, Engine, EngineError, PathRecord, PathStep, RunMode, Via};
use crate::triple_store::{Graph, GraphBuilder, Resource, Triple, TriplePattern};
use crate::vocab;

pub use query::{min_segments, ms_shortest_paths, p_encoded_metric, query_x, query_y, PathPosition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("the store holds no paths for {} required pair(s), e.g. ({}, {})", missing.len(), missing[0].0, missing[0].1)]
    IncompleteStore { missing: Vec<(Resource, Resource)> },
    #[error("malformed encoded path at {node}: {message}")]
    Malformed { node: Resource, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// The fixed IRIs of the encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPathVocabulary {
    pub geodesic_walker: Resource,
    pub uses_grammar: Resource,
    pub has_q_path: Resource,
    pub path: Resource,
    pub segment: Resource,
    pub has_vertex: Resource,
    pub has_predicate: Resource,
    pub has_direction: Resource,
    pub bound_grammar: Resource,
    pub instance_of: Resource,
    pub entry_resource: Resource,
    pub exit_resource: Resource,
}

impl Default for EncodedPathVocabulary {
    fn default() -> Self {
        let rwr = |local: &str| Resource::iri(vocab::rwr(local));
        Self {
            geodesic_walker: rwr("GeodesicWalker"),
            uses_grammar: rwr("usesGrammar"),
            has_q_path: rwr("hasQPath"),
            path: rwr("Path"),
            segment: rwr("Segment"),
            has_vertex: rwr("hasVertex"),
            has_predicate: rwr("hasPredicate"),
            has_direction: rwr("hasDirection"),
            bound_grammar: rwr("BoundGrammar"),
            instance_of: rwr("instanceOf"),
            entry_resource: rwr("entryResource"),
            exit_resource: rwr("exitResource"),
        }
    }
}

impl EncodedPathVocabulary {
    pub fn direction(&self, d: Direction) -> Resource {
        Resource::string_literal(d.symbol())
    }
}

fn rdf_type() -> Resource {
    Resource::iri(vocab::RDF_TYPE)
}

fn member(k: usize) -> Resource {
    Resource::iri(vocab::rdf_member(k))
}

/// Mints node IRIs under a result namespace and writes records as triples.
#[derive(Debug, Clone)]
pub struct PathEncoder {
    pub vocabulary: EncodedPathVocabulary,
    namespace: String,
}

impl Default for PathEncoder {
    fn default() -> Self {
        Self::new(vocab::RWRX)
    }
}

impl PathEncoder {
    pub fn new(namespace: impl Into<String>) -> Self {
        Self {
            vocabulary: EncodedPathVocabulary::default(),
            namespace: namespace.into(),
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn walker_node(&self, id: u64) -> Resource {
        Resource::iri(format!("{}Walker_{id}", self.namespace))
    }

    pub fn path_node(&self, id: u64) -> Resource {
        Resource::iri(format!("{}Path_{id}", self.namespace))
    }

    pub fn segment_node(&self, id: u64, k: usize) -> Resource {
        Resource::iri(format!("{}Segment_{id}_{k}", self.namespace))
    }

    pub fn binding_node(&self, n: u64) -> Resource {
        Resource::iri(format!("{}Binding_{n}", self.namespace))
    }

    fn record_triples(&self, grammar: &Resource, id: u64, record: &PathRecord) -> Vec<Triple> {
        let v = &self.vocabulary;
        let walker = self.walker_node(id);
        let path = self.path_node(id);
        let mut out = vec![
            Triple::new(walker.clone(), rdf_type(), v.geodesic_walker.clone()),
            Triple::new(walker.clone(), v.uses_grammar.clone(), grammar.clone()),
            Triple::new(walker, v.has_q_path.clone(), path.clone()),
            Triple::new(path.clone(), rdf_type(), v.path.clone()),
        ];
        for (k, step) in record.steps.iter().enumerate() {
            let seg = self.segment_node(id, k + 1);
            out.push(Triple::new(path.clone(), member(k + 1), seg.clone()));
            out.push(Triple::new(seg.clone(), rdf_type(), v.segment.clone()));
            out.push(Triple::new(seg.clone(), v.has_vertex.clone(), step.vertex.clone()));
            if let Some(via) = &step.via {
                out.push(Triple::new(seg.clone(), v.has_predicate.clone(), via.predicate.clone()));
                out.push(Triple::new(seg, v.has_direction.clone(), v.direction(via.direction)));
            }
        }
        out
    }

    /// One walker per record, numbered by the matching entry of `walker_ids`.
    ///
    /// Panics if the two lengths differ.
    pub fn encode_paths(&self, q: &BTreeSet<PathRecord>, grammar_id: &Resource, walker_ids: &[u64]) -> Graph {
        assert_eq!(q.len(), walker_ids.len(), "one walker id per record");
        let mut store = StoreBuilder::with_encoder(self.clone());
        for (record, &id) in q.iter().zip(walker_ids) {
            store.insert_all(self.record_triples(grammar_id, id, record));
        }
        store.build()
    }
}

/// [`PathEncoder::encode_paths`] under the default namespace.
pub fn encode_paths(q: &BTreeSet<PathRecord>, grammar_id: &Resource, walker_ids: &[u64]) -> Graph {
    PathEncoder::default().encode_paths(q, grammar_id, walker_ids)
}

/// Accumulates encoded runs, keeping walker numbers unique across runs.
#[derive(Debug)]
pub struct StoreBuilder {
    encoder: PathEncoder,
    builder: GraphBuilder,
    next_walker: u64,
    next_binding: u64,
}

impl Default for StoreBuilder {
    fn default() -> Self {
        Self::with_encoder(PathEncoder::default())
    }
}

impl StoreBuilder {
    pub fn with_encoder(encoder: PathEncoder) -> Self {
        let mut builder = Graph::builder();
        let prefixes = builder.prefixes_mut();
        for (p, ns) in vocab::default_prefixes() {
            prefixes.insert(p, ns);
        }
        if encoder.namespace != vocab::RWRX {
            prefixes.insert("paths", encoder.namespace.clone());
        }
        Self {
            encoder,
            builder,
            next_walker: 0,
            next_binding: 0,
        }
    }

    fn insert_all(&mut self, triples: Vec<Triple>) {
        for t in triples {
            self.builder.insert(t).expect("encoded triples are valid");
        }
    }

    fn add_walkers(&mut self, grammar_node: &Resource, walkers: &[(u64, PathRecord)]) {
        let offset = self.next_walker;
        for (id, record) in walkers {
            let triples = self.encoder.record_triples(grammar_node, offset + id, record);
            self.insert_all(triples);
            self.next_walker = self.next_walker.max(offset + id + 1);
        }
    }

    fn mark(&mut self, node: &Resource, i: &Resource, j: &Resource) {
        let v = self.encoder.vocabulary.clone();
        self.insert_all(vec![
            Triple::new(node.clone(), v.entry_resource, i.clone()),
            Triple::new(node.clone(), v.exit_resource, j.clone()),
        ]);
    }

    /// Records of the grammar run on its own endpoints `(i, j)`. Walker ids
    /// keep their engine numbering, shifted past any earlier run.
    pub fn add_own_run(&mut self, grammar_id: &Resource, i: &Resource, j: &Resource, walkers: &[(u64, PathRecord)]) {
        self.mark(grammar_id, i, j);
        self.add_walkers(grammar_id, walkers);
    }

    /// Records of the grammar rebound to `(i, j)`, under a fresh binding node.
    pub fn add_bound_run(&mut self, grammar_id: &Resource, i: &Resource, j: &Resource, records: &BTreeSet<PathRecord>) {
        let node = self.encoder.binding_node(self.next_binding);
        self.next_binding += 1;
        let v = self.encoder.vocabulary.clone();
        self.insert_all(vec![
            Triple::new(node.clone(), rdf_type(), v.bound_grammar),
            Triple::new(node.clone(), v.instance_of, grammar_id.clone()),
        ]);
        self.mark(&node, i, j);
        let walkers: Vec<(u64, PathRecord)> = records.iter().cloned().enumerate().map(|(k, r)| (k as u64, r)).collect();
        self.add_walkers(&node, &walkers);
    }

    pub fn build(self) -> Graph {
        self.builder.build()
    }
}

/// Runs `engine`'s grammar in AllPaths mode for every ordered pair of
/// `vertices` and encodes each pair as a bound run.
pub fn encode_all_pairs(
    engine: &Engine<'_>,
    grammar_id: &Resource,
    vertices: &BTreeSet<Resource>,
) -> Result<Graph, EncodingError> {
    encode_all_pairs_with(engine, PathEncoder::default(), grammar_id, vertices)
}

/// [`encode_all_pairs`] with the node names of `encoder`.
pub fn encode_all_pairs_with(
    engine: &Engine<'_>,
    encoder: PathEncoder,
    grammar_id: &Resource,
    vertices: &BTreeSet<Resource>,
) -> Result<Graph, EncodingError> {
    let engine = engine.clone().with_mode(RunMode::AllPaths);
    let sources: Vec<&Resource> = vertices.iter().collect();
    let row = |i: &&Resource| -> Result<Vec<(Resource, BTreeSet<PathRecord>)>, EngineError> {
        let targets: Vec<Resource> = vertices.iter().filter(|j| j != i).cloned().collect();
        let q = if engine.graph().contains_resource(i) {
            engine.run_to_targets(i, &targets)?
        } else {
            vec![BTreeSet::new(); targets.len()]
        };
        Ok(targets.into_iter().zip(q).collect())
    };
    let rows: Vec<_> = match engine.pool() {
        Some(pool) => pool.install(|| sources.par_iter().map(row).collect::<Result<_, _>>()),
        None => sources.iter().map(row).collect::<Result<_, _>>(),
    }?;
    let mut store = StoreBuilder::with_encoder(encoder);
    for (i, row) in sources.iter().zip(rows) {
        for (j, records) in row {
            store.add_bound_run(grammar_id, i, &j, &records);
        }
    }
    Ok(store.build())
}

fn object(store: &Graph, s: &Resource, p: &Resource) -> Option<Resource> {
    store
        .matching(&TriplePattern::new(Some(s.clone()), Some(p.clone()), None))
        .into_iter()
        .next()
        .map(|t| t.object)
}

fn objects(store: &Graph, s: &Resource, p: &Resource) -> BTreeSet<Resource> {
    store
        .matching(&TriplePattern::new(Some(s.clone()), Some(p.clone()), None))
        .into_iter()
        .map(|t| t.object)
        .collect()
}

fn subjects(store: &Graph, p: &Resource, o: &Resource) -> BTreeSet<Resource> {
    store
        .matching(&TriplePattern::new(None, Some(p.clone()), Some(o.clone())))
        .into_iter()
        .map(|t| t.subject)
        .collect()
}

/// Segments of a path node by membership index.
fn segments(store: &Graph, path: &Resource) -> BTreeMap<usize, Resource> {
    store
        .matching(&TriplePattern::new(Some(path.clone()), None, None))
        .into_iter()
        .filter_map(|t| {
            let k = vocab::member_index(t.predicate.as_iri()?)?;
            Some((k, t.object))
        })
        .collect()
}

/// The record behind one path node.
pub fn decode_path(store: &Graph, path: &Resource) -> Result<PathRecord, EncodingError> {
    let v = EncodedPathVocabulary::default();
    let malformed = |node: &Resource, message: &str| EncodingError::Malformed {
        node: node.clone(),
        message: message.to_string(),
    };
    let segs = segments(store, path);
    let mut steps = Vec::with_capacity(segs.len());
    for (expected, (k, seg)) in (1..).zip(&segs) {
        if *k != expected {
            return Err(malformed(path, &format!("membership rdf:_{expected} is missing")));
        }
        let vertex = object(store, seg, &v.has_vertex).ok_or_else(|| malformed(seg, "segment without a vertex"))?;
        let predicate = object(store, seg, &v.has_predicate);
        let direction = object(store, seg, &v.has_direction);
        let via = match (k, predicate, direction) {
            (1, None, None) => None,
            (1, _, _) => return Err(malformed(seg, "first segment carries an edge")),
            (_, Some(predicate), Some(d)) => {
                let direction = Direction::from_symbol(d.local_name())
                    .filter(|_| d.is_literal())
                    .ok_or_else(|| malformed(seg, "direction must be \"+\" or \"-\""))?;
                Some(Via { predicate, direction })
            }
            _ => return Err(malformed(seg, "segment needs both a predicate and a direction")),
        };
        steps.push(PathStep { vertex, via });
    }
    if steps.is_empty() {
        return Err(malformed(path, "path has no segments"));
    }
    Ok(PathRecord::new(steps))
}

/// Every encoded walker with its grammar node and record.
pub fn decode_walkers(store: &Graph) -> Result<BTreeMap<Resource, (Resource, PathRecord)>, EncodingError> {
    let v = EncodedPathVocabulary::default();
    let mut out = BTreeMap::new();
    for walker in subjects(store, &rdf_type(), &v.geodesic_walker) {
        let grammar = object(store, &walker, &v.uses_grammar).ok_or_else(|| EncodingError::Malformed {
            node: walker.clone(),
            message: "walker without a grammar".into(),
        })?;
        let path = object(store, &walker, &v.has_q_path).ok_or_else(|| EncodingError::Malformed {
            node: walker.clone(),
            message: "walker without a path".into(),
        })?;
        out.insert(walker, (grammar, decode_path(store, &path)?));
    }
    Ok(out)
}

/// The set of records in `store`, whatever walkers carry them.
pub fn decode_paths(store: &Graph) -> Result<BTreeSet<PathRecord>, EncodingError> {
    Ok(decode_walkers(store)?.into_values().map(|(_, r)| r).collect())
}
