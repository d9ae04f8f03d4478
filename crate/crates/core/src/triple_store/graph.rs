use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{PrefixMap, Resource, StoreError};
use crate::vocab;

/// Dense identifier of a resource interned in one [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(index: usize) -> Self {
        TermId(u32::try_from(index).expect("term index fits in u32"))
    }
}

/// A statement `<subject, predicate, object>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Resource,
    pub predicate: Resource,
    pub object: Resource,
}

impl Triple {
    pub fn new(subject: Resource, predicate: Resource, object: Resource) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }

    /// Subject is never a literal; predicate is always an IRI.
    pub fn validate(&self) -> Result<(), String> {
        if self.subject.is_literal() {
            return Err("literal in subject position".into());
        }
        if !self.predicate.is_iri() {
            return Err(if self.predicate.is_literal() {
                "literal in predicate position".into()
            } else {
                "predicate must be an IRI".into()
            });
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple over interned term ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdTriple {
    pub s: TermId,
    pub p: TermId,
    pub o: TermId,
}

/// A triple pattern; `None` positions match anything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Option<Resource>,
    pub predicate: Option<Resource>,
    pub object: Option<Resource>,
}

impl TriplePattern {
    pub fn new(
        subject: Option<Resource>,
        predicate: Option<Resource>,
        object: Option<Resource>,
    ) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }
}

/// How `rdfs:subPropertyOf` / `rdfs:subClassOf` are consulted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subsumption {
    /// Reflexive-transitive closure, precomputed when the graph is built.
    #[default]
    Closure,
    /// A single direct subsumption triple (or equality).
    SingleHop,
}

/// Accumulates triples; [`GraphBuilder::build`] freezes them into a [`Graph`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    prefixes: PrefixMap,
    terms: Vec<Resource>,
    ids: HashMap<Resource, TermId>,
    triples: HashSet<IdTriple>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self {
            prefixes: PrefixMap::with_defaults(),
            ..Default::default()
        }
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    fn intern(&mut self, r: Resource) -> TermId {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        let id = TermId(u32::try_from(self.terms.len()).expect("term table overflow"));
        self.terms.push(r.clone());
        self.ids.insert(r, id);
        id
    }

    /// Returns whether the triple was new.
    pub fn insert(&mut self, triple: Triple) -> Result<bool, StoreError> {
        triple.validate().map_err(|reason| StoreError::Validation {
            line: None,
            reason,
        })?;
        let s = self.intern(triple.subject);
        let p = self.intern(triple.predicate);
        let o = self.intern(triple.object);
        Ok(self.triples.insert(IdTriple { s, p, o }))
    }

    pub fn add(&mut self, s: Resource, p: Resource, o: Resource) -> Result<bool, StoreError> {
        self.insert(Triple::new(s, p, o))
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn extend_from(&mut self, graph: &Graph) {
        self.prefixes.extend(graph.prefixes());
        for t in graph.triples() {
            // Triples coming from a graph are already valid.
            let _ = self.insert(t);
        }
    }

    pub fn build(self) -> Graph {
        self.build_with(Subsumption::default())
    }

    pub fn build_with(self, subsumption: Subsumption) -> Graph {
        let GraphBuilder {
            prefixes,
            terms,
            ids,
            triples,
        } = self;
        let mut spo: Vec<IdTriple> = triples.into_iter().collect();
        spo.sort_unstable_by_key(|t| (t.s, t.p, t.o));
        let mut pos = spo.clone();
        pos.sort_unstable_by_key(|t| (t.p, t.o, t.s));
        let mut osp = spo.clone();
        osp.sort_unstable_by_key(|t| (t.o, t.s, t.p));

        let lookup = |iri: &str| ids.get(&Resource::Iri(iri.to_string())).copied();
        let well_known = WellKnown {
            rdf_type: lookup(vocab::RDF_TYPE),
            sub_property_of: lookup(vocab::RDFS_SUBPROPERTY_OF),
            sub_class_of: lookup(vocab::RDFS_SUBCLASS_OF),
            rdfs_resource: lookup(vocab::RDFS_RESOURCE),
        };
        let super_properties = well_known
            .sub_property_of
            .map(|p| ancestor_closure(&pos, p))
            .unwrap_or_default();
        let super_classes = well_known
            .sub_class_of
            .map(|p| ancestor_closure(&pos, p))
            .unwrap_or_default();

        Graph {
            prefixes,
            terms,
            ids,
            spo,
            pos,
            osp,
            subsumption,
            well_known,
            super_properties,
            super_classes,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct WellKnown {
    rdf_type: Option<TermId>,
    sub_property_of: Option<TermId>,
    sub_class_of: Option<TermId>,
    rdfs_resource: Option<TermId>,
}

/// Strict ancestors of every subject of `predicate`, following it transitively.
fn ancestor_closure(pos: &[IdTriple], predicate: TermId) -> HashMap<TermId, HashSet<TermId>> {
    let edges = &pos[range_by(pos, |t| t.p.cmp(&predicate))];
    let mut parents: HashMap<TermId, Vec<TermId>> = HashMap::new();
    for t in edges {
        parents.entry(t.s).or_default().push(t.o);
    }
    let mut closure = HashMap::with_capacity(parents.len());
    for &start in parents.keys() {
        let mut seen = HashSet::new();
        let mut queue: VecDeque<TermId> = parents[&start].iter().copied().collect();
        while let Some(next) = queue.pop_front() {
            if seen.insert(next) {
                if let Some(ps) = parents.get(&next) {
                    queue.extend(ps.iter().copied());
                }
            }
        }
        closure.insert(start, seen);
    }
    closure
}

/// Contiguous range of a sorted slice whose elements compare `Equal` under `key`.
fn range_by<F>(slice: &[IdTriple], key: F) -> Range<usize>
where
    F: Fn(&IdTriple) -> std::cmp::Ordering,
{
    let start = slice.partition_point(|t| key(t).is_lt());
    let end = slice.partition_point(|t| key(t).is_le());
    start..end
}

/// An immutable, indexed set of triples.
///
/// Three sorted permutations (SPO, POS, OSP) answer every pattern shape with a
/// range scan. Subsumption closures are computed once at build time.
#[derive(Debug, Clone)]
pub struct Graph {
    prefixes: PrefixMap,
    terms: Vec<Resource>,
    ids: HashMap<Resource, TermId>,
    spo: Vec<IdTriple>,
    pos: Vec<IdTriple>,
    osp: Vec<IdTriple>,
    subsumption: Subsumption,
    well_known: WellKnown,
    super_properties: HashMap<TermId, HashSet<TermId>>,
    super_classes: HashMap<TermId, HashSet<TermId>>,
}

impl Default for Graph {
    fn default() -> Self {
        GraphBuilder::new().build()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.triple_set() == other.triple_set()
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Result<Self, StoreError> {
        let mut b = GraphBuilder::new();
        for t in triples {
            b.insert(t)?;
        }
        Ok(b.build())
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn subsumption(&self) -> Subsumption {
        self.subsumption
    }

    pub fn with_subsumption(mut self, subsumption: Subsumption) -> Self {
        self.subsumption = subsumption;
        self
    }

    pub fn term_id(&self, r: &Resource) -> Option<TermId> {
        self.ids.get(r).copied()
    }

    pub fn iri_id(&self, iri: &str) -> Option<TermId> {
        self.term_id(&Resource::Iri(iri.to_string()))
    }

    /// Number of interned terms; every [`TermId`] indexes below it.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn resource(&self, id: TermId) -> &Resource {
        &self.terms[id.index()]
    }

    pub fn resolve(&self, t: IdTriple) -> Triple {
        Triple::new(
            self.resource(t.s).clone(),
            self.resource(t.p).clone(),
            self.resource(t.o).clone(),
        )
    }

    /// Whether the resource appears in any triple.
    pub fn contains_resource(&self, r: &Resource) -> bool {
        self.term_id(r).is_some()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        match (
            self.term_id(&t.subject),
            self.term_id(&t.predicate),
            self.term_id(&t.object),
        ) {
            (Some(s), Some(p), Some(o)) => self.match_ids(Some(s), Some(p), Some(o)).next().is_some(),
            _ => false,
        }
    }

    /// All triples in SPO order.
    pub fn id_triples(&self) -> &[IdTriple] {
        &self.spo
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&t| self.resolve(t))
    }

    pub fn triple_set(&self) -> BTreeSet<Triple> {
        self.triples().collect()
    }

    /// Pattern match over ids, served by whichever permutation fits the bound
    /// positions.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> impl Iterator<Item = IdTriple> + '_ {
        let (slice, range): (&[IdTriple], Range<usize>) = match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                (&self.spo, range_by(&self.spo, |t| (t.s, t.p, t.o).cmp(&(s, p, o))))
            }
            (Some(s), Some(p), None) => (&self.spo, range_by(&self.spo, |t| (t.s, t.p).cmp(&(s, p)))),
            (Some(s), None, Some(o)) => (&self.osp, range_by(&self.osp, |t| (t.o, t.s).cmp(&(o, s)))),
            (Some(s), None, None) => (&self.spo, range_by(&self.spo, |t| t.s.cmp(&s))),
            (None, Some(p), Some(o)) => (&self.pos, range_by(&self.pos, |t| (t.p, t.o).cmp(&(p, o)))),
            (None, Some(p), None) => (&self.pos, range_by(&self.pos, |t| t.p.cmp(&p))),
            (None, None, Some(o)) => (&self.osp, range_by(&self.osp, |t| t.o.cmp(&o))),
            (None, None, None) => (&self.spo, 0..self.spo.len()),
        };
        slice[range].iter().copied()
    }

    pub fn outgoing(&self, a: TermId) -> impl Iterator<Item = IdTriple> + '_ {
        self.match_ids(Some(a), None, None)
    }

    pub fn incoming(&self, a: TermId) -> impl Iterator<Item = IdTriple> + '_ {
        self.match_ids(None, None, Some(a))
    }

    /// Resource-level pattern match. A bound resource the graph has never
    /// seen matches nothing.
    pub fn matching(&self, pattern: &TriplePattern) -> BTreeSet<Triple> {
        let bind = |r: &Option<Resource>| match r {
            None => Ok(None),
            Some(r) => self.term_id(r).map(Some).ok_or(()),
        };
        match (bind(&pattern.subject), bind(&pattern.predicate), bind(&pattern.object)) {
            (Ok(s), Ok(p), Ok(o)) => self.match_ids(s, p, o).map(|t| self.resolve(t)).collect(),
            _ => BTreeSet::new(),
        }
    }

    /// `ω = w`, or `ω` reaches `w` through `rdfs:subPropertyOf`.
    pub fn is_subproperty_or_equal(&self, omega: &Resource, w: &Resource) -> bool {
        if omega == w {
            return true;
        }
        match (self.term_id(omega), self.term_id(w)) {
            (Some(a), Some(b)) => self.subproperty_or_equal_id(a, b),
            _ => false,
        }
    }

    pub fn subproperty_or_equal_id(&self, omega: TermId, w: TermId) -> bool {
        if omega == w {
            return true;
        }
        match self.subsumption {
            Subsumption::Closure => self
                .super_properties
                .get(&omega)
                .is_some_and(|ancestors| ancestors.contains(&w)),
            Subsumption::SingleHop => self
                .well_known
                .sub_property_of
                .is_some_and(|sp| self.match_ids(Some(omega), Some(sp), Some(w)).next().is_some()),
        }
    }

    /// `b = z`, or `b` has a type that is (or is subsumed by) `z`. Every
    /// resource is an instance of `rdfs:Resource`.
    pub fn has_type_or_equal(&self, b: &Resource, z: &Resource) -> bool {
        if b == z || z.as_iri() == Some(vocab::RDFS_RESOURCE) {
            return true;
        }
        match (self.term_id(b), self.term_id(z)) {
            (Some(b), Some(z)) => self.type_or_equal_id(b, z),
            _ => false,
        }
    }

    pub fn type_or_equal_id(&self, b: TermId, z: TermId) -> bool {
        if b == z || Some(z) == self.well_known.rdfs_resource {
            return true;
        }
        let Some(rdf_type) = self.well_known.rdf_type else {
            return false;
        };
        self.match_ids(Some(b), Some(rdf_type), None).any(|t| {
            t.o == z
                || (self.subsumption == Subsumption::Closure
                    && self
                        .super_classes
                        .get(&t.o)
                        .is_some_and(|ancestors| ancestors.contains(&z)))
        })
    }

    /// Types asserted directly on `r` via `rdf:type`.
    pub fn types_of(&self, r: &Resource) -> BTreeSet<Resource> {
        match (self.term_id(r), self.well_known.rdf_type) {
            (Some(id), Some(t)) => self
                .match_ids(Some(id), Some(t), None)
                .map(|t| self.resource(t.o).clone())
                .collect(),
            _ => BTreeSet::new(),
        }
    }

    /// Distinct predicates in id order.
    pub fn predicates(&self) -> Vec<TermId> {
        let mut out: Vec<TermId> = self.pos.iter().map(|t| t.p).collect();
        out.dedup();
        out
    }

    /// Every resource in subject or object position.
    pub fn nodes(&self) -> BTreeSet<Resource> {
        self.spo
            .iter()
            .flat_map(|t| [t.s, t.o])
            .map(|id| self.resource(id).clone())
            .collect()
    }

    /// Union of both graphs' triples and prefixes.
    pub fn merge(&self, other: &Graph) -> Graph {
        let mut b = GraphBuilder::new();
        b.extend_from(self);
        b.extend_from(other);
        b.build_with(self.subsumption)
    }

    /// One triple per line with full IRIs, in sorted order.
    pub fn to_ntriples(&self) -> String {
        let mut lines: Vec<String> = self.triples().map(|t| t.to_string()).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}
