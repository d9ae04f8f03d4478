//! Reference implementations that share no code with the engine, plus the
//! random instance generators the property suites draw from.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use geograms_core::engine::{Direction, PathRecord, PathStep};
use geograms_core::grammar::{
    Attribute, ContextKind, EdgeDirection, EdgeSpec, Grammar, GrammarContext, Rule,
};
use geograms_core::triple_store::{Graph, Resource, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const SUB_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const SUB_PROPERTY: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
const RESOURCE: &str = "http://www.w3.org/2000/01/rdf-schema#Resource";

pub fn x(local: &str) -> Resource {
    Resource::iri(format!("http://example.org/r#{local}"))
}

/// Reflexive-transitive closure of one predicate, by repeated relaxation.
fn closure(triples: &BTreeSet<Triple>, predicate: &str) -> BTreeMap<Resource, BTreeSet<Resource>> {
    let mut up: BTreeMap<Resource, BTreeSet<Resource>> = BTreeMap::new();
    for t in triples.iter().filter(|t| t.predicate.as_iri() == Some(predicate)) {
        up.entry(t.subject.clone()).or_default().insert(t.object.clone());
    }
    loop {
        let mut changed = false;
        let keys: Vec<Resource> = up.keys().cloned().collect();
        for k in keys {
            let reach: Vec<Resource> = up[&k]
                .iter()
                .flat_map(|m| up.get(m).cloned().unwrap_or_default())
                .collect();
            let set = up.get_mut(&k).unwrap();
            for r in reach {
                changed |= set.insert(r);
            }
        }
        if !changed {
            return up;
        }
    }
}

/// Exhaustive recursive enumeration over the grammar × graph product.
pub struct Enumerator<'a> {
    grammar: &'a Grammar,
    triples: BTreeSet<Triple>,
    sub_property: BTreeMap<Resource, BTreeSet<Resource>>,
    sub_class: BTreeMap<Resource, BTreeSet<Resource>>,
    types: BTreeMap<Resource, BTreeSet<Resource>>,
    depth_limit: usize,
}

impl<'a> Enumerator<'a> {
    pub fn new(graph: &Graph, grammar: &'a Grammar, depth_limit: usize) -> Self {
        let triples = graph.triple_set();
        let mut types: BTreeMap<Resource, BTreeSet<Resource>> = BTreeMap::new();
        for t in triples.iter().filter(|t| t.predicate.as_iri() == Some(RDF_TYPE)) {
            types.entry(t.subject.clone()).or_default().insert(t.object.clone());
        }
        Self {
            grammar,
            sub_property: closure(&triples, SUB_PROPERTY),
            sub_class: closure(&triples, SUB_CLASS),
            triples,
            types,
            depth_limit,
        }
    }

    fn predicate_matches(&self, omega: &Resource, w: &Resource) -> bool {
        w.as_iri() == Some(RESOURCE)
            || omega == w
            || self.sub_property.get(omega).is_some_and(|s| s.contains(w))
    }

    fn type_matches(&self, b: &Resource, z: &Resource) -> bool {
        if z.as_iri() == Some(RESOURCE) || b == z {
            return true;
        }
        self.types.get(b).is_some_and(|ts| {
            ts.iter()
                .any(|t| t == z || self.sub_class.get(t).is_some_and(|s| s.contains(z)))
        })
    }

    /// `Q` of the grammar with its own endpoints. `Err` on an out-of-range
    /// step or when a branch exceeds the depth limit.
    pub fn run(&self) -> Result<BTreeSet<PathRecord>, String> {
        let seed = self.grammar.source().clone();
        if !self
            .triples
            .iter()
            .any(|t| t.subject == seed || t.predicate == seed || t.object == seed)
        {
            return Err("entry resource not in graph".into());
        }
        let mut out = BTreeSet::new();
        let g = vec![PathStep::start(seed)];
        self.visit(self.grammar.entry(), g, Vec::new(), &mut out)?;
        Ok(out)
    }

    fn visit(
        &self,
        ctx: &GrammarContext,
        g: Vec<PathStep>,
        mut q: Vec<PathStep>,
        out: &mut BTreeSet<PathRecord>,
    ) -> Result<(), String> {
        if g.len() > self.depth_limit {
            return Err("depth limit".into());
        }
        let n = g.len() - 1;
        let here = g[n].vertex.clone();
        let mut moves: BTreeSet<(Triple, Direction, String)> = BTreeSet::new();
        for rule in &ctx.rules {
            match rule {
                Rule::PathCount { step } => {
                    let s = *step as usize;
                    if s > n {
                        return Err(format!("pathcount {s} at time {n}"));
                    }
                    q.push(g[n - s].clone());
                }
                Rule::Traverse { edges } => {
                    for e in edges {
                        self.moves_for(e, &g, &here, &mut moves)?;
                    }
                }
            }
        }
        for (triple, direction, target) in moves {
            let next_ctx = self.grammar.context(&target.as_str().into()).unwrap();
            let b = match direction {
                Direction::Forward => triple.object.clone(),
                Direction::Backward => triple.subject.clone(),
            };
            let mut g2 = g.clone();
            g2.push(PathStep::arrive(b.clone(), triple.predicate.clone(), direction));
            if next_ctx.kind == ContextKind::Exit {
                let mut q2 = q.clone();
                let n2 = g2.len() - 1;
                for rule in &next_ctx.rules {
                    if let Rule::PathCount { step } = rule {
                        let s = *step as usize;
                        if s > n2 {
                            return Err(format!("pathcount {s} at time {n2}"));
                        }
                        q2.push(g2[n2 - s].clone());
                    }
                }
                if q2.first().map(|s| &s.vertex) == Some(&g2[0].vertex)
                    && q2.last().map(|s| &s.vertex) == Some(&b)
                {
                    out.insert(PathRecord::new(q2));
                }
            } else {
                self.visit(next_ctx, g2, q.clone(), out)?;
            }
        }
        Ok(())
    }

    fn moves_for(
        &self,
        e: &EdgeSpec,
        g: &[PathStep],
        here: &Resource,
        moves: &mut BTreeSet<(Triple, Direction, String)>,
    ) -> Result<(), String> {
        let dest = self.grammar.context(&e.far_context).unwrap();
        let next = g.len() as i64;
        let mut pinned = Vec::new();
        let mut banned = Vec::new();
        for a in &dest.attributes {
            let (m, list) = match a {
                Attribute::Is { step } => (*step, &mut pinned),
                Attribute::Not { step } => (*step, &mut banned),
                Attribute::NotEver => continue,
            };
            let pos = next - i64::from(m);
            if pos < 0 || pos >= next {
                return Err(format!("attribute step {m} at position {next}"));
            }
            list.push(g[pos as usize].vertex.clone());
        }
        let not_ever = dest.has_not_ever();
        for t in &self.triples {
            let (from, to, direction) = match e.direction {
                EdgeDirection::Out => (&t.subject, &t.object, Direction::Forward),
                EdgeDirection::In => (&t.object, &t.subject, Direction::Backward),
            };
            if from != here || !self.predicate_matches(&t.predicate, &e.predicate) {
                continue;
            }
            if !self.type_matches(to, &dest.for_resource)
                || (!pinned.is_empty() && !pinned.contains(to))
                || banned.contains(to)
                || (not_ever && g.iter().any(|s| &s.vertex == to))
            {
                continue;
            }
            moves.insert((t.clone(), direction, dest.id.as_str().to_string()));
        }
        Ok(())
    }
}

/// Every shortest edge-labelled path between `j` and `k` in the undirected
/// multigraph whose edges are `triples`, as vertex sequences.
pub fn labelled_shortest_paths(triples: &[Triple], j: &Resource, k: &Resource) -> Vec<Vec<Resource>> {
    let mut adj: BTreeMap<&Resource, Vec<&Resource>> = BTreeMap::new();
    for t in triples {
        adj.entry(&t.subject).or_default().push(&t.object);
        adj.entry(&t.object).or_default().push(&t.subject);
    }
    let mut dist: BTreeMap<&Resource, usize> = BTreeMap::from([(j, 0)]);
    let mut queue = VecDeque::from([j]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(v).into_iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(w, dist[v] + 1);
                queue.push_back(w);
            }
        }
    }
    let Some(&d) = dist.get(k) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut stack = vec![vec![j]];
    while let Some(path) = stack.pop() {
        let v = *path.last().unwrap();
        if path.len() == d + 1 {
            if v == k {
                out.push(path.iter().map(|r| (*r).clone()).collect());
            }
            continue;
        }
        for &w in adj.get(v).into_iter().flatten() {
            if dist.get(w) == Some(&path.len()) {
                let mut p = path.clone();
                p.push(w);
                stack.push(p);
            }
        }
    }
    out
}

/// Reference betweenness: ordered pairs, labelled shortest paths, `i`
/// strictly inside.
pub fn betweenness(triples: &[Triple], i: &Resource, vertices: &BTreeSet<Resource>) -> f64 {
    let mut b = 0.0;
    for j in vertices.iter().filter(|v| *v != i) {
        for k in vertices.iter().filter(|v| *v != i && *v != j) {
            let paths = labelled_shortest_paths(triples, j, k);
            if paths.is_empty() {
                continue;
            }
            let through = paths
                .iter()
                .filter(|p| p.len() > 2 && p[1..p.len() - 1].contains(i))
                .count();
            b += through as f64 / paths.len() as f64;
        }
    }
    b
}

/// Plain BFS distance ignoring labels and direction.
pub fn bfs_distance(triples: &[Triple], j: &Resource, k: &Resource) -> Option<usize> {
    labelled_shortest_paths(triples, j, k).first().map(|p| p.len() - 1)
}

pub fn graph_of(triples: &[Triple]) -> Graph {
    Graph::from_triples(triples.iter().cloned()).unwrap()
}

pub fn edge_graph(edges: &[(&str, &str)]) -> Vec<Triple> {
    edges
        .iter()
        .map(|(a, b)| Triple::new(x(a), x("p"), x(b)))
        .collect()
}

/// A random single-predicate graph: up to `max_vertices` vertices and up to
/// `max_edges` edges.
pub fn random_simple_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Vec<Triple> {
    let n = rng.gen_range(2..=max_vertices);
    let m = rng.gen_range(1..=max_edges);
    let mut out = BTreeSet::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        out.insert(Triple::new(x(&format!("v{a}")), x("p"), x(&format!("v{b}"))));
    }
    out.into_iter().collect()
}

/// A sparse random graph over three predicates, with two classes, some
/// typing and one subproperty and one subclass axiom.
pub fn random_labelled_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> Vec<Triple> {
    let n = rng.gen_range(3..=max_vertices);
    let m = rng.gen_range(n..=2 * n);
    let preds = [x("p0"), x("p1"), x("p2")];
    let mut out = BTreeSet::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let p = preds.choose(rng).unwrap().clone();
        out.insert(Triple::new(x(&format!("v{a}")), p, x(&format!("v{b}"))));
    }
    for v in 0..n {
        if rng.gen_bool(0.4) {
            let class = if rng.gen_bool(0.5) { "T0" } else { "T1" };
            out.insert(Triple::new(x(&format!("v{v}")), Resource::iri(RDF_TYPE), x(class)));
        }
    }
    out.insert(Triple::new(x("p1"), Resource::iri(SUB_PROPERTY), x("p0")));
    out.insert(Triple::new(x("T1"), Resource::iri(SUB_CLASS), x("T0")));
    out.into_iter().collect()
}

/// Vertices that occur in a non-schema triple.
pub fn instance_vertices(triples: &[Triple]) -> Vec<Resource> {
    let set: BTreeSet<Resource> = triples
        .iter()
        .filter(|t| t.predicate.as_iri() != Some(RDF_TYPE) && t.predicate.as_iri() != Some(SUB_CLASS) && t.predicate.as_iri() != Some(SUB_PROPERTY))
        .flat_map(|t| [t.subject.clone(), t.object.clone()])
        .collect();
    set.into_iter().collect()
}

/// A random grammar over `vertices` with 2–5 contexts, `pathcount 0`
/// everywhere, and `notever` on enough contexts that every context cycle
/// passes through one. `is`/`not` steps never exceed the shortest arrival
/// time of their context, so they always resolve.
pub fn random_grammar<R: Rng>(rng: &mut R, triples: &[Triple]) -> Grammar {
    let vertices = instance_vertices(triples);
    let k = rng.gen_range(2..=5);
    let entry_vertex = vertices.choose(rng).unwrap().clone();
    // Exit vertices are drawn near the entry so that paths are common.
    let near: Vec<Resource> = bfs_all(triples, &entry_vertex)
        .into_iter()
        .filter(|(v, d)| (1..=k + 1).contains(d) && vertices.contains(v))
        .map(|(v, _)| v)
        .collect();
    let preds = [x("p0"), x("p1"), x("p2"), Resource::iri(RESOURCE)];
    let name = |c: usize| format!("c{c}");
    let pick_vertex = |rng: &mut R| vertices.choose(rng).unwrap().clone();


    // edges[c] = (direction, predicate, target)
    let mut edges: Vec<Vec<(EdgeDirection, Resource, usize)>> = vec![Vec::new(); k];
    let edge = |rng: &mut R, target: usize| {
        let d = if rng.gen_bool(0.5) { EdgeDirection::Out } else { EdgeDirection::In };
        let p = if rng.gen_bool(0.4) { preds[3].clone() } else { preds[..3].choose(rng).unwrap().clone() };
        (d, p, target)
    };
    for (c, out) in edges.iter_mut().enumerate().take(k - 1) {
        out.push(edge(rng, c + 1));
        for _ in 0..rng.gen_range(0..=2) {
            let t = rng.gen_range(0..k);
            if t == c && c == 0 {
                continue;
            }
            out.push(edge(rng, t));
        }
    }

    // notever until the notever-free part of the context graph is acyclic.
    let mut not_ever = vec![false; k];
    not_ever[k - 1] = rng.gen_bool(0.5);
    for flag in &mut not_ever[1..k - 1] {
        *flag = rng.gen_bool(0.3);
    }
    while let Some(cycle) = find_cycle(&edges, &not_ever) {
        let c = *cycle.iter().find(|&&c| c != 0).expect("entry self-loops are never generated");
        not_ever[c] = true;
    }

    // Shortest arrival time per context.
    let mut dist = vec![usize::MAX; k];
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(c) = queue.pop_front() {
        for &(_, _, t) in &edges[c] {
            if dist[t] == usize::MAX {
                dist[t] = dist[c] + 1;
                queue.push_back(t);
            }
        }
    }

    let mut contexts = Vec::new();
    for c in 0..k {
        let (kind, resource) = if c == 0 {
            (ContextKind::Entry, entry_vertex.clone())
        } else if c == k - 1 {
            let r = match rng.gen_range(0..10) {
                0..=2 => Resource::iri(RESOURCE),
                3 => x("T0"),
                _ => near.choose(rng).cloned().unwrap_or_else(|| pick_vertex(rng)),
            };
            (ContextKind::Exit, r)
        } else {
            let r = match rng.gen_range(0..10) {
                0..=5 => Resource::iri(RESOURCE),
                6 => x("T0"),
                7 => x("T1"),
                _ => pick_vertex(rng),
            };
            (ContextKind::Intermediate, r)
        };
        let mut ctx = GrammarContext::new(name(c), kind, resource).with_rule(Rule::path_count(0));
        if !edges[c].is_empty() && c != k - 1 {
            ctx = ctx.with_rule(Rule::traverse(edges[c].iter().map(|(d, p, t)| match d {
                EdgeDirection::Out => EdgeSpec::out(p.clone(), name(*t)),
                EdgeDirection::In => EdgeSpec::incoming(p.clone(), name(*t)),
            })));
        }
        if c != 0 {
            if not_ever[c] {
                ctx = ctx.with_attribute(Attribute::NotEver);
            }
            let horizon = dist[c].max(1);
            if dist[c] != usize::MAX {
                if rng.gen_bool(0.15) {
                    ctx = ctx.with_attribute(Attribute::Is {
                        step: rng.gen_range(1..=horizon) as u32,
                    });
                }
                if rng.gen_bool(0.3) {
                    ctx = ctx.with_attribute(Attribute::Not {
                        step: rng.gen_range(1..=horizon) as u32,
                    });
                }
            }
        }
        contexts.push(ctx);
    }
    Grammar::new(contexts).expect("generated grammar is valid")
}

fn find_cycle(edges: &[Vec<(EdgeDirection, Resource, usize)>], not_ever: &[bool]) -> Option<Vec<usize>> {
    let k = edges.len();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; k];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        c: usize,
        edges: &[Vec<(EdgeDirection, Resource, usize)>],
        not_ever: &[bool],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[c] = 1;
        stack.push(c);
        for &(_, _, t) in &edges[c] {
            if not_ever[t] {
                continue;
            }
            if state[t] == 1 {
                let at = stack.iter().position(|&s| s == t).unwrap();
                return Some(stack[at..].to_vec());
            }
            if state[t] == 0 {
                if let Some(cycle) = dfs(t, edges, not_ever, state, stack) {
                    return Some(cycle);
                }
            }
        }
        stack.pop();
        state[c] = 2;
        None
    }
    for c in 0..k {
        if !not_ever[c] && state[c] == 0 {
            if let Some(cycle) = dfs(c, edges, not_ever, &mut state, &mut stack) {
                return Some(cycle);
            }
        }
    }
    None
}

/// BFS distances from `j` ignoring labels and direction.
pub fn bfs_all(triples: &[Triple], j: &Resource) -> BTreeMap<Resource, usize> {
    let mut adj: BTreeMap<&Resource, Vec<&Resource>> = BTreeMap::new();
    for t in triples {
        adj.entry(&t.subject).or_default().push(&t.object);
        adj.entry(&t.object).or_default().push(&t.subject);
    }
    let mut dist = BTreeMap::from([(j.clone(), 0)]);
    let mut queue = VecDeque::from([j]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        for &w in adj.get(v).into_iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}
