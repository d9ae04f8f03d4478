use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;

use super::program::{Context, Edge, Predicates, Program, Step, Target};
use super::walker::{collect, push, IdStep, Node, Walker};
use super::{
    Direction, EngineConfig, EngineError, GenerationTrace, PathRecord, PathStep, RunMode, RunOutput,
    RunStats, Trace, Transition, Via, WalkerSummary,
};
use crate::grammar::{Attribute, ContextId, ContextKind, EdgeDirection, EdgeSpec, Grammar};
use crate::triple_store::{Graph, IdTriple, Resource, TermId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Move {
    target: usize,
    triple: IdTriple,
    direction: Direction,
    vertex: TermId,
}

/// Executes one grammar over one graph.
///
/// States `(context, vertex)` from which the exit cannot be reached, even
/// ignoring attributes, are pruned up front. No walker in such a state can
/// ever finish, so `Q` is unaffected.
#[derive(Clone)]
pub struct Engine<'g> {
    graph: &'g Graph,
    program: Program,
    config: EngineConfig,
    pool: Option<Arc<rayon::ThreadPool>>,
    live: Option<Arc<Vec<bool>>>,
    prune: bool,
}

/// Walkers in flight plus the ones that reached the exit.
#[derive(Debug, Clone, Default)]
pub struct Expansion {
    pub frontier: Vec<Walker>,
    pub finished: Vec<Walker>,
    pub generation: usize,
    pub stats: RunStats,
    next_id: u64,
}

struct Advance {
    legal: Vec<Move>,
    successors: Vec<(Walker, bool)>,
    stats: RunStats,
}

impl<'g> Engine<'g> {
    pub fn new(graph: &'g Graph, grammar: &Grammar, config: EngineConfig) -> Result<Self, EngineError> {
        if config.max_steps == 0 {
            return Err(EngineError::Config("max_steps must be at least 1".into()));
        }
        if config.threads == 0 {
            return Err(EngineError::Config("threads must be at least 1".into()));
        }
        let pool = if config.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| EngineError::Config(e.to_string()))?;
            Some(Arc::new(pool))
        } else {
            None
        };
        let mut engine = Engine {
            graph,
            program: Program::compile(graph, grammar),
            config,
            pool,
            live: None,
            prune: true,
        };
        engine.live = Some(Arc::new(engine.live_states()));
        Ok(engine)
    }

    /// Turns dead-state pruning off, so every walker runs until it halts on
    /// its own. `Q` is the same either way; traces and truncation differ.
    pub fn without_pruning(mut self) -> Self {
        self.prune = false;
        self
    }

    /// The same grammar with the entry bound to `i` and the exit to `j`.
    pub fn with_endpoints(&self, i: &Resource, j: &Resource) -> Engine<'g> {
        let mut engine = Engine {
            graph: self.graph,
            program: self.program.rebind(self.graph, i, j),
            config: self.config,
            pool: self.pool.clone(),
            live: None,
            prune: self.prune,
        };
        if engine.prune {
            engine.live = Some(Arc::new(engine.live_states()));
        }
        engine
    }

    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.config.mode = mode;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn source(&self) -> &Resource {
        &self.program.contexts[self.program.entry].resource
    }

    pub fn sink(&self) -> &Resource {
        &self.program.contexts[self.program.exit].resource
    }

    pub(crate) fn pool(&self) -> Option<&rayon::ThreadPool> {
        self.pool.as_deref()
    }

    // --- walker inspection -------------------------------------------------

    pub fn context_of(&self, w: &Walker) -> &ContextId {
        &self.program.contexts[w.context].id
    }

    pub fn vertex_of(&self, w: &Walker) -> &Resource {
        self.graph.resource(w.vertex())
    }

    pub fn g_path(&self, w: &Walker) -> Vec<PathStep> {
        self.resolve_steps(&collect(&w.g))
    }

    pub fn q_path(&self, w: &Walker) -> Vec<PathStep> {
        self.resolve_steps(&collect(&w.q))
    }

    fn resolve_steps(&self, steps: &[IdStep]) -> Vec<PathStep> {
        steps
            .iter()
            .map(|s| PathStep {
                vertex: self.graph.resource(s.vertex).clone(),
                via: s.via.map(|(p, direction)| Via {
                    predicate: self.graph.resource(p).clone(),
                    direction,
                }),
            })
            .collect()
    }

    /// A walker with the given history, sitting in `context`.
    pub fn walker_at(
        &self,
        context: &ContextId,
        g_path: &[PathStep],
        q_path: &[PathStep],
    ) -> Result<Walker, EngineError> {
        let ctx = *self
            .program
            .index
            .get(context)
            .ok_or_else(|| EngineError::UnknownContext(context.clone()))?;
        if g_path.is_empty() {
            return Err(EngineError::Config("g path must not be empty".into()));
        }
        let id_of = |r: &Resource| self.graph.term_id(r).ok_or_else(|| EngineError::UnknownResource(r.clone()));
        let mut lists = [None, None];
        for (list, path) in lists.iter_mut().zip([g_path, q_path]) {
            for step in path {
                let via = match &step.via {
                    Some(v) => Some((id_of(&v.predicate)?, v.direction)),
                    None => None,
                };
                *list = push(list, IdStep {
                    vertex: id_of(&step.vertex)?,
                    via,
                });
            }
        }
        let [g, q] = lists;
        Ok(Walker {
            id: 0,
            context: ctx,
            time: g_path.len() - 1,
            g,
            q,
        })
    }

    // --- attribute sets ------------------------------------------------------

    /// `X̄`: every vertex on the walker's full path.
    pub fn not_ever_set(&self, w: &Walker) -> BTreeSet<Resource> {
        collect(&w.g)
            .into_iter()
            .map(|s| self.graph.resource(s.vertex).clone())
            .collect()
    }

    /// `O`: vertices an `is` attribute pins the next position to.
    pub fn is_set(&self, w: &Walker, attrs: &BTreeSet<Attribute>) -> Result<BTreeSet<Resource>, EngineError> {
        let steps: Vec<u32> = attrs
            .iter()
            .filter_map(|a| match a {
                Attribute::Is { step } => Some(*step),
                _ => None,
            })
            .collect();
        self.back_set(w, &steps, "is", &self.program.contexts[w.context].id)
    }

    /// `X`: vertices a `not` attribute forbids at the next position.
    pub fn not_set(&self, w: &Walker, attrs: &BTreeSet<Attribute>) -> Result<BTreeSet<Resource>, EngineError> {
        let steps: Vec<u32> = attrs
            .iter()
            .filter_map(|a| match a {
                Attribute::Not { step } => Some(*step),
                _ => None,
            })
            .collect();
        self.back_set(w, &steps, "not", &self.program.contexts[w.context].id)
    }

    fn back_set(
        &self,
        w: &Walker,
        steps: &[u32],
        name: &str,
        context: &ContextId,
    ) -> Result<BTreeSet<Resource>, EngineError> {
        let g = collect(&w.g);
        Ok(back_positions(&g, w.time, steps, name, context)?
            .into_iter()
            .map(|v| self.graph.resource(v).clone())
            .collect())
    }

    // --- rules ---------------------------------------------------------------

    /// `Γ`: the legal transitions for a traverse over `edges`, filtered by the
    /// destination contexts' attributes.
    pub fn legal_edges(&self, w: &Walker, edges: &[EdgeSpec]) -> Result<BTreeSet<Transition>, EngineError> {
        let preds = self.graph.predicates();
        let compiled = edges
            .iter()
            .map(|e| {
                let target = *self
                    .program
                    .index
                    .get(&e.far_context)
                    .ok_or_else(|| EngineError::UnknownContext(e.far_context.clone()))?;
                Ok(Edge {
                    direction: e.direction,
                    predicates: super::program::resolve_predicates(self.graph, &preds, &e.predicate),
                    target,
                })
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        let g = collect(&w.g);
        let mut moves = BTreeSet::new();
        let mut stats = RunStats::default();
        self.moves(&g, w.time, &compiled, &mut moves, &mut stats)?;
        Ok(moves.into_iter().map(|m| self.transition(&m)).collect())
    }

    /// Copies `g[n - step]` onto `q`.
    pub fn apply_path_count(&self, w: &Walker, step: u32) -> Result<Walker, EngineError> {
        let g = collect(&w.g);
        let mut next = w.clone();
        next.q = self.path_count(&g, w, &next.q, step)?;
        Ok(next)
    }

    fn path_count(
        &self,
        g: &[IdStep],
        w: &Walker,
        q: &Option<Arc<Node>>,
        step: u32,
    ) -> Result<Option<Arc<Node>>, EngineError> {
        let position = w.time as i64 - i64::from(step);
        if position < 0 {
            return Err(EngineError::StepOutOfRange {
                context: self.program.contexts[w.context].id.clone(),
                rule: format!("pathcount {step}"),
                position,
            });
        }
        Ok(push(q, g[position as usize]))
    }

    fn transition(&self, m: &Move) -> Transition {
        Transition {
            triple: self.graph.resolve(m.triple),
            direction: m.direction,
            next_context: self.program.contexts[m.target].id.clone(),
        }
    }

    /// Candidate moves from `g[n]` along `edges`.
    fn moves(
        &self,
        g: &[IdStep],
        n: usize,
        edges: &[Edge],
        out: &mut BTreeSet<Move>,
        stats: &mut RunStats,
    ) -> Result<(), EngineError> {
        let a = g[n].vertex;
        let mut filters: Vec<(usize, Vec<TermId>, Vec<TermId>)> = Vec::new();
        for edge in edges {
            let d = &self.program.contexts[edge.target];
            if !filters.iter().any(|f| f.0 == edge.target) {
                let is = back_positions(g, n, &d.is, "is", &d.id)?;
                let not = back_positions(g, n, &d.not, "not", &d.id)?;
                filters.push((edge.target, is, not));
            }
            let (_, is, not) = filters.iter().find(|f| f.0 == edge.target).expect("just inserted");
            let mut consider = |t: IdTriple| {
                stats.triples_scanned += 1;
                let (b, direction) = match edge.direction {
                    EdgeDirection::Out => (t.o, Direction::Forward),
                    EdgeDirection::In => (t.s, Direction::Backward),
                };
                if admits(self.graph, d, g, is, not, b) {
                    out.insert(Move {
                        target: edge.target,
                        triple: t,
                        direction,
                        vertex: b,
                    });
                }
            };
            match (&edge.predicates, edge.direction) {
                (Predicates::Any, EdgeDirection::Out) => self.graph.outgoing(a).for_each(&mut consider),
                (Predicates::Any, EdgeDirection::In) => self.graph.incoming(a).for_each(&mut consider),
                (Predicates::Ids(ps), EdgeDirection::Out) => {
                    for &p in ps {
                        self.graph.match_ids(Some(a), Some(p), None).for_each(&mut consider);
                    }
                }
                (Predicates::Ids(ps), EdgeDirection::In) => {
                    for &p in ps {
                        self.graph.match_ids(None, Some(p), Some(a)).for_each(&mut consider);
                    }
                }
            }
        }
        Ok(())
    }

    // --- running -------------------------------------------------------------

    /// The single walker at the entry context, bound to the entry resource.
    pub fn seed(&self) -> Result<Walker, EngineError> {
        let entry = &self.program.contexts[self.program.entry];
        let vertex = self
            .graph
            .term_id(&entry.resource)
            .ok_or_else(|| EngineError::UnresolvableEntry(entry.resource.clone()))?;
        Ok(Walker {
            id: 0,
            context: self.program.entry,
            time: 0,
            g: push(&None, IdStep { vertex, via: None }),
            q: None,
        })
    }

    pub fn start(&self) -> Result<Expansion, EngineError> {
        let seed = self.seed()?;
        let frontier = if self.is_live(seed.context, seed.vertex()) {
            vec![seed]
        } else {
            Vec::new()
        };
        Ok(Expansion {
            stats: RunStats {
                walkers_created: 1,
                max_frontier: frontier.len(),
                ..RunStats::default()
            },
            frontier,
            finished: Vec::new(),
            generation: 0,
            next_id: 1,
        })
    }

    fn is_live(&self, context: usize, vertex: TermId) -> bool {
        match (&self.live, self.prune) {
            (Some(live), true) => live[context * self.graph.term_count() + vertex.index()],
            _ => true,
        }
    }

    /// Runs the rules of `w`'s context and returns its successors.
    fn advance(&self, w: &Walker, keep_legal: bool) -> Result<Advance, EngineError> {
        let ctx = &self.program.contexts[w.context];
        let g = collect(&w.g);
        let mut q = w.q.clone();
        let mut moves = BTreeSet::new();
        let mut stats = RunStats::default();
        for step in &ctx.steps {
            match step {
                Step::PathCount(s) => q = self.path_count(&g, w, &q, *s)?,
                Step::Traverse(edges) => self.moves(&g, w.time, edges, &mut moves, &mut stats)?,
            }
        }
        let legal: Vec<Move> = if keep_legal {
            moves.iter().copied().collect()
        } else {
            Vec::new()
        };
        let mut successors = Vec::with_capacity(moves.len());
        for m in moves {
            stats.transitions += 1;
            if !self.is_live(m.target, m.vertex) {
                continue;
            }
            let mut next = Walker {
                id: 0,
                context: m.target,
                time: w.time + 1,
                g: push(&w.g, IdStep {
                    vertex: m.vertex,
                    via: Some((m.triple.p, m.direction)),
                }),
                q: q.clone(),
            };
            let finished = m.target == self.program.exit;
            if finished {
                let g = collect(&next.g);
                for step in &self.program.contexts[m.target].steps {
                    if let Step::PathCount(s) = step {
                        next.q = self.path_count(&g, &next, &next.q, *s)?;
                    }
                }
            }
            stats.walkers_created += 1;
            successors.push((next, finished));
        }
        Ok(Advance {
            legal,
            successors,
            stats,
        })
    }

    /// One synchronous generation. Successors of a walker keep its id for the
    /// first transition; clones get fresh ids in transition order.
    pub fn expand(&self, state: &mut Expansion) -> Result<(), EngineError> {
        self.expand_inner(state, false).map(|_| ())
    }

    pub fn expand_traced(&self, state: &mut Expansion) -> Result<GenerationTrace, EngineError> {
        self.expand_inner(state, true)
            .map(|t| t.expect("trace requested"))
    }

    fn expand_inner(&self, state: &mut Expansion, trace: bool) -> Result<Option<GenerationTrace>, EngineError> {
        let frontier = std::mem::take(&mut state.frontier);
        let results: Vec<Result<Advance, EngineError>> = match &self.pool {
            Some(pool) if frontier.len() > 1 => {
                pool.install(|| frontier.par_iter().map(|w| self.advance(w, trace)).collect())
            }
            _ => frontier.iter().map(|w| self.advance(w, trace)).collect(),
        };
        let mut generation = trace.then(|| GenerationTrace {
            time: frontier.first().map_or(state.generation, |w| w.time),
            expanded: frontier.iter().map(|w| self.summary(w, false)).collect(),
            transitions: Vec::new(),
            produced: Vec::new(),
        });
        let mut next_frontier = Vec::new();
        for (parent, result) in frontier.iter().zip(results) {
            let advance = result?;
            state.stats.absorb(&advance.stats);
            if let Some(t) = generation.as_mut() {
                t.transitions
                    .extend(advance.legal.iter().map(|m| (parent.id, self.transition(m))));
            }
            for (k, (mut walker, finished)) in advance.successors.into_iter().enumerate() {
                walker.id = if k == 0 {
                    parent.id
                } else {
                    state.next_id += 1;
                    state.next_id - 1
                };
                if let Some(t) = generation.as_mut() {
                    t.produced.push(self.summary(&walker, finished));
                }
                if finished {
                    state.finished.push(walker);
                } else {
                    next_frontier.push(walker);
                }
            }
        }
        state.frontier = next_frontier;
        state.generation += 1;
        state.stats.generations = state.generation;
        state.stats.max_frontier = state.stats.max_frontier.max(state.frontier.len());
        Ok(generation)
    }

    fn summary(&self, w: &Walker, finished: bool) -> WalkerSummary {
        WalkerSummary {
            id: w.id,
            context: self.context_of(w).clone(),
            vertex: self.vertex_of(w).clone(),
            time: w.time,
            finished,
        }
    }

    /// `Q` from the walkers finished so far: recorded paths that start at the
    /// seed vertex and end at the vertex resolved to the exit.
    pub fn records(&self, state: &Expansion) -> BTreeSet<PathRecord> {
        self.walker_records(state).into_iter().map(|(_, r)| r).collect()
    }

    /// Like [`Engine::records`], keeping the smallest walker id per record,
    /// ordered by id.
    pub fn walker_records(&self, state: &Expansion) -> Vec<(u64, PathRecord)> {
        let mut by_record: BTreeMap<PathRecord, u64> = BTreeMap::new();
        for w in &state.finished {
            let Some(record) = self.record_of(w) else {
                continue;
            };
            let id = by_record.entry(record).or_insert(w.id);
            *id = (*id).min(w.id);
        }
        let mut out: Vec<(u64, PathRecord)> = by_record.into_iter().map(|(r, id)| (id, r)).collect();
        out.sort();
        out
    }

    /// A finished walker's `q`, if it starts at the seed vertex and ends
    /// where the walker stands.
    fn record_of(&self, w: &Walker) -> Option<PathRecord> {
        let q = collect(&w.q);
        let (first, last) = (q.first()?, q.last()?);
        let g = collect(&w.g);
        (first.vertex == g[0].vertex && last.vertex == w.vertex()).then(|| PathRecord::new(self.resolve_steps(&q)))
    }

    fn output(&self, state: &Expansion) -> RunOutput {
        let walkers = self.walker_records(state);
        RunOutput {
            records: walkers.iter().map(|(_, r)| r.clone()).collect(),
            walkers,
            stats: state.stats,
        }
    }

    pub fn run(&self) -> Result<RunOutput, EngineError> {
        self.run_inner(None)
    }

    pub fn run_traced(&self) -> Result<(RunOutput, Trace), EngineError> {
        let mut trace = Trace::default();
        let out = self.run_inner(Some(&mut trace))?;
        Ok((out, trace))
    }

    fn run_inner(&self, mut trace: Option<&mut Trace>) -> Result<RunOutput, EngineError> {
        let mut state = self.start()?;
        while !state.frontier.is_empty() {
            if state.generation >= self.config.max_steps {
                return Err(EngineError::Truncated {
                    max_steps: self.config.max_steps,
                    partial: self.records(&state),
                });
            }
            match trace.as_deref_mut() {
                Some(t) => t.generations.push(self.expand_traced(&mut state)?),
                None => self.expand(&mut state)?,
            }
            if self.config.mode == RunMode::ShortestOnly && !state.finished.is_empty() {
                let out = self.output(&state);
                if !out.records.is_empty() {
                    return Ok(out);
                }
            }
        }
        Ok(self.output(&state))
    }

    /// `Q` of the grammar rebound to `(i, j)` for every `j` in `targets`,
    /// from a single run whose exit admits all of them.
    ///
    /// Walkers that never reach the exit evolve the same way whatever `j` is,
    /// so each target sees exactly the records its own run would return. A
    /// target still open when the shared run hits `max_steps` is rerun on its
    /// own.
    pub fn run_to_targets(&self, i: &Resource, targets: &[Resource]) -> Result<Vec<BTreeSet<PathRecord>>, EngineError> {
        let resolved: Vec<Target> = targets.iter().map(|j| Target::resolve(self.graph, j)).collect();
        let mut engine = Engine {
            graph: self.graph,
            program: self.program.rebind_many(self.graph, i, &[]),
            config: self.config,
            pool: self.pool.clone(),
            live: None,
            prune: self.prune,
        };
        let mut state = engine.start()?;
        let shortest = self.config.mode == RunMode::ShortestOnly;
        let mut q = vec![BTreeSet::new(); targets.len()];
        // Targets no exit state reachable from the seed can admit are settled
        // up front; the pruned single run would stop at once for them too.
        let reached = engine.reachable_exit_vertices(state.frontier.first().map(Walker::vertex));
        let mut done: Vec<bool> = resolved
            .iter()
            .map(|t| !reached.iter().any(|&b| t.admits(self.graph, b)))
            .collect();
        let retarget = |engine: &mut Engine<'g>, state: &mut Expansion, done: &[bool]| {
            let open: Vec<Target> = resolved
                .iter()
                .zip(done)
                .filter(|(_, d)| !**d)
                .map(|(t, _)| t.clone())
                .collect();
            let exit = engine.program.exit;
            engine.program.contexts[exit].target = Target::Among(open.into());
            if engine.prune {
                engine.live = Some(Arc::new(engine.live_states()));
                state.frontier.retain(|w| engine.is_live(w.context, w.vertex()));
            }
        };
        retarget(&mut engine, &mut state, &done);
        let mut truncated = false;
        while !state.frontier.is_empty() && !done.iter().all(|&d| d) {
            if state.generation >= self.config.max_steps {
                truncated = true;
                break;
            }
            let before = state.finished.len();
            engine.expand(&mut state)?;
            for w in state.finished.drain(before..) {
                let Some(record) = engine.record_of(&w) else {
                    continue;
                };
                let b = w.vertex();
                for (k, t) in resolved.iter().enumerate() {
                    if !done[k] && t.admits(self.graph, b) {
                        q[k].insert(record.clone());
                    }
                }
            }
            if shortest {
                let mut changed = false;
                for (d, records) in done.iter_mut().zip(&q) {
                    if !*d && !records.is_empty() {
                        *d = true;
                        changed = true;
                    }
                }
                if changed && !done.iter().all(|&d| d) {
                    retarget(&mut engine, &mut state, &done);
                }
            }
        }
        if truncated {
            for (k, j) in targets.iter().enumerate() {
                if !done[k] {
                    q[k] = self.with_endpoints(i, j).run()?.records;
                }
            }
        }
        Ok(q)
    }

    /// Vertices at which the exit context is reachable from the seed state,
    /// ignoring attributes and context resources. The same relation as
    /// [`Engine::live_states`], walked forwards.
    fn reachable_exit_vertices(&self, seed: Option<TermId>) -> Vec<TermId> {
        let Some(seed) = seed else {
            return Vec::new();
        };
        let n = self.graph.term_count();
        let contexts = &self.program.contexts;
        let mut seen = vec![false; contexts.len() * n];
        let mut queue = VecDeque::from([(self.program.entry, seed)]);
        seen[self.program.entry * n + seed.index()] = true;
        let mut out = Vec::new();
        while let Some((c, a)) = queue.pop_front() {
            if contexts[c].kind == ContextKind::Exit {
                out.push(a);
                continue;
            }
            for step in &contexts[c].steps {
                let Step::Traverse(edges) = step else {
                    continue;
                };
                for e in edges {
                    let mut visit = |b: TermId| {
                        let slot = &mut seen[e.target * n + b.index()];
                        if !*slot {
                            *slot = true;
                            queue.push_back((e.target, b));
                        }
                    };
                    match (&e.predicates, e.direction) {
                        (Predicates::Any, EdgeDirection::Out) => self.graph.outgoing(a).for_each(|t| visit(t.o)),
                        (Predicates::Any, EdgeDirection::In) => self.graph.incoming(a).for_each(|t| visit(t.s)),
                        (Predicates::Ids(ps), EdgeDirection::Out) => {
                            for &p in ps {
                                self.graph.match_ids(Some(a), Some(p), None).for_each(|t| visit(t.o));
                            }
                        }
                        (Predicates::Ids(ps), EdgeDirection::In) => {
                            for &p in ps {
                                self.graph.match_ids(None, Some(p), Some(a)).for_each(|t| visit(t.s));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// States `(context, vertex)` that can reach an exit state, found by a
    /// backward search that ignores attributes.
    fn live_states(&self) -> Vec<bool> {
        let n = self.graph.term_count();
        let contexts = &self.program.contexts;
        let mut live = vec![false; contexts.len() * n];
        let mut queue = VecDeque::new();
        let exit = &contexts[self.program.exit];
        for v in 0..n {
            let id = term(v);
            if exit.target.admits(self.graph, id) {
                live[self.program.exit * n + v] = true;
                queue.push_back((self.program.exit, id));
            }
        }
        // Reverse edges of the context graph: (source context, edge).
        let mut into: Vec<Vec<(usize, &Edge)>> = vec![Vec::new(); contexts.len()];
        for (c, ctx) in contexts.iter().enumerate() {
            if ctx.kind == ContextKind::Exit {
                continue;
            }
            for step in &ctx.steps {
                if let Step::Traverse(edges) = step {
                    for e in edges {
                        into[e.target].push((c, e));
                    }
                }
            }
        }
        while let Some((d, b)) = queue.pop_front() {
            for &(c, edge) in &into[d] {
                let mut mark = |a: TermId| {
                    let slot = &mut live[c * n + a.index()];
                    if !*slot {
                        *slot = true;
                        queue.push_back((c, a));
                    }
                };
                // Out edge a -> b arrives at b; in edge b -> a arrives at b too.
                match (&edge.predicates, edge.direction) {
                    (Predicates::Any, EdgeDirection::Out) => self.graph.incoming(b).for_each(|t| mark(t.s)),
                    (Predicates::Any, EdgeDirection::In) => self.graph.outgoing(b).for_each(|t| mark(t.o)),
                    (Predicates::Ids(ps), EdgeDirection::Out) => {
                        for &p in ps {
                            self.graph.match_ids(None, Some(p), Some(b)).for_each(|t| mark(t.s));
                        }
                    }
                    (Predicates::Ids(ps), EdgeDirection::In) => {
                        for &p in ps {
                            self.graph.match_ids(Some(b), Some(p), None).for_each(|t| mark(t.o));
                        }
                    }
                }
            }
        }
        live
    }
}

fn term(index: usize) -> TermId {
    crate::triple_store::TermId::from_index(index)
}

/// Vertices at positions `(n + 1) - m`, one per step `m`.
fn back_positions(
    g: &[IdStep],
    n: usize,
    steps: &[u32],
    name: &str,
    context: &ContextId,
) -> Result<Vec<TermId>, EngineError> {
    steps
        .iter()
        .map(|&m| {
            let position = n as i64 + 1 - i64::from(m);
            if position < 0 || position as usize > n {
                return Err(EngineError::StepOutOfRange {
                    context: context.clone(),
                    rule: format!("{name} {m}"),
                    position,
                });
            }
            Ok(g[position as usize].vertex)
        })
        .collect()
}

fn admits(graph: &Graph, d: &Context, g: &[IdStep], is: &[TermId], not: &[TermId], b: TermId) -> bool {
    d.target.admits(graph, b)
        && (is.is_empty() || is.contains(&b))
        && !not.contains(&b)
        && !(d.not_ever && g.iter().any(|s| s.vertex == b))
}
