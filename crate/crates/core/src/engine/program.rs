//! A grammar lowered onto one graph's term ids.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::grammar::{Attribute, ContextId, ContextKind, EdgeDirection, Grammar, Rule};
use crate::triple_store::{Graph, Resource, TermId};
use crate::vocab;

/// What a context's `for_resource` resolves against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Target {
    /// `rdfs:Resource`: every vertex.
    Any,
    Id(TermId),
    /// Not in the graph, so nothing matches.
    Missing,
    /// Whatever one of several targets admits.
    Among(Arc<[Target]>),
}

impl Target {
    pub fn resolve(graph: &Graph, r: &Resource) -> Self {
        if r.as_iri() == Some(vocab::RDFS_RESOURCE) {
            return Target::Any;
        }
        graph.term_id(r).map_or(Target::Missing, Target::Id)
    }

    pub fn admits(&self, graph: &Graph, b: TermId) -> bool {
        match self {
            Target::Any => true,
            Target::Id(z) => graph.type_or_equal_id(b, *z),
            Target::Missing => false,
            Target::Among(ts) => ts.iter().any(|t| t.admits(graph, b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Predicates {
    /// `rdfs:Resource` as an edge label matches every predicate.
    Any,
    /// Every graph predicate subsumed by the edge label.
    Ids(Vec<TermId>),
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub direction: EdgeDirection,
    pub predicates: Predicates,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    PathCount(u32),
    Traverse(Vec<Edge>),
}

#[derive(Debug, Clone)]
pub(crate) struct Context {
    pub id: ContextId,
    pub kind: ContextKind,
    pub resource: Resource,
    pub target: Target,
    pub steps: Vec<Step>,
    pub not_ever: bool,
    pub is: Vec<u32>,
    pub not: Vec<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub contexts: Vec<Context>,
    pub entry: usize,
    pub exit: usize,
    pub index: BTreeMap<ContextId, usize>,
}

impl Program {
    pub fn compile(graph: &Graph, grammar: &Grammar) -> Self {
        let index: BTreeMap<ContextId, usize> = grammar
            .contexts()
            .enumerate()
            .map(|(k, c)| (c.id.clone(), k))
            .collect();
        let graph_predicates = graph.predicates();
        let contexts = grammar
            .contexts()
            .map(|c| {
                let steps = c
                    .rules
                    .iter()
                    .map(|r| match r {
                        Rule::PathCount { step } => Step::PathCount(*step),
                        Rule::Traverse { edges } => Step::Traverse(
                            edges
                                .iter()
                                .map(|e| Edge {
                                    direction: e.direction,
                                    predicates: resolve_predicates(graph, &graph_predicates, &e.predicate),
                                    target: index[&e.far_context],
                                })
                                .collect(),
                        ),
                    })
                    .collect();
                let steps_of = |f: fn(&Attribute) -> Option<u32>| -> Vec<u32> {
                    c.attributes.iter().filter_map(f).collect()
                };
                Context {
                    id: c.id.clone(),
                    kind: c.kind,
                    resource: c.for_resource.clone(),
                    target: Target::resolve(graph, &c.for_resource),
                    steps,
                    not_ever: c.has_not_ever(),
                    is: steps_of(|a| match a {
                        Attribute::Is { step } => Some(*step),
                        _ => None,
                    }),
                    not: steps_of(|a| match a {
                        Attribute::Not { step } => Some(*step),
                        _ => None,
                    }),
                }
            })
            .collect();
        Program {
            contexts,
            entry: index[grammar.entry_id()],
            exit: index[grammar.exit_id()],
            index,
        }
    }

    /// Same program with the entry bound to `i` and the exit to `j`.
    pub fn rebind(&self, graph: &Graph, i: &Resource, j: &Resource) -> Self {
        let mut p = self.clone();
        for (k, r) in [(p.entry, i), (p.exit, j)] {
            p.contexts[k].resource = r.clone();
            p.contexts[k].target = Target::resolve(graph, r);
        }
        p
    }

    /// Entry bound to `i`; the exit admits whatever any of `targets` admits.
    pub fn rebind_many(&self, graph: &Graph, i: &Resource, targets: &[Target]) -> Self {
        let mut p = self.clone();
        p.contexts[p.entry].resource = i.clone();
        p.contexts[p.entry].target = Target::resolve(graph, i);
        p.contexts[p.exit].target = Target::Among(targets.into());
        p
    }
}

/// The graph predicates an edge labelled `w` may follow.
pub(crate) fn resolve_predicates(graph: &Graph, graph_predicates: &[TermId], w: &Resource) -> Predicates {
    if w.as_iri() == Some(vocab::RDFS_RESOURCE) {
        return Predicates::Any;
    }
    match graph.term_id(w) {
        None => Predicates::Ids(Vec::new()),
        Some(w) => Predicates::Ids(
            graph_predicates
                .iter()
                .copied()
                .filter(|&omega| graph.subproperty_or_equal_id(omega, w))
                .collect(),
        ),
    }
}
