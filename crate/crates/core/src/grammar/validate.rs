use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Attribute, ContextId, ContextKind, Grammar, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ViolationKind {
    EntryHasAttributes,
    EntryLacksPathCount,
    ExitHasTraverse,
    EmptyTraverse,
    DanglingEdge { target: ContextId },
    ZeroStep { attribute: String },
    /// A context cycle none of whose members carries `notever`.
    TerminationHazard { cycle: Vec<ContextId> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub context: ContextId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}: context {}: ", self.context)?;
        match &self.kind {
            ViolationKind::EntryHasAttributes => f.write_str("entry context must have no attributes"),
            ViolationKind::EntryLacksPathCount => f.write_str("entry context must have a pathcount rule"),
            ViolationKind::ExitHasTraverse => f.write_str("exit context must not have a traverse rule"),
            ViolationKind::EmptyTraverse => f.write_str("traverse rule has no edges"),
            ViolationKind::DanglingEdge { target } => {
                write!(f, "edge targets undeclared context {target}")
            }
            ViolationKind::ZeroStep { attribute } => {
                write!(f, "{attribute} step must be at least 1")
            }
            ViolationKind::TerminationHazard { cycle } => {
                let names: Vec<_> = cycle.iter().map(ContextId::as_str).collect();
                write!(
                    f,
                    "context cycle without notever may not terminate: {}",
                    names.join(" -> ")
                )
            }
        }
    }
}

impl Violation {
    fn error(context: &ContextId, kind: ViolationKind) -> Self {
        Self {
            severity: Severity::Error,
            context: context.clone(),
            kind,
        }
    }
}

/// Every structural problem of `grammar`, errors first, then warnings.
pub fn validate_grammar(grammar: &Grammar) -> Vec<Violation> {
    let mut out = Vec::new();
    for ctx in grammar.contexts() {
        match ctx.kind {
            ContextKind::Entry => {
                if !ctx.attributes.is_empty() {
                    out.push(Violation::error(&ctx.id, ViolationKind::EntryHasAttributes));
                }
                if !ctx.rules.iter().any(|r| matches!(r, Rule::PathCount { .. })) {
                    out.push(Violation::error(&ctx.id, ViolationKind::EntryLacksPathCount));
                }
            }
            ContextKind::Exit => {
                if ctx.rules.iter().any(|r| matches!(r, Rule::Traverse { .. })) {
                    out.push(Violation::error(&ctx.id, ViolationKind::ExitHasTraverse));
                }
            }
            ContextKind::Intermediate => {}
        }
        for rule in &ctx.rules {
            if let Rule::Traverse { edges } = rule {
                if edges.is_empty() {
                    out.push(Violation::error(&ctx.id, ViolationKind::EmptyTraverse));
                }
                let dangling: BTreeSet<_> = edges
                    .iter()
                    .filter(|e| grammar.context(&e.far_context).is_none())
                    .map(|e| e.far_context.clone())
                    .collect();
                for target in dangling {
                    out.push(Violation::error(&ctx.id, ViolationKind::DanglingEdge { target }));
                }
            }
        }
        for attr in &ctx.attributes {
            let name = match attr {
                Attribute::Is { step: 0 } => "is",
                Attribute::Not { step: 0 } => "not",
                _ => continue,
            };
            out.push(Violation::error(
                &ctx.id,
                ViolationKind::ZeroStep {
                    attribute: name.to_string(),
                },
            ));
        }
    }
    for cycle in unguarded_cycles(grammar) {
        out.push(Violation {
            severity: Severity::Warning,
            context: cycle[0].clone(),
            kind: ViolationKind::TerminationHazard { cycle },
        });
    }
    out.sort();
    out
}

/// Strongly connected components with a cycle in the subgraph of contexts
/// that lack `notever`.
fn unguarded_cycles(grammar: &Grammar) -> Vec<Vec<ContextId>> {
    let unguarded: BTreeSet<&ContextId> = grammar
        .contexts()
        .filter(|c| !c.has_not_ever())
        .map(|c| &c.id)
        .collect();
    let mut succ: BTreeMap<&ContextId, BTreeSet<&ContextId>> = BTreeMap::new();
    for ctx in grammar.contexts().filter(|c| unguarded.contains(&c.id)) {
        let next = succ.entry(&ctx.id).or_default();
        for e in ctx.traverse_edges() {
            if unguarded.contains(&e.far_context) {
                next.insert(&e.far_context);
            }
        }
    }
    let reach = |from: &ContextId| -> BTreeSet<&ContextId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&ContextId> = succ.get(from).into_iter().flatten().copied().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(succ.get(n).into_iter().flatten().copied());
            }
        }
        seen
    };
    let reachability: BTreeMap<&ContextId, BTreeSet<&ContextId>> =
        unguarded.iter().map(|&c| (c, reach(c))).collect();

    let mut assigned = BTreeSet::new();
    let mut cycles = Vec::new();
    for &c in &unguarded {
        if assigned.contains(c) || !reachability[c].contains(c) {
            continue;
        }
        let component: Vec<ContextId> = reachability[c]
            .iter()
            .filter(|&&d| reachability[d].contains(c))
            .map(|&d| d.clone())
            .collect();
        assigned.extend(component.iter().cloned());
        cycles.push(component);
    }
    cycles
}
