use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{validate_grammar, GrammarError, Severity};
use crate::triple_store::Resource;

/// Name of a context within one grammar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextId(pub String);

impl ContextId {
    pub fn new(name: impl Into<String>) -> Self {
        ContextId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ContextId {
    fn from(s: &str) -> Self {
        ContextId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContextKind {
    Entry,
    Intermediate,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeDirection {
    /// Follow `<a, ω, b>` from subject `a`.
    Out,
    /// Follow `<b, ω, a>` backwards from object `a`.
    In,
}

/// One edge of a `traverse` rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub direction: EdgeDirection,
    pub predicate: Resource,
    /// `hasObject` target for out-edges, `hasSubject` source for in-edges.
    pub far_context: ContextId,
}

impl EdgeSpec {
    pub fn out(predicate: Resource, far_context: impl Into<ContextId>) -> Self {
        Self {
            direction: EdgeDirection::Out,
            predicate,
            far_context: far_context.into(),
        }
    }

    pub fn incoming(predicate: Resource, far_context: impl Into<ContextId>) -> Self {
        Self {
            direction: EdgeDirection::In,
            predicate,
            far_context: far_context.into(),
        }
    }
}

impl From<String> for ContextId {
    fn from(s: String) -> Self {
        ContextId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Copy the path step `step` positions back into the recorded path.
    PathCount { step: u32 },
    /// Move along one of the edges.
    Traverse { edges: Vec<EdgeSpec> },
}

impl Rule {
    /// Edge order carries no meaning, so edges are kept sorted and deduplicated.
    pub fn traverse(edges: impl IntoIterator<Item = EdgeSpec>) -> Self {
        let edges: BTreeSet<EdgeSpec> = edges.into_iter().collect();
        Rule::Traverse {
            edges: edges.into_iter().collect(),
        }
    }

    pub fn path_count(step: u32) -> Self {
        Rule::PathCount { step }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribute {
    /// Never resolve to a previously visited vertex.
    NotEver,
    /// Resolve only to the vertex `step` positions back.
    Is { step: u32 },
    /// Never resolve to the vertex `step` positions back.
    Not { step: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarContext {
    pub id: ContextId,
    pub kind: ContextKind,
    pub for_resource: Resource,
    /// Execution order.
    pub rules: Vec<Rule>,
    pub attributes: BTreeSet<Attribute>,
}

impl GrammarContext {
    pub fn new(id: impl Into<ContextId>, kind: ContextKind, for_resource: Resource) -> Self {
        Self {
            id: id.into(),
            kind,
            for_resource,
            rules: Vec::new(),
            attributes: BTreeSet::new(),
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rules.push(rule);
        self
    }

    pub fn with_attribute(mut self, attribute: Attribute) -> Self {
        self.attributes.insert(attribute);
        self
    }

    pub fn has_not_ever(&self) -> bool {
        self.attributes.contains(&Attribute::NotEver)
    }

    pub fn traverse_edges(&self) -> impl Iterator<Item = &EdgeSpec> {
        self.rules.iter().flat_map(|r| match r {
            Rule::Traverse { edges } => edges.as_slice(),
            Rule::PathCount { .. } => &[],
        })
    }
}

/// A path grammar: contexts joined by traverse edges, with exactly one entry
/// and one exit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grammar {
    contexts: BTreeMap<ContextId, GrammarContext>,
    entry: ContextId,
    exit: ContextId,
}

impl Grammar {
    /// Builds and validates. Error-level violations abort; warnings are
    /// retrievable through [`validate_grammar`].
    pub fn new(contexts: impl IntoIterator<Item = GrammarContext>) -> Result<Self, GrammarError> {
        let grammar = Self::new_unchecked(contexts)?;
        let errors: Vec<_> = validate_grammar(&grammar)
            .into_iter()
            .filter(|v| v.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(grammar)
        } else {
            Err(GrammarError::Invalid(errors))
        }
    }

    /// Only structural requirements (unique ids, one entry, one exit) are
    /// enforced.
    pub fn new_unchecked(
        contexts: impl IntoIterator<Item = GrammarContext>,
    ) -> Result<Self, GrammarError> {
        let mut map = BTreeMap::new();
        for ctx in contexts {
            if map.contains_key(&ctx.id) {
                return Err(GrammarError::DuplicateContext(ctx.id));
            }
            map.insert(ctx.id.clone(), ctx);
        }
        let of_kind = |kind: ContextKind| -> Vec<ContextId> {
            map.values()
                .filter(|c| c.kind == kind)
                .map(|c| c.id.clone())
                .collect()
        };
        let entry = match of_kind(ContextKind::Entry).as_slice() {
            [one] => one.clone(),
            many => return Err(GrammarError::EntryCount(many.len())),
        };
        let exit = match of_kind(ContextKind::Exit).as_slice() {
            [one] => one.clone(),
            many => return Err(GrammarError::ExitCount(many.len())),
        };
        Ok(Self {
            contexts: map,
            entry,
            exit,
        })
    }

    /// The two-context-plus-loop grammar that ignores labels, types and edge
    /// direction: every simple path from `i` to `j`.
    pub fn unconstrained(i: Resource, j: Resource) -> Self {
        let any = Resource::iri(crate::vocab::RDFS_RESOURCE);
        let edges = || {
            Rule::traverse([
                EdgeSpec::out(any.clone(), "Resource_1"),
                EdgeSpec::incoming(any.clone(), "Resource_1"),
                EdgeSpec::out(any.clone(), "exit_2"),
                EdgeSpec::incoming(any.clone(), "exit_2"),
            ])
        };
        let entry = GrammarContext::new("entry_0", ContextKind::Entry, i)
            .with_rule(Rule::path_count(0))
            .with_rule(edges());
        let middle = GrammarContext::new("Resource_1", ContextKind::Intermediate, any.clone())
            .with_attribute(Attribute::NotEver)
            .with_rule(Rule::path_count(0))
            .with_rule(edges());
        let exit = GrammarContext::new("exit_2", ContextKind::Exit, j)
            .with_attribute(Attribute::NotEver)
            .with_rule(Rule::path_count(0));
        Self::new([entry, middle, exit]).expect("unconstrained grammar is valid")
    }

    pub fn contexts(&self) -> impl Iterator<Item = &GrammarContext> {
        self.contexts.values()
    }

    pub fn context(&self, id: &ContextId) -> Option<&GrammarContext> {
        self.contexts.get(id)
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn entry_id(&self) -> &ContextId {
        &self.entry
    }

    pub fn exit_id(&self) -> &ContextId {
        &self.exit
    }

    pub fn entry(&self) -> &GrammarContext {
        &self.contexts[&self.entry]
    }

    pub fn exit(&self) -> &GrammarContext {
        &self.contexts[&self.exit]
    }

    /// The source vertex `i`.
    pub fn source(&self) -> &Resource {
        &self.entry().for_resource
    }

    /// The sink vertex `j`.
    pub fn sink(&self) -> &Resource {
        &self.exit().for_resource
    }

    /// A copy whose entry resolves to `i` and exit to `j`.
    pub fn rebind_endpoints(&self, i: Resource, j: Resource) -> Grammar {
        let mut g = self.clone();
        g.contexts
            .get_mut(&self.entry)
            .expect("entry exists")
            .for_resource = i;
        g.contexts
            .get_mut(&self.exit)
            .expect("exit exists")
            .for_resource = j;
        g
    }
}

/// Free-function form of [`Grammar::rebind_endpoints`].
pub fn rebind_endpoints(grammar: &Grammar, i: Resource, j: Resource) -> Grammar {
    grammar.rebind_endpoints(i, j)
}
