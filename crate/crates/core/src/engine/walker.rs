use std::sync::Arc;

use super::Direction;
use crate::triple_store::TermId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct IdStep {
    pub vertex: TermId,
    pub via: Option<(TermId, Direction)>,
}

/// Persistent list node; clones share their prefix.
#[derive(Debug)]
pub(crate) struct Node {
    pub step: IdStep,
    pub prev: Option<Arc<Node>>,
}

pub(crate) fn push(list: &Option<Arc<Node>>, step: IdStep) -> Option<Arc<Node>> {
    Some(Arc::new(Node {
        step,
        prev: list.clone(),
    }))
}

/// Steps oldest first.
pub(crate) fn collect(list: &Option<Arc<Node>>) -> Vec<IdStep> {
    let mut out = Vec::new();
    let mut cur = list.as_deref();
    while let Some(node) = cur {
        out.push(node.step);
        cur = node.prev.as_deref();
    }
    out.reverse();
    out
}

/// A walker `p`: its context, its full path `g` and its recorded path `q`.
/// Paths are stored as shared persistent lists, so cloning is cheap.
#[derive(Debug, Clone)]
pub struct Walker {
    pub(crate) id: u64,
    pub(crate) context: usize,
    /// Current time index `n`; `g` holds `n + 1` steps.
    pub(crate) time: usize,
    pub(crate) g: Option<Arc<Node>>,
    pub(crate) q: Option<Arc<Node>>,
}

impl Walker {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub(crate) fn vertex(&self) -> TermId {
        self.g.as_ref().expect("g is never empty").step.vertex
    }
}
