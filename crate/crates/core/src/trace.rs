//! Event stream emitted by the tableau engines when tracing is enabled.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::Concept;

/// Identifier of a completion-tree node. Ids grow monotonically within a
/// branch of the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Expansion rules of both calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    And,
    Or,
    Exists,
    Forall,
    ForallTrans,
    Choose,
    AtLeast,
    AtMost,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::And => "and",
            Rule::Or => "or",
            Rule::Exists => "exists",
            Rule::Forall => "forall",
            Rule::ForallTrans => "forall+",
            Rule::Choose => "choose",
            Rule::AtLeast => "at-least",
            Rule::AtMost => "at-most",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    RuleFired(Rule),
    NodeCreated,
    BlockEstablished,
    BlockBroken,
    Backtrack,
    /// SI trace mode: the successors of the first node were deleted.
    Reset,
    /// SI trace mode: a finished subtree was folded into its parent.
    Summarized,
}

/// `nodes` lists the node the event is about first; for blocks the second
/// entry is the blocker, for resets the remaining entries are the deleted
/// nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: usize,
    pub kind: EventKind,
    pub nodes: Vec<NodeId>,
    pub concept: Option<Concept>,
}

#[derive(Debug, Default)]
pub(crate) struct Tracer {
    enabled: bool,
    step: usize,
    pub events: Vec<TraceEvent>,
}

impl Tracer {
    pub fn new(enabled: bool) -> Self {
        Tracer {
            enabled,
            ..Default::default()
        }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn emit(&mut self, kind: EventKind, nodes: Vec<NodeId>, concept: Option<&Concept>) {
        if !self.enabled {
            return;
        }
        self.step += 1;
        self.events.push(TraceEvent {
            step: self.step,
            kind,
            nodes,
            concept: concept.cloned(),
        });
    }
}
