//! Types shared by the SHIQ and SI engines.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Concept, Role};
use crate::trace::{NodeId, Rule, TraceEvent};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Record a [`TraceEvent`] stream. For the SI engine this also selects
    /// the depth-first reset–restart discipline.
    pub trace: bool,
    /// Permutes the order in which branch alternatives are tried.
    pub seed: Option<u64>,
    /// Test-only: run without the choose-rule. Unsound.
    #[doc(hidden)]
    pub disable_choose_rule: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Sat => "SAT",
            Answer::Unsat => "UNSAT",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub rule_firings: BTreeMap<Rule, u64>,
    pub nodes_created: usize,
    pub max_depth: usize,
    pub max_out_degree: usize,
    pub backtracks: usize,
    /// SI trace mode: successor deletions caused by upward propagation.
    pub resets: usize,
    /// SI trace mode: finished subtrees folded into their parent.
    pub summaries: usize,
}

impl EngineStats {
    pub fn firings(&self, rule: Rule) -> u64 {
        self.rule_firings.get(&rule).copied().unwrap_or(0)
    }

    pub(crate) fn fired(&mut self, rule: Rule) {
        *self.rule_firings.entry(rule).or_default() += 1;
    }
}

#[derive(Clone, Debug)]
pub struct Verdict<W> {
    pub answer: Answer,
    /// The complete, clash-free tree when the answer is SAT.
    pub witness: Option<W>,
    pub stats: EngineStats,
    pub trace: Vec<TraceEvent>,
}

impl<W> Verdict<W> {
    pub fn is_sat(&self) -> bool {
        self.answer == Answer::Sat
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    OutDegree,
    PathLength,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::OutDegree => "out-degree",
            BoundKind::PathLength => "path length",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("number restriction {concept} uses the non-simple role {role}")]
    NonSimpleRoleInNumberRestriction { role: Role, concept: Concept },
    #[error("{kind} bound exceeded at {node}: {observed} > {limit}")]
    BoundExceeded {
        kind: BoundKind,
        node: NodeId,
        observed: u128,
        limit: u128,
    },
    #[error("the SI engine does not handle number restrictions: {0}")]
    NumberRestrictionInSi(Concept),
    #[error("the SI engine does not handle role hierarchies")]
    HierarchyInSi,
}
