use std::fmt;

use crate::syntax::{nnf, Concept, RoleBox};
use crate::trace::{NodeId, Rule};

use super::blocking::compute_blocking;
use super::rules::{
    clash_at, deterministic_at, find_choose, find_generating, find_merge, find_or, Clash,
};
use super::tree::CompletionTree;

/// The first condition a completion tree fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    /// The tree was built for a different concept or role box.
    WrongProblem,
    GoalMissing,
    Malformed { node: NodeId, reason: &'static str },
    Clash { node: NodeId, concept: Concept },
    Incomplete { node: NodeId, rule: Rule },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::WrongProblem => f.write_str("tree belongs to a different concept or role box"),
            TreeViolation::GoalMissing => f.write_str("goal concept missing from the root label"),
            TreeViolation::Malformed { node, reason } => write!(f, "malformed tree at {node}: {reason}"),
            TreeViolation::Clash { node, concept } => write!(f, "clash at {node} on {concept}"),
            TreeViolation::Incomplete { node, rule } => write!(f, "{rule}-rule still applicable at {node}"),
        }
    }
}

/// Checks that `tree` is a complete, clash-free completion tree for `d`.
pub fn validate_completion_tree(tree: &CompletionTree, d: &Concept, rbox: &RoleBox) -> Result<(), TreeViolation> {
    if *tree.goal() != nnf(d) || tree.rbox() != rbox {
        return Err(TreeViolation::WrongProblem);
    }
    tree.validate()
}

impl CompletionTree {
    /// [`validate_completion_tree`] against the tree's own goal.
    pub fn validate(&self) -> Result<(), TreeViolation> {
        self.check_shape()?;
        if !self.node(self.root()).label.contains(self.problem.goal) {
            return Err(TreeViolation::GoalMissing);
        }
        for x in self.node_ids() {
            if let Some(clash) = clash_at(self, x) {
                let (Clash::Atomic(c) | Clash::Counting(c)) = clash;
                return Err(TreeViolation::Clash {
                    node: x,
                    concept: self.problem.concepts.concepts[c].clone(),
                });
            }
        }
        let blocking = compute_blocking(self);
        let mut pending = Vec::new();
        for x in self.node_ids() {
            if !blocking[x.0].is_indirect() {
                deterministic_at(self, x, &mut pending);
                if let Some(a) = pending.first() {
                    return Err(TreeViolation::Incomplete { node: x, rule: a.rule });
                }
            }
        }
        let branch = find_choose(self, &blocking)
            .or_else(|| find_or(self, &blocking))
            .or_else(|| find_merge(self, &blocking));
        if let Some(b) = branch {
            return Err(TreeViolation::Incomplete {
                node: b.node,
                rule: b.rule,
            });
        }
        if let Some(g) = find_generating(self, &blocking) {
            return Err(TreeViolation::Incomplete {
                node: g.node,
                rule: g.rule,
            });
        }
        Ok(())
    }

    fn check_shape(&self) -> Result<(), TreeViolation> {
        let bad = |node, reason| Err(TreeViolation::Malformed { node, reason });
        if self.node(self.root()).parent.is_some() {
            return bad(self.root(), "root has a parent");
        }
        for x in self.node_ids().skip(1) {
            let n = self.node(x);
            let Some(p) = n.parent else {
                return bad(x, "second root");
            };
            if p >= x {
                return bad(x, "parent created after child");
            }
            if !self.children(p).contains(&x) {
                return bad(x, "missing from its parent's children");
            }
            if n.depth != self.depth(p) + 1 {
                return bad(x, "depth disagrees with parent");
            }
        }
        for &(a, b) in &self.distinct {
            if a >= b || !self.contains(b) {
                return bad(a, "inequality pair not stored as a proper ordered pair");
            }
        }
        Ok(())
    }
}
