//! The SHIQ completion-tree calculus.
//!
//! [`decide_sat`] runs the full search. The `apply_*` functions expose
//! single rule applications on a standalone tree, for inspection and tests.

mod blocking;
mod rules;
mod search;
mod tree;
mod validate;

pub use blocking::BlockStatus;
pub use search::{decide_sat, decide_sat_with, engine_bounds, EngineBounds};
pub use tree::{CompletionTree, TreeError};
pub use validate::{validate_completion_tree, TreeViolation};

use blocking::compute_blocking as blocking_of;
use rules::{apply_action, apply_generation, clash_at, deterministic_at, find_choose, find_generating, find_merge, find_or, Branch};
use crate::trace::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Progress {
    Changed,
    Fixpoint,
}

pub fn has_clash(tree: &CompletionTree, x: NodeId) -> bool {
    clash_at(tree, x).is_some()
}

/// Fires one pending ⊓-, ∀- or ∀₊-rule instance.
pub fn apply_deterministic(tree: &mut CompletionTree) -> Progress {
    let blocking = blocking_of(tree);
    let mut pending = Vec::new();
    for i in 0..tree.len() {
        if !blocking[i].is_indirect() {
            deterministic_at(tree, NodeId(i), &mut pending);
            if let Some(a) = pending.first() {
                tree.push_concept(a.node, a.concept, &mut Vec::new());
                return Progress::Changed;
            }
        }
    }
    Progress::Fixpoint
}

fn branch_out(tree: &CompletionTree, branch: Option<Branch>) -> Vec<CompletionTree> {
    let Some(branch) = branch else {
        return Vec::new();
    };
    branch
        .alternatives
        .iter()
        .map(|action| {
            let mut t = tree.clone();
            apply_action(&mut t, action, &mut Vec::new());
            t
        })
        .collect()
}

/// One choose- or ⊔-rule instance (choose first), as the list of trees its
/// alternatives produce. Empty when neither rule applies.
pub fn apply_nondeterministic(tree: &CompletionTree) -> Vec<CompletionTree> {
    let blocking = blocking_of(tree);
    let branch = find_choose(tree, &blocking).or_else(|| find_or(tree, &blocking));
    branch_out(tree, branch)
}

/// Fires one ∃- or ≥-rule instance.
pub fn apply_generating(tree: &mut CompletionTree) -> Progress {
    let blocking = blocking_of(tree);
    match find_generating(tree, &blocking) {
        Some(g) => {
            apply_generation(tree, &g, &mut Vec::new());
            Progress::Changed
        }
        None => Progress::Fixpoint,
    }
}

/// One ≤-rule instance, as the list of trees its merge choices produce.
pub fn apply_merge(tree: &CompletionTree) -> Vec<CompletionTree> {
    let blocking = blocking_of(tree);
    branch_out(tree, find_merge(tree, &blocking))
}
