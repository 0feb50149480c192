use crate::trace::NodeId;

use super::tree::CompletionTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    NotBlocked,
    DirectlyBlocked { by: NodeId },
    IndirectlyBlocked,
}

impl BlockStatus {
    pub fn is_blocked(self) -> bool {
        !matches!(self, BlockStatus::NotBlocked)
    }

    pub fn is_indirect(self) -> bool {
        matches!(self, BlockStatus::IndirectlyBlocked)
    }
}

/// Blocking status of every node, indexed by node id.
///
/// Parents always have smaller ids than their children, so a single pass
/// in id order sees every ancestor's status first.
pub(crate) fn compute_blocking(tree: &CompletionTree) -> Vec<BlockStatus> {
    let mut out: Vec<BlockStatus> = Vec::with_capacity(tree.nodes.len());
    for (i, node) in tree.nodes.iter().enumerate() {
        let status = match node.parent {
            None => BlockStatus::NotBlocked,
            Some(p) if out[p.0].is_blocked() || node.edge.is_clear() => BlockStatus::IndirectlyBlocked,
            Some(p) => match blocker(tree, NodeId(i), p) {
                Some(y) => BlockStatus::DirectlyBlocked { by: y },
                None => BlockStatus::NotBlocked,
            },
        };
        out.push(status);
    }
    out
}

/// The nearest ancestor `y` (with parent `y'`) such that `L(x) = L(y)`,
/// `L(x') = L(y')` and the edges into `x` and `y` carry the same roles.
fn blocker(tree: &CompletionTree, x: NodeId, xp: NodeId) -> Option<NodeId> {
    let nx = tree.node(x);
    let nxp = tree.node(xp);
    let mut y = xp;
    while let Some(yp) = tree.node(y).parent {
        let ny = tree.node(y);
        if ny.label == nx.label && ny.edge == nx.edge && tree.node(yp).label == nxp.label {
            return Some(y);
        }
        y = yp;
    }
    None
}

impl CompletionTree {
    pub fn block_status(&self, x: NodeId) -> BlockStatus {
        compute_blocking(self)[x.0]
    }

    pub fn blocking(&self) -> Vec<BlockStatus> {
        compute_blocking(self)
    }
}
