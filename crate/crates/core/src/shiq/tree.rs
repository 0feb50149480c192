use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::syntax::{nnf, Concept, Role, RoleBox};
use crate::table::{ConceptId, Problem, RoleId};
use crate::trace::NodeId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("concept {0} is not in the closure of the goal")]
    NotInClosure(Concept),
    #[error("role {0} is not part of the problem's role set")]
    UnknownRole(Role),
    #[error("no node {0}")]
    UnknownNode(NodeId),
    #[error("a node cannot be distinct from itself ({0})")]
    Reflexive(NodeId),
}

#[derive(Clone, Debug)]
pub(crate) struct TreeNode {
    pub parent: Option<NodeId>,
    /// Roles on the edge from the parent.
    pub edge: FixedBitSet,
    pub label: FixedBitSet,
    pub children: Vec<NodeId>,
    pub depth: usize,
}

/// One reversible mutation, recorded so that backtracking can undo it.
#[derive(Clone, Debug)]
pub(crate) enum Change {
    Label(NodeId, ConceptId),
    Edge(NodeId, RoleId),
    EdgeCleared(NodeId, FixedBitSet),
    Created(NodeId),
    Distinct(NodeId, NodeId),
}

/// A SHIQ completion tree: node labels over the closure of the goal,
/// role-set edge labels, and the explicit inequality relation `≠`.
#[derive(Clone, Debug)]
pub struct CompletionTree {
    pub(crate) problem: Arc<Problem>,
    pub(crate) nodes: Vec<TreeNode>,
    /// Stored with the smaller id first.
    pub(crate) distinct: BTreeSet<(NodeId, NodeId)>,
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CompletionTree {
    /// The initial tree: a single root labelled with `nnf(d)`.
    pub fn new(d: &Concept, rbox: &RoleBox) -> Self {
        Self::from_problem(Arc::new(Problem::shiq(&nnf(d), rbox)))
    }

    pub(crate) fn from_problem(problem: Arc<Problem>) -> Self {
        let mut label = problem.concepts.empty_set();
        label.insert(problem.goal);
        let root = TreeNode {
            parent: None,
            edge: problem.roles.empty_set(),
            label,
            children: Vec::new(),
            depth: 0,
        };
        CompletionTree {
            problem,
            nodes: vec![root],
            distinct: BTreeSet::new(),
        }
    }

    pub fn goal(&self) -> &Concept {
        self.problem.goal_concept()
    }

    pub fn rbox(&self) -> &RoleBox {
        &self.problem.rbox
    }

    /// Concepts a node label may draw from.
    pub fn closure(&self) -> &[Concept] {
        &self.problem.concepts.concepts
    }

    /// Roles an edge label may draw from.
    pub fn role_set(&self) -> &[Role] {
        &self.problem.roles.roles
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn contains(&self, x: NodeId) -> bool {
        x.0 < self.nodes.len()
    }

    pub(crate) fn node(&self, x: NodeId) -> &TreeNode {
        &self.nodes[x.0]
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.node(x).parent
    }

    pub fn children(&self, x: NodeId) -> &[NodeId] {
        &self.node(x).children
    }

    pub fn depth(&self, x: NodeId) -> usize {
        self.node(x).depth
    }

    pub fn label(&self, x: NodeId) -> Vec<&Concept> {
        self.node(x)
            .label
            .ones()
            .map(|c| &self.problem.concepts.concepts[c])
            .collect()
    }

    pub fn label_contains(&self, x: NodeId, c: &Concept) -> bool {
        self.problem
            .concepts
            .id(c)
            .is_some_and(|id| self.node(x).label.contains(id))
    }

    /// Roles on the edge into `x` from its parent.
    pub fn edge_roles(&self, x: NodeId) -> Vec<&Role> {
        self.node(x)
            .edge
            .ones()
            .map(|r| &self.problem.roles.roles[r])
            .collect()
    }

    pub fn is_distinct(&self, a: NodeId, b: NodeId) -> bool {
        self.distinct.contains(&ordered(a, b))
    }

    pub fn distinct_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.distinct.iter().copied()
    }

    /// `a` is a proper ancestor of `x`.
    pub fn is_ancestor(&self, a: NodeId, x: NodeId) -> bool {
        let mut cur = self.parent(x);
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent(p);
        }
        false
    }

    /// The `r`-neighbours of `x`: `r`-successors, plus the parent when `x`
    /// is an `Inv(r)`-successor of it.
    pub fn neighbours(&self, x: NodeId, r: &Role) -> Vec<NodeId> {
        match self.problem.roles.id(r) {
            Some(id) => self.neighbours_of(x, id),
            None => Vec::new(),
        }
    }

    pub(crate) fn neighbours_of(&self, x: NodeId, r: RoleId) -> Vec<NodeId> {
        let roles = &self.problem.roles;
        let node = self.node(x);
        let mut out = Vec::new();
        if let Some(p) = node.parent {
            if roles.edge_matches(&node.edge, roles.inv[r]) {
                out.push(p);
            }
        }
        for &c in &node.children {
            if roles.edge_matches(&self.node(c).edge, r) {
                out.push(c);
            }
        }
        out
    }

    fn concept_id(&self, c: &Concept) -> Result<ConceptId, TreeError> {
        self.problem
            .concepts
            .id(c)
            .ok_or_else(|| TreeError::NotInClosure(c.clone()))
    }

    fn role_id(&self, r: &Role) -> Result<RoleId, TreeError> {
        self.problem.roles.id(r).ok_or_else(|| TreeError::UnknownRole(r.clone()))
    }

    fn check_node(&self, x: NodeId) -> Result<(), TreeError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(TreeError::UnknownNode(x))
        }
    }

    // Direct construction, used for hand-built trees and witness files.

    pub fn add_child(&mut self, parent: NodeId, roles: &[Role], label: &[Concept]) -> Result<NodeId, TreeError> {
        self.check_node(parent)?;
        let mut edge = self.problem.roles.empty_set();
        for r in roles {
            edge.insert(self.role_id(r)?);
        }
        let mut set = self.problem.concepts.empty_set();
        for c in label {
            set.insert(self.concept_id(c)?);
        }
        let id = NodeId(self.nodes.len());
        let depth = self.node(parent).depth + 1;
        self.nodes.push(TreeNode {
            parent: Some(parent),
            edge,
            label: set,
            children: Vec::new(),
            depth,
        });
        self.nodes[parent.0].children.push(id);
        Ok(id)
    }

    pub fn add_concept(&mut self, x: NodeId, c: &Concept) -> Result<bool, TreeError> {
        self.check_node(x)?;
        let id = self.concept_id(c)?;
        Ok(!self.nodes[x.0].label.put(id))
    }

    /// Replaces the label of the edge into `x`.
    pub fn set_edge(&mut self, x: NodeId, roles: &[Role]) -> Result<(), TreeError> {
        self.check_node(x)?;
        let mut edge = self.problem.roles.empty_set();
        for r in roles {
            edge.insert(self.role_id(r)?);
        }
        self.nodes[x.0].edge = edge;
        Ok(())
    }

    pub fn set_distinct(&mut self, a: NodeId, b: NodeId) -> Result<(), TreeError> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(TreeError::Reflexive(a));
        }
        self.distinct.insert(ordered(a, b));
        Ok(())
    }

    // Trail-recorded mutations used by the search.

    pub(crate) fn push_concept(&mut self, x: NodeId, c: ConceptId, trail: &mut Vec<Change>) -> bool {
        if self.nodes[x.0].label.put(c) {
            return false;
        }
        trail.push(Change::Label(x, c));
        true
    }

    pub(crate) fn push_edge_role(&mut self, x: NodeId, r: RoleId, trail: &mut Vec<Change>) -> bool {
        if self.nodes[x.0].edge.put(r) {
            return false;
        }
        trail.push(Change::Edge(x, r));
        true
    }

    pub(crate) fn clear_edge(&mut self, x: NodeId, trail: &mut Vec<Change>) {
        let old = std::mem::replace(&mut self.nodes[x.0].edge, self.problem.roles.empty_set());
        trail.push(Change::EdgeCleared(x, old));
    }

    pub(crate) fn create_child(&mut self, parent: NodeId, role: RoleId, c: ConceptId, trail: &mut Vec<Change>) -> NodeId {
        let mut edge = self.problem.roles.empty_set();
        edge.insert(role);
        let mut label = self.problem.concepts.empty_set();
        label.insert(c);
        let id = NodeId(self.nodes.len());
        let depth = self.node(parent).depth + 1;
        self.nodes.push(TreeNode {
            parent: Some(parent),
            edge,
            label,
            children: Vec::new(),
            depth,
        });
        self.nodes[parent.0].children.push(id);
        trail.push(Change::Created(id));
        id
    }

    pub(crate) fn push_distinct(&mut self, a: NodeId, b: NodeId, trail: &mut Vec<Change>) -> bool {
        debug_assert_ne!(a, b);
        let pair = ordered(a, b);
        if self.distinct.insert(pair) {
            trail.push(Change::Distinct(pair.0, pair.1));
            true
        } else {
            false
        }
    }

    pub(crate) fn undo(&mut self, change: Change) {
        match change {
            Change::Label(x, c) => self.nodes[x.0].label.set(c, false),
            Change::Edge(x, r) => self.nodes[x.0].edge.set(r, false),
            Change::EdgeCleared(x, old) => self.nodes[x.0].edge = old,
            Change::Created(x) => {
                debug_assert_eq!(x.0 + 1, self.nodes.len());
                let node = self.nodes.pop().expect("created node present");
                if let Some(p) = node.parent {
                    let popped = self.nodes[p.0].children.pop();
                    debug_assert_eq!(popped, Some(x));
                }
            }
            Change::Distinct(a, b) => {
                self.distinct.remove(&(a, b));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::close_hierarchy;

    fn a() -> Concept {
        Concept::atom("A")
    }

    #[test]
    fn successor_and_predecessor_neighbours() {
        let rb = close_hierarchy(Vec::<&str>::new(), [(Role::named("F"), Role::named("R"))]);
        let d = Concept::and(Concept::exists(Role::named("F"), a()), Concept::exists(Role::named("R"), a()));
        let mut t = CompletionTree::new(&d, &rb);
        let y = t.add_child(t.root(), &[Role::named("F")], &[a()]).unwrap();
        assert_eq!(t.neighbours(t.root(), &Role::named("R")), vec![y]);
        assert_eq!(t.neighbours(t.root(), &Role::named("F")), vec![y]);
        assert_eq!(t.neighbours(y, &Role::inverse_of("R")), vec![t.root()]);
        assert!(t.neighbours(y, &Role::named("R")).is_empty());

        t.set_edge(y, &[]).unwrap();
        assert!(t.neighbours(t.root(), &Role::named("R")).is_empty());
    }

    #[test]
    fn trail_undo_restores_state() {
        let d = Concept::exists(Role::named("R"), a());
        let mut t = CompletionTree::new(&d, &RoleBox::empty());
        let before = format!("{:?}", (t.nodes.len(), &t.distinct));
        let mut trail = Vec::new();
        let r = t.problem.roles.id(&Role::named("R")).unwrap();
        let ca = t.problem.concepts.id(&a()).unwrap();
        let y = t.create_child(t.root(), r, ca, &mut trail);
        let z = t.create_child(t.root(), r, ca, &mut trail);
        t.push_distinct(y, z, &mut trail);
        t.clear_edge(z, &mut trail);
        assert!(t.is_distinct(z, y));
        while let Some(c) = trail.pop() {
            t.undo(c);
        }
        assert_eq!(before, format!("{:?}", (t.nodes.len(), &t.distinct)));
        assert!(t.children(t.root()).is_empty());
    }

    #[test]
    fn builder_rejects_foreign_concepts() {
        let mut t = CompletionTree::new(&a(), &RoleBox::empty());
        assert_eq!(
            t.add_concept(t.root(), &Concept::atom("B")),
            Err(TreeError::NotInClosure(Concept::atom("B")))
        );
        assert_eq!(t.set_distinct(t.root(), t.root()), Err(TreeError::Reflexive(NodeId(0))));
    }
}
