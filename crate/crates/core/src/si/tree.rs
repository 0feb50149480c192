use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::engine::EngineError;
use crate::syntax::{nnf, Concept, Role, RoleBox};
use crate::table::{ConceptId, Problem, RoleId, Shape};
use crate::trace::NodeId;

#[derive(Clone, Debug)]
pub(crate) struct SiNode {
    pub parent: Option<NodeId>,
    /// Role on the edge from the parent; `None` only at the root.
    pub role: Option<RoleId>,
    pub l: FixedBitSet,
    pub b: FixedBitSet,
    pub children: Vec<NodeId>,
    pub depth: usize,
    pub alive: bool,
    /// The filler of the existential that generated this node.
    pub generator: Option<ConceptId>,
    /// Trace mode: existentials of this node satisfied by successors that
    /// were folded away.
    pub summary: FixedBitSet,
    /// Trail length just after this node was created.
    pub created_at: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum SiChange {
    L(NodeId, ConceptId),
    B(NodeId, ConceptId),
    Created(NodeId),
    /// The successors of a node were removed (reset or summary).
    Cut {
        node: NodeId,
        children: Vec<NodeId>,
        summary: FixedBitSet,
    },
}

/// A completion tree of the SI calculus: two labels `B(x) ⊆ L(x)` over
/// `sub(D)` and one role per edge.
///
/// In trace mode nodes are deleted by resets and summaries; they stay in
/// the arena, marked dead, so that backtracking can revive them.
#[derive(Clone, Debug)]
pub struct SiTree {
    pub(crate) problem: Arc<Problem>,
    pub(crate) nodes: Vec<SiNode>,
}

/// Rejects inputs outside SI: number restrictions and role hierarchies.
pub(crate) fn si_problem(d: &Concept, rbox: &RoleBox) -> Result<Problem, EngineError> {
    if rbox.has_hierarchy() {
        return Err(EngineError::HierarchyInSi);
    }
    let problem = Problem::si(&nnf(d), rbox);
    if let Some(c) = problem
        .concepts
        .concepts
        .iter()
        .find(|c| matches!(c, Concept::AtLeast(..) | Concept::AtMost(..)))
    {
        return Err(EngineError::NumberRestrictionInSi(c.clone()));
    }
    Ok(problem)
}

impl SiTree {
    /// The initial tree: a root with `B = L = {nnf(d)}`.
    pub fn new(d: &Concept, rbox: &RoleBox) -> Result<Self, EngineError> {
        Ok(Self::from_problem(Arc::new(si_problem(d, rbox)?)))
    }

    pub(crate) fn from_problem(problem: Arc<Problem>) -> Self {
        let mut l = problem.concepts.empty_set();
        l.insert(problem.goal);
        let root = SiNode {
            parent: None,
            role: None,
            b: l.clone(),
            l,
            children: Vec::new(),
            depth: 0,
            alive: true,
            generator: None,
            summary: problem.concepts.empty_set(),
            created_at: 0,
        };
        SiTree {
            problem,
            nodes: vec![root],
        }
    }

    pub fn goal(&self) -> &Concept {
        self.problem.goal_concept()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Live nodes in creation order.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].alive).map(NodeId)
    }

    pub fn len(&self) -> usize {
        self.node_ids().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_alive(&self, x: NodeId) -> bool {
        self.nodes.get(x.0).is_some_and(|n| n.alive)
    }

    pub(crate) fn node(&self, x: NodeId) -> &SiNode {
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

    pub fn edge_role(&self, x: NodeId) -> Option<&Role> {
        self.node(x).role.map(|r| &self.problem.roles.roles[r])
    }

    fn concepts_of<'a>(&'a self, set: &'a FixedBitSet) -> Vec<&'a Concept> {
        set.ones().map(|c| &self.problem.concepts.concepts[c]).collect()
    }

    pub fn l_label(&self, x: NodeId) -> Vec<&Concept> {
        self.concepts_of(&self.node(x).l)
    }

    pub fn b_label(&self, x: NodeId) -> Vec<&Concept> {
        self.concepts_of(&self.node(x).b)
    }

    /// Existentials of `x` satisfied by deleted, already verified successors.
    pub fn summary(&self, x: NodeId) -> Vec<&Concept> {
        self.concepts_of(&self.node(x).summary)
    }

    pub fn generator(&self, x: NodeId) -> Option<&Concept> {
        self.node(x).generator.map(|c| &self.problem.concepts.concepts[c])
    }

    pub fn l_contains(&self, x: NodeId, c: &Concept) -> bool {
        self.problem.concepts.id(c).is_some_and(|id| self.node(x).l.contains(id))
    }

    pub fn b_contains(&self, x: NodeId, c: &Concept) -> bool {
        self.problem.concepts.id(c).is_some_and(|id| self.node(x).b.contains(id))
    }

    /// `y` is an `s`-successor of `x`.
    pub(crate) fn successors(&self, x: NodeId, s: RoleId) -> impl Iterator<Item = NodeId> + '_ {
        self.node(x)
            .children
            .iter()
            .copied()
            .filter(move |&y| self.node(y).role == Some(s))
    }

    /// The parent of `x` when it is an `s`-predecessor, i.e. `x` is an
    /// `Inv(s)`-successor of it.
    pub(crate) fn predecessor(&self, x: NodeId, s: RoleId) -> Option<NodeId> {
        let n = self.node(x);
        n.parent.filter(|_| n.role == Some(self.problem.roles.inv[s]))
    }

    pub(crate) fn neighbours_of(&self, x: NodeId, s: RoleId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.predecessor(x, s).into_iter().collect();
        out.extend(self.successors(x, s));
        out
    }

    /// The `s`-neighbours of `x`.
    pub fn neighbours(&self, x: NodeId, s: &Role) -> Vec<NodeId> {
        match self.problem.roles.id(s) {
            Some(id) => self.neighbours_of(x, id),
            None => Vec::new(),
        }
    }

    /// `L(x)/r`: the universal restrictions over `r` in `L(x)`.
    pub(crate) fn restricted(&self, x: NodeId, r: RoleId) -> FixedBitSet {
        let shapes = &self.problem.concepts.shapes;
        let mut out = self.problem.concepts.empty_set();
        for c in self.node(x).l.ones() {
            if matches!(shapes[c], Shape::Forall(s, _) if s == r) {
                out.insert(c);
            }
        }
        out
    }

    // Trail-recorded mutations.

    pub(crate) fn push_l(&mut self, x: NodeId, c: ConceptId, trail: &mut Vec<SiChange>) -> bool {
        if self.nodes[x.0].l.put(c) {
            return false;
        }
        trail.push(SiChange::L(x, c));
        true
    }

    /// Adds `c` to both `L(x)` and `B(x)`.
    pub(crate) fn push_lb(&mut self, x: NodeId, c: ConceptId, trail: &mut Vec<SiChange>) -> bool {
        let added_l = self.push_l(x, c, trail);
        let added_b = !self.nodes[x.0].b.put(c);
        if added_b {
            trail.push(SiChange::B(x, c));
        }
        debug_assert!(self.nodes[x.0].b.is_subset(&self.nodes[x.0].l));
        added_l || added_b
    }

    pub(crate) fn create_child(
        &mut self,
        parent: NodeId,
        role: RoleId,
        filler: ConceptId,
        trail: &mut Vec<SiChange>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        let mut l = self.problem.concepts.empty_set();
        l.insert(filler);
        self.nodes.push(SiNode {
            parent: Some(parent),
            role: Some(role),
            b: l.clone(),
            l,
            children: Vec::new(),
            depth: self.node(parent).depth + 1,
            alive: true,
            generator: Some(filler),
            summary: self.problem.concepts.empty_set(),
            created_at: trail.len() + 1,
        });
        self.nodes[parent.0].children.push(id);
        trail.push(SiChange::Created(id));
        id
    }

    /// Removes every successor of `x` and replaces its summary. Returns the
    /// nodes that died, in creation order.
    pub(crate) fn cut(&mut self, x: NodeId, summary: FixedBitSet, trail: &mut Vec<SiChange>) -> Vec<NodeId> {
        let children = std::mem::take(&mut self.nodes[x.0].children);
        let old = std::mem::replace(&mut self.nodes[x.0].summary, summary);
        let mut dead = Vec::new();
        let mut stack = children.clone();
        while let Some(y) = stack.pop() {
            self.nodes[y.0].alive = false;
            dead.push(y);
            stack.extend(self.nodes[y.0].children.iter().copied());
        }
        dead.sort();
        trail.push(SiChange::Cut {
            node: x,
            children,
            summary: old,
        });
        dead
    }

    pub(crate) fn undo(&mut self, change: SiChange) {
        match change {
            SiChange::L(x, c) => self.nodes[x.0].l.set(c, false),
            SiChange::B(x, c) => self.nodes[x.0].b.set(c, false),
            SiChange::Created(x) => {
                debug_assert_eq!(x.0 + 1, self.nodes.len());
                let node = self.nodes.pop().expect("created node present");
                if let Some(p) = node.parent {
                    let popped = self.nodes[p.0].children.pop();
                    debug_assert_eq!(popped, Some(x));
                }
            }
            SiChange::Cut { node, children, summary } => {
                self.nodes[node.0].summary = summary;
                let mut stack = children.clone();
                while let Some(y) = stack.pop() {
                    self.nodes[y.0].alive = true;
                    stack.extend(self.nodes[y.0].children.iter().copied());
                }
                self.nodes[node.0].children = children;
            }
        }
    }
}
