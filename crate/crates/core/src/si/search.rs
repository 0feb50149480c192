//! Rule application and backtracking search for the SI calculus.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Answer, BoundKind, EngineError, EngineOptions, EngineStats, Verdict};
use crate::syntax::{Concept, RoleBox};
use crate::table::{ConceptId, Problem, RoleId, Shape};
use crate::trace::{EventKind, NodeId, Rule, Tracer};

use super::tree::{si_problem, SiChange, SiTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiBlock {
    NotBlocked,
    /// `B(x) ⊆ L(y)` and `L(x)/Inv(S) = L(y)/Inv(S)` for the ancestor `y`.
    By(NodeId),
    /// Some ancestor is blocked.
    Inherited,
}

impl SiBlock {
    pub fn is_blocked(self) -> bool {
        self != SiBlock::NotBlocked
    }
}

/// Blocking status of every arena slot; dead nodes read as not blocked.
pub(crate) fn si_blocking(tree: &SiTree) -> Vec<SiBlock> {
    let inv = &tree.problem.roles.inv;
    let mut out = vec![SiBlock::NotBlocked; tree.nodes.len()];
    for x in tree.node_ids() {
        let node = tree.node(x);
        let (Some(p), Some(s)) = (node.parent, node.role) else {
            continue;
        };
        if out[p.0].is_blocked() {
            out[x.0] = SiBlock::Inherited;
            continue;
        }
        let own = tree.restricted(x, inv[s]);
        let mut y = Some(p);
        while let Some(a) = y {
            if node.b.is_subset(&tree.node(a).l) && tree.restricted(a, inv[s]) == own {
                out[x.0] = SiBlock::By(a);
                break;
            }
            y = tree.parent(a);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Target {
    /// Add to `L` only.
    L,
    /// Successor case of the ∀-rules: add to `L` and `B`.
    LB,
    /// Predecessor case: add to `L` of the parent.
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SiAddition {
    pub node: NodeId,
    pub concept: ConceptId,
    pub rule: Rule,
    pub target: Target,
}

/// Pending ⊓-, ∀- and ∀₊-rule additions triggered by concepts at `x`.
pub(crate) fn si_deterministic_at(tree: &SiTree, x: NodeId, out: &mut Vec<SiAddition>) {
    let concepts = &tree.problem.concepts;
    let roles = &tree.problem.roles;
    let label = &tree.node(x).l;
    for c in label.ones() {
        match concepts.shapes[c] {
            Shape::And(a, b) => {
                for part in [a, b] {
                    if !label.contains(part) {
                        out.push(SiAddition {
                            node: x,
                            concept: part,
                            rule: Rule::And,
                            target: Target::L,
                        });
                    }
                }
            }
            Shape::Forall(s, f) => {
                let mut push = |rule, concept| {
                    for y in tree.successors(x, s) {
                        if !tree.node(y).b.contains(concept) {
                            out.push(SiAddition {
                                node: y,
                                concept,
                                rule,
                                target: Target::LB,
                            });
                        }
                    }
                    if let Some(y) = tree.predecessor(x, s) {
                        if !tree.node(y).l.contains(concept) {
                            out.push(SiAddition {
                                node: y,
                                concept,
                                rule,
                                target: Target::Up,
                            });
                        }
                    }
                };
                push(Rule::Forall, f);
                if roles.transitive[s] {
                    push(Rule::ForallTrans, c);
                }
            }
            _ => {}
        }
    }
}

pub(crate) fn si_clash(tree: &SiTree) -> Option<(NodeId, ConceptId)> {
    tree.node_ids()
        .find_map(|x| tree.problem.atomic_clash(&tree.node(x).l).map(|c| (x, c)))
}

/// First open disjunction: `(node, disjuncts)`.
pub(crate) fn si_find_or(tree: &SiTree) -> Option<(NodeId, [ConceptId; 2])> {
    let shapes = &tree.problem.concepts.shapes;
    tree.node_ids().find_map(|x| {
        let label = &tree.node(x).l;
        label.ones().find_map(|c| match shapes[c] {
            Shape::Or(a, b) if !label.contains(a) && !label.contains(b) => Some((x, [a, b])),
            _ => None,
        })
    })
}

/// First existential at `x` with no witness: `(concept, role, filler)`.
pub(crate) fn pending_exists(tree: &SiTree, x: NodeId) -> Option<(ConceptId, RoleId, ConceptId)> {
    let node = tree.node(x);
    node.l.ones().find_map(|c| match tree.problem.concepts.shapes[c] {
        Shape::Exists(s, f)
            if !node.summary.contains(c)
                && !tree.neighbours_of(x, s).iter().any(|y| tree.node(*y).l.contains(f)) =>
        {
            Some((c, s, f))
        }
        _ => None,
    })
}

/// The node whose existential fires next: the oldest candidate, or in
/// trace mode the deepest (oldest among equals), so that each subtree is
/// finished before its siblings are started.
pub(crate) fn si_find_exists(
    tree: &SiTree,
    blocking: &[SiBlock],
    deepest: bool,
) -> Option<(NodeId, ConceptId, RoleId, ConceptId)> {
    let mut best: Option<(NodeId, ConceptId, RoleId, ConceptId)> = None;
    for x in tree.node_ids() {
        if blocking[x.0].is_blocked() {
            continue;
        }
        if let Some((c, s, f)) = pending_exists(tree, x) {
            if !deepest {
                return Some((x, c, s, f));
            }
            if best.is_none_or(|(b, ..)| tree.depth(x) > tree.depth(b)) {
                best = Some((x, c, s, f));
            }
        }
    }
    best
}

/// `m^4` with `m = |sub(D)|`.
pub(crate) fn path_limit(p: &Problem) -> u128 {
    (p.concepts.len() as u128).pow(4)
}

pub fn si_decide_sat(d: &Concept, rbox: &RoleBox) -> Result<Verdict<SiTree>, EngineError> {
    si_decide_sat_with(d, rbox, &EngineOptions::default())
}

/// The depth-first reset–restart variant.
pub fn si_decide_sat_trace(d: &Concept, rbox: &RoleBox) -> Result<Verdict<SiTree>, EngineError> {
    si_decide_sat_with(
        d,
        rbox,
        &EngineOptions {
            trace: true,
            ..Default::default()
        },
    )
}

pub fn si_decide_sat_with(d: &Concept, rbox: &RoleBox, opts: &EngineOptions) -> Result<Verdict<SiTree>, EngineError> {
    let problem = Arc::new(si_problem(d, rbox)?);
    let mut search = SiSearch::new(problem, opts);
    let sat = search.run()?;
    Ok(Verdict {
        answer: if sat { Answer::Sat } else { Answer::Unsat },
        witness: sat.then(|| search.tree.clone()),
        stats: search.stats,
        trace: search.tracer.events,
    })
}

enum Step {
    Complete,
    Clash,
    Branch(NodeId, Vec<ConceptId>),
}

struct Frame {
    mark: usize,
    node: NodeId,
    alternatives: Vec<ConceptId>,
    next: usize,
}

struct SiSearch {
    tree: SiTree,
    trail: Vec<SiChange>,
    frames: Vec<Frame>,
    stats: EngineStats,
    tracer: Tracer,
    trace_mode: bool,
    rng: Option<ChaCha8Rng>,
    limit: u128,
}

impl SiSearch {
    fn new(problem: Arc<Problem>, opts: &EngineOptions) -> Self {
        SiSearch {
            limit: path_limit(&problem),
            tree: SiTree::from_problem(problem),
            trail: Vec::new(),
            frames: Vec::new(),
            stats: EngineStats {
                nodes_created: 1,
                ..Default::default()
            },
            tracer: Tracer::new(opts.trace),
            trace_mode: opts.trace,
            rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
        }
    }

    fn concept(&self, c: ConceptId) -> Concept {
        self.tree.problem.concepts.concepts[c].clone()
    }

    fn run(&mut self) -> Result<bool, EngineError> {
        let goal = self.tree.goal().clone();
        self.tracer.emit(EventKind::NodeCreated, vec![self.tree.root()], Some(&goal));
        loop {
            match self.saturate()? {
                Step::Complete => return Ok(true),
                Step::Clash => {
                    if !self.backtrack() {
                        return Ok(false);
                    }
                }
                Step::Branch(node, mut alternatives) => {
                    if let Some(rng) = &mut self.rng {
                        alternatives.shuffle(rng);
                    }
                    let mark = self.trail.len();
                    self.choose(node, alternatives[0]);
                    self.frames.push(Frame {
                        mark,
                        node,
                        alternatives,
                        next: 0,
                    });
                }
            }
        }
    }

    fn saturate(&mut self) -> Result<Step, EngineError> {
        let mut pending = Vec::new();
        loop {
            loop {
                if si_clash(&self.tree).is_some() {
                    return Ok(Step::Clash);
                }
                pending.clear();
                for x in self.tree.node_ids() {
                    si_deterministic_at(&self.tree, x, &mut pending);
                }
                if pending.is_empty() {
                    break;
                }
                for a in &pending {
                    if self.add(a) {
                        // the pending list may mention deleted nodes
                        break;
                    }
                }
            }
            if let Some((x, [a, b])) = si_find_or(&self.tree) {
                return Ok(Step::Branch(x, vec![a, b]));
            }
            let blocking = si_blocking(&self.tree);
            match si_find_exists(&self.tree, &blocking, self.trace_mode) {
                Some((x, c, s, f)) => self.generate(x, c, s, f)?,
                None => return Ok(Step::Complete),
            }
        }
    }

    /// Applies one addition; true when it caused a reset.
    fn add(&mut self, a: &SiAddition) -> bool {
        if !self.tree.is_alive(a.node) {
            return false;
        }
        let changed = match a.target {
            Target::LB => self.tree.push_lb(a.node, a.concept, &mut self.trail),
            Target::L | Target::Up => self.tree.push_l(a.node, a.concept, &mut self.trail),
        };
        if !changed {
            return false;
        }
        self.stats.fired(a.rule);
        if self.tracer.enabled() {
            let c = self.concept(a.concept);
            self.tracer.emit(EventKind::RuleFired(a.rule), vec![a.node], Some(&c));
        }
        if a.target == Target::Up && self.trace_mode {
            let empty = self.tree.problem.concepts.empty_set();
            let dead = self.tree.cut(a.node, empty, &mut self.trail);
            self.stats.resets += 1;
            let mut nodes = vec![a.node];
            nodes.extend(dead);
            self.tracer.emit(EventKind::Reset, nodes, None);
            return true;
        }
        false
    }

    fn choose(&mut self, x: NodeId, c: ConceptId) {
        self.tree.push_l(x, c, &mut self.trail);
        self.stats.fired(Rule::Or);
        if self.tracer.enabled() {
            let concept = self.concept(c);
            self.tracer.emit(EventKind::RuleFired(Rule::Or), vec![x], Some(&concept));
        }
    }

    /// Folds the finished successors of `x` into its summary and commits
    /// to the choices made inside them.
    fn summarize(&mut self, x: NodeId) {
        let children = self.tree.children(x).to_vec();
        if children.is_empty() {
            return;
        }
        let concepts = &self.tree.problem.concepts;
        let node = self.tree.node(x);
        let mut summary: FixedBitSet = node.summary.clone();
        for c in node.l.ones() {
            if let Shape::Exists(s, f) = concepts.shapes[c] {
                if children
                    .iter()
                    .any(|&y| self.tree.node(y).role == Some(s) && self.tree.node(y).l.contains(f))
                {
                    summary.insert(c);
                }
            }
        }
        let oldest = children
            .iter()
            .map(|&y| self.tree.node(y).created_at)
            .min()
            .expect("children present");
        self.frames.retain(|f| f.mark < oldest);
        let dead = self.tree.cut(x, summary, &mut self.trail);
        self.stats.summaries += 1;
        let mut nodes = vec![x];
        nodes.extend(dead);
        self.tracer.emit(EventKind::Summarized, nodes, None);
    }

    fn generate(&mut self, x: NodeId, c: ConceptId, s: RoleId, f: ConceptId) -> Result<(), EngineError> {
        if self.trace_mode {
            self.summarize(x);
        }
        let y = self.tree.create_child(x, s, f, &mut self.trail);
        self.stats.fired(Rule::Exists);
        self.stats.nodes_created += 1;
        if self.tracer.enabled() {
            let (ec, fc) = (self.concept(c), self.concept(f));
            self.tracer.emit(EventKind::RuleFired(Rule::Exists), vec![x], Some(&ec));
            self.tracer.emit(EventKind::NodeCreated, vec![y, x], Some(&fc));
        }
        let depth = self.tree.depth(y);
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.stats.max_out_degree = self.stats.max_out_degree.max(self.tree.children(x).len());
        if depth as u128 > self.limit {
            return Err(EngineError::BoundExceeded {
                kind: BoundKind::PathLength,
                node: y,
                observed: depth as u128,
                limit: self.limit,
            });
        }
        Ok(())
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let change = self.trail.pop().expect("trail longer than mark");
            self.tree.undo(change);
        }
    }

    fn backtrack(&mut self) -> bool {
        while let Some(frame) = self.frames.last_mut() {
            frame.next += 1;
            let (mark, node) = (frame.mark, frame.node);
            let alternative = frame.alternatives.get(frame.next).copied();
            self.undo_to(mark);
            self.stats.backtracks += 1;
            self.tracer.emit(EventKind::Backtrack, vec![node], None);
            match alternative {
                Some(c) => {
                    self.choose(node, c);
                    return true;
                }
                None => {
                    self.frames.pop();
                }
            }
        }
        false
    }
}
