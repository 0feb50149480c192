//! Depth-first search over the non-deterministic rules, undoing mutations
//! through the trail on backtrack.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Answer, BoundKind, EngineError, EngineOptions, EngineStats, Verdict};
use crate::syntax::{nnf, subconcepts, Concept, RoleBox};
use crate::table::{Problem, Shape};
use crate::trace::{EventKind, NodeId, Rule, Tracer};

use super::blocking::{compute_blocking, BlockStatus};
use super::rules::{
    apply_action, apply_generation, deterministic_at, find_choose, find_clash, find_generating, find_merge, find_or,
    Action, Addition, Branch, Generation,
};
use super::tree::{Change, CompletionTree};

/// Size limits a completion tree for `D` can never exceed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineBounds {
    /// `m · n_max`.
    pub max_out_degree: usize,
    /// `2^(2mk)`, saturating; counted in edges from the root.
    pub max_path_length: u128,
}

/// `m` is the size of the engine's concept table, `k` the number of roles
/// (inverses included) and `n_max` the largest number in a restriction,
/// or 1 when there is none.
pub fn engine_bounds(d: &Concept, rbox: &RoleBox) -> EngineBounds {
    bounds_of(&Problem::shiq(&nnf(d), rbox))
}

pub(crate) fn bounds_of(p: &Problem) -> EngineBounds {
    let m = p.concepts.len();
    let n_max = p
        .concepts
        .shapes
        .iter()
        .filter_map(|s| match *s {
            Shape::AtLeast(n, ..) | Shape::AtMost(n, ..) => Some(n as usize),
            _ => None,
        })
        .max()
        .unwrap_or(1)
        .max(1);
    let exp = 2 * m as u128 * p.roles.len() as u128;
    EngineBounds {
        max_out_degree: m * n_max,
        max_path_length: if exp >= 128 { u128::MAX } else { 1 << exp },
    }
}

/// Rejects number restrictions over roles that are transitive or have a
/// transitive sub-role.
/// Looks at the concept's own subconcepts, so the error names the
/// restriction as written rather than its negation.
pub(crate) fn check_simple(p: &Problem) -> Result<(), EngineError> {
    for c in &subconcepts(p.goal_concept()) {
        if let Concept::AtLeast(_, r, _) | Concept::AtMost(_, r, _) = c {
            if !p.rbox.is_simple(r) {
                return Err(EngineError::NonSimpleRoleInNumberRestriction {
                    role: r.clone(),
                    concept: c.clone(),
                });
            }
        }
    }
    Ok(())
}

pub fn decide_sat(d: &Concept, rbox: &RoleBox) -> Result<Verdict<CompletionTree>, EngineError> {
    decide_sat_with(d, rbox, &EngineOptions::default())
}

pub fn decide_sat_with(d: &Concept, rbox: &RoleBox, opts: &EngineOptions) -> Result<Verdict<CompletionTree>, EngineError> {
    let problem = Problem::shiq(&nnf(d), rbox);
    check_simple(&problem)?;
    let mut search = Search::new(Arc::new(problem), opts);
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
    Branch(Branch),
}

struct Frame {
    mark: usize,
    branch: Branch,
    next: usize,
}

struct Search {
    tree: CompletionTree,
    trail: Vec<Change>,
    frames: Vec<Frame>,
    stats: EngineStats,
    tracer: Tracer,
    bounds: EngineBounds,
    rng: Option<ChaCha8Rng>,
    choose_rule: bool,
    shown: Vec<BlockStatus>,
}

impl Search {
    fn new(problem: Arc<Problem>, opts: &EngineOptions) -> Self {
        let bounds = bounds_of(&problem);
        Search {
            tree: CompletionTree::from_problem(problem),
            trail: Vec::new(),
            frames: Vec::new(),
            stats: EngineStats {
                nodes_created: 1,
                ..Default::default()
            },
            tracer: Tracer::new(opts.trace),
            bounds,
            rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
            choose_rule: !opts.disable_choose_rule,
            shown: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<bool, EngineError> {
        let root = self.tree.root();
        let goal = self.tree.goal().clone();
        self.tracer.emit(EventKind::NodeCreated, vec![root], Some(&goal));
        loop {
            match self.saturate()? {
                Step::Complete => return Ok(true),
                Step::Clash => {
                    if !self.backtrack() {
                        return Ok(false);
                    }
                }
                Step::Branch(mut branch) => {
                    if let Some(rng) = &mut self.rng {
                        branch.alternatives.shuffle(rng);
                    }
                    let mark = self.trail.len();
                    let first = branch.alternatives[0];
                    self.fire(branch.rule, &first);
                    self.frames.push(Frame { mark, branch, next: 0 });
                }
            }
        }
    }

    /// Expands until the tree is complete, clashes, or a branch point is
    /// reached.
    fn saturate(&mut self) -> Result<Step, EngineError> {
        let mut pending: Vec<Addition> = Vec::new();
        loop {
            let blocking = loop {
                let blocking = compute_blocking(&self.tree);
                self.note_blocking(&blocking);
                if find_clash(&self.tree).is_some() {
                    return Ok(Step::Clash);
                }
                pending.clear();
                for x in self.tree.node_ids() {
                    if !blocking[x.0].is_indirect() {
                        deterministic_at(&self.tree, x, &mut pending);
                    }
                }
                if pending.is_empty() {
                    break blocking;
                }
                for a in &pending {
                    self.fire(a.rule, &Action::Add(*a));
                }
            };
            if self.choose_rule {
                if let Some(b) = find_choose(&self.tree, &blocking) {
                    return Ok(Step::Branch(b));
                }
            }
            if let Some(b) = find_or(&self.tree, &blocking) {
                return Ok(Step::Branch(b));
            }
            if let Some(b) = find_merge(&self.tree, &blocking) {
                return Ok(Step::Branch(b));
            }
            match find_generating(&self.tree, &blocking) {
                Some(g) => self.generate(&g)?,
                None => return Ok(Step::Complete),
            }
        }
    }

    fn fire(&mut self, rule: Rule, action: &Action) {
        let before = self.trail.len();
        apply_action(&mut self.tree, action, &mut self.trail);
        if self.trail.len() == before {
            return;
        }
        self.stats.fired(rule);
        if self.tracer.enabled() {
            match *action {
                Action::Add(a) => {
                    let c = self.tree.problem.concepts.concepts[a.concept].clone();
                    self.tracer.emit(EventKind::RuleFired(rule), vec![a.node], Some(&c));
                }
                Action::Merge { x, y, z } => {
                    self.tracer.emit(EventKind::RuleFired(rule), vec![x, y, z], None);
                }
            }
        }
    }

    fn generate(&mut self, g: &Generation) -> Result<(), EngineError> {
        let created = apply_generation(&mut self.tree, g, &mut self.trail);
        self.stats.fired(g.rule);
        self.stats.nodes_created += created.len();
        if self.tracer.enabled() {
            let c = self.tree.problem.concepts.concepts[g.concept].clone();
            self.tracer.emit(EventKind::RuleFired(g.rule), vec![g.node], Some(&c));
            let filler = self.tree.problem.concepts.concepts[g.filler].clone();
            for &y in &created {
                self.tracer.emit(EventKind::NodeCreated, vec![y, g.node], Some(&filler));
            }
        }
        let degree = self.tree.children(g.node).len();
        let depth = self.tree.depth(g.node) + 1;
        self.stats.max_out_degree = self.stats.max_out_degree.max(degree);
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if degree > self.bounds.max_out_degree {
            return Err(EngineError::BoundExceeded {
                kind: BoundKind::OutDegree,
                node: g.node,
                observed: degree as u128,
                limit: self.bounds.max_out_degree as u128,
            });
        }
        if depth as u128 > self.bounds.max_path_length {
            return Err(EngineError::BoundExceeded {
                kind: BoundKind::PathLength,
                node: created[0],
                observed: depth as u128,
                limit: self.bounds.max_path_length,
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

    /// Moves to the next untried alternative of the newest open branch
    /// point. False when every alternative has been exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(frame) = self.frames.last_mut() {
            frame.next += 1;
            let (mark, next) = (frame.mark, frame.next);
            let alternative = frame.branch.alternatives.get(next).copied();
            let (rule, node) = (frame.branch.rule, frame.branch.node);
            self.undo_to(mark);
            self.stats.backtracks += 1;
            self.tracer.emit(EventKind::Backtrack, vec![node], None);
            match alternative {
                Some(action) => {
                    self.fire(rule, &action);
                    return true;
                }
                None => {
                    self.frames.pop();
                }
            }
        }
        false
    }

    fn note_blocking(&mut self, blocking: &[BlockStatus]) {
        if !self.tracer.enabled() {
            return;
        }
        for (i, &now) in blocking.iter().enumerate() {
            let before = self.shown.get(i).copied().unwrap_or(BlockStatus::NotBlocked);
            if now == before {
                continue;
            }
            if let BlockStatus::DirectlyBlocked { by } = now {
                self.tracer.emit(EventKind::BlockEstablished, vec![NodeId(i), by], None);
            } else if let BlockStatus::DirectlyBlocked { .. } = before {
                self.tracer.emit(EventKind::BlockBroken, vec![NodeId(i)], None);
            }
        }
        self.shown = blocking.to_vec();
    }
}
