//! Rule instances of the SHIQ calculus, found over a tree and its blocking
//! status and applied through the trail.

use fixedbitset::FixedBitSet;

use crate::table::{ConceptId, RoleId, Shape};
use crate::trace::{NodeId, Rule};

use super::blocking::BlockStatus;
use super::tree::{Change, CompletionTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Addition {
    pub node: NodeId,
    pub concept: ConceptId,
    pub rule: Rule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Action {
    Add(Addition),
    /// Merge `y` into `z`, both neighbours of `x`.
    Merge { x: NodeId, y: NodeId, z: NodeId },
}

#[derive(Clone, Debug)]
pub(crate) struct Branch {
    pub rule: Rule,
    pub node: NodeId,
    pub alternatives: Vec<Action>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Generation {
    pub node: NodeId,
    pub concept: ConceptId,
    pub rule: Rule,
    pub role: RoleId,
    pub filler: ConceptId,
    pub count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Clash {
    /// `⊥`, or `¬A` together with `A`; holds the offending concept.
    Atomic(ConceptId),
    /// An at-most restriction with too many pairwise distinct neighbours.
    Counting(ConceptId),
}

/// `S`-neighbours of `x` whose label holds `c`.
pub(crate) fn neighbours_with(tree: &CompletionTree, x: NodeId, s: RoleId, c: ConceptId) -> Vec<NodeId> {
    tree.neighbours_of(x, s)
        .into_iter()
        .filter(|y| tree.node(*y).label.contains(c))
        .collect()
}

/// Are there `k` pairwise distinct nodes among `cands`?
pub(crate) fn has_distinct_clique(tree: &CompletionTree, cands: &[NodeId], k: usize) -> bool {
    fn extend(tree: &CompletionTree, cands: &[NodeId], chosen: &mut Vec<NodeId>, start: usize, k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        if cands.len() - start < k - chosen.len() {
            return false;
        }
        for i in start..cands.len() {
            let y = cands[i];
            if chosen.iter().all(|&z| tree.is_distinct(y, z)) {
                chosen.push(y);
                if extend(tree, cands, chosen, i + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if k == 0 {
        return true;
    }
    extend(tree, cands, &mut Vec::with_capacity(k), 0, k)
}

pub(crate) fn clash_at(tree: &CompletionTree, x: NodeId) -> Option<Clash> {
    let label = &tree.node(x).label;
    if let Some(c) = tree.problem.atomic_clash(label) {
        return Some(Clash::Atomic(c));
    }
    let shapes = &tree.problem.concepts.shapes;
    label.ones().find_map(|c| match shapes[c] {
        Shape::AtMost(n, s, f) => {
            let cands = neighbours_with(tree, x, s, f);
            (cands.len() > n as usize && has_distinct_clique(tree, &cands, n as usize + 1))
                .then_some(Clash::Counting(c))
        }
        _ => None,
    })
}

pub(crate) fn find_clash(tree: &CompletionTree) -> Option<(NodeId, Clash)> {
    tree.node_ids().find_map(|x| clash_at(tree, x).map(|c| (x, c)))
}

/// Pending ⊓-, ∀- and ∀₊-rule additions triggered by concepts at `x`.
pub(crate) fn deterministic_at(tree: &CompletionTree, x: NodeId, out: &mut Vec<Addition>) {
    let concepts = &tree.problem.concepts;
    let label = &tree.node(x).label;
    let missing = |y: NodeId, c: ConceptId| !tree.node(y).label.contains(c);
    for c in label.ones() {
        match concepts.shapes[c] {
            Shape::And(a, b) => {
                for part in [a, b] {
                    if !label.contains(part) {
                        out.push(Addition {
                            node: x,
                            concept: part,
                            rule: Rule::And,
                        });
                    }
                }
            }
            Shape::Or(a, b) if !label.contains(a) && !label.contains(b) => {
                // a disjunct that would clash on the spot leaves no choice
                let refuted = |d: ConceptId| match concepts.shapes[d] {
                    Shape::Bottom => true,
                    Shape::Atom | Shape::NegAtom => concepts.negation[d].is_some_and(|n| label.contains(n)),
                    _ => false,
                };
                let forced = match (refuted(a), refuted(b)) {
                    (true, false) => Some(b),
                    (false, true) => Some(a),
                    // both clash: either one exposes it
                    (true, true) => Some(a),
                    (false, false) => None,
                };
                if let Some(concept) = forced {
                    out.push(Addition {
                        node: x,
                        concept,
                        rule: Rule::Or,
                    });
                }
            }
            Shape::Forall(s, f) => {
                for y in tree.neighbours_of(x, s) {
                    if missing(y, f) {
                        out.push(Addition {
                            node: y,
                            concept: f,
                            rule: Rule::Forall,
                        });
                    }
                }
                for &(r, g) in &concepts.plus[c] {
                    for y in tree.neighbours_of(x, r) {
                        if missing(y, g) {
                            out.push(Addition {
                                node: y,
                                concept: g,
                                rule: Rule::ForallTrans,
                            });
                        }
                    }
                }
            }
            _ => {}
        }
    }
}

pub(crate) fn find_choose(tree: &CompletionTree, blocking: &[BlockStatus]) -> Option<Branch> {
    let concepts = &tree.problem.concepts;
    for x in tree.node_ids() {
        if blocking[x.0].is_indirect() {
            continue;
        }
        for c in tree.node(x).label.ones() {
            let (s, f) = match concepts.shapes[c] {
                Shape::AtMost(_, s, f) | Shape::AtLeast(_, s, f) => (s, f),
                _ => continue,
            };
            let Some(nf) = concepts.negation[f] else { continue };
            for y in tree.neighbours_of(x, s) {
                let l = &tree.node(y).label;
                if !l.contains(f) && !l.contains(nf) {
                    let add = |concept| {
                        Action::Add(Addition {
                            node: y,
                            concept,
                            rule: Rule::Choose,
                        })
                    };
                    return Some(Branch {
                        rule: Rule::Choose,
                        node: x,
                        alternatives: vec![add(f), add(nf)],
                    });
                }
            }
        }
    }
    None
}

pub(crate) fn find_or(tree: &CompletionTree, blocking: &[BlockStatus]) -> Option<Branch> {
    let concepts = &tree.problem.concepts;
    for x in tree.node_ids() {
        if blocking[x.0].is_indirect() {
            continue;
        }
        let label = &tree.node(x).label;
        for c in label.ones() {
            if let Shape::Or(a, b) = concepts.shapes[c] {
                if !label.contains(a) && !label.contains(b) {
                    let add = |concept| {
                        Action::Add(Addition {
                            node: x,
                            concept,
                            rule: Rule::Or,
                        })
                    };
                    return Some(Branch {
                        rule: Rule::Or,
                        node: x,
                        alternatives: vec![add(a), add(b)],
                    });
                }
            }
        }
    }
    None
}

/// Merge candidates for an at-most restriction at `x`. Each unordered pair
/// is offered once: the parent absorbs a child, and among two children the
/// younger is merged into the older.
fn merge_pairs(tree: &CompletionTree, x: NodeId, cands: &[NodeId]) -> Vec<Action> {
    let parent = tree.parent(x);
    let mut out = Vec::new();
    if let Some(p) = parent.filter(|p| cands.contains(p)) {
        for &y in cands {
            if y != p && !tree.is_distinct(y, p) {
                out.push(Action::Merge { x, y, z: p });
            }
        }
    }
    let mut children: Vec<NodeId> = cands.iter().copied().filter(|&c| Some(c) != parent).collect();
    children.sort();
    for (i, &z) in children.iter().enumerate() {
        for &y in &children[i + 1..] {
            if !tree.is_distinct(y, z) {
                out.push(Action::Merge { x, y, z });
            }
        }
    }
    out
}

pub(crate) fn find_merge(tree: &CompletionTree, blocking: &[BlockStatus]) -> Option<Branch> {
    let concepts = &tree.problem.concepts;
    for x in tree.node_ids() {
        if blocking[x.0].is_indirect() {
            continue;
        }
        for c in tree.node(x).label.ones() {
            if let Shape::AtMost(n, s, f) = concepts.shapes[c] {
                let cands = neighbours_with(tree, x, s, f);
                if cands.len() <= n as usize {
                    continue;
                }
                let alternatives = merge_pairs(tree, x, &cands);
                if !alternatives.is_empty() {
                    return Some(Branch {
                        rule: Rule::AtMost,
                        node: x,
                        alternatives,
                    });
                }
            }
        }
    }
    None
}

pub(crate) fn find_generating(tree: &CompletionTree, blocking: &[BlockStatus]) -> Option<Generation> {
    let concepts = &tree.problem.concepts;
    for x in tree.node_ids() {
        if blocking[x.0].is_blocked() {
            continue;
        }
        for c in tree.node(x).label.ones() {
            let g = match concepts.shapes[c] {
                Shape::Exists(s, f) => {
                    if tree.neighbours_of(x, s).iter().any(|y| tree.node(*y).label.contains(f)) {
                        continue;
                    }
                    Generation {
                        node: x,
                        concept: c,
                        rule: Rule::Exists,
                        role: s,
                        filler: f,
                        count: 1,
                    }
                }
                Shape::AtLeast(n, s, f) if n > 0 => {
                    let cands = neighbours_with(tree, x, s, f);
                    if has_distinct_clique(tree, &cands, n as usize) {
                        continue;
                    }
                    Generation {
                        node: x,
                        concept: c,
                        rule: Rule::AtLeast,
                        role: s,
                        filler: f,
                        count: n,
                    }
                }
                _ => continue,
            };
            return Some(g);
        }
    }
    None
}

pub(crate) fn apply_generation(tree: &mut CompletionTree, g: &Generation, trail: &mut Vec<Change>) -> Vec<NodeId> {
    let created: Vec<NodeId> = (0..g.count)
        .map(|_| tree.create_child(g.node, g.role, g.filler, trail))
        .collect();
    for (i, &a) in created.iter().enumerate() {
        for &b in &created[i + 1..] {
            tree.push_distinct(a, b, trail);
        }
    }
    created
}

pub(crate) fn apply_action(tree: &mut CompletionTree, action: &Action, trail: &mut Vec<Change>) {
    match *action {
        Action::Add(a) => {
            tree.push_concept(a.node, a.concept, trail);
        }
        Action::Merge { x, y, z } => merge(tree, x, y, z, trail),
    }
}

fn merge(tree: &mut CompletionTree, x: NodeId, y: NodeId, z: NodeId, trail: &mut Vec<Change>) {
    assert!(!tree.is_distinct(y, z), "merging {y} into {z} although {y} ≠ {z}");
    debug_assert_eq!(tree.parent(y), Some(x));
    let label: FixedBitSet = tree.node(y).label.clone();
    for c in label.ones() {
        tree.push_concept(z, c, trail);
    }
    let edge: FixedBitSet = tree.node(y).edge.clone();
    if tree.parent(x) == Some(z) {
        for r in edge.ones() {
            let ir = tree.problem.roles.inv[r];
            tree.push_edge_role(x, ir, trail);
        }
    } else {
        for r in edge.ones() {
            tree.push_edge_role(z, r, trail);
        }
    }
    tree.clear_edge(y, trail);
    let others: Vec<NodeId> = tree
        .distinct
        .iter()
        .filter_map(|&(a, b)| {
            if a == y {
                Some(b)
            } else if b == y {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    for u in others {
        if u != z {
            tree.push_distinct(u, z, trail);
        }
    }
}
