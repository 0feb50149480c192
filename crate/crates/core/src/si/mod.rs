//! The SI calculus: node labels `B(x) ⊆ L(x)` over `sub(D)`, similarity
//! blocking, and an optional depth-first reset–restart mode.

mod search;
mod tree;

pub use search::{si_decide_sat, si_decide_sat_trace, si_decide_sat_with, SiBlock};
pub use tree::SiTree;

use std::fmt;

use search::{
    pending_exists, si_blocking, si_clash, si_deterministic_at, si_find_exists, si_find_or, SiAddition, Target,
};
use crate::shiq::TreeViolation;
use crate::syntax::Concept;
use crate::table::Shape;
use crate::trace::{NodeId, Rule};

pub fn si_is_blocked(tree: &SiTree, x: NodeId) -> bool {
    si_blocking(tree)[x.0].is_blocked()
}

/// What one step of rule application produces.
#[derive(Clone, Debug)]
pub enum SiExpansion {
    Fixpoint,
    /// One tree for a deterministic rule or an existential, two for a
    /// disjunction.
    Alternatives(Vec<SiTree>),
}

/// Applies one rule instance in the engine's order: ⊓, ∀ and ∀₊ first,
/// then ⊔, then ∃ at the oldest eligible node. Predecessor updates do not
/// reset here; that is the trace-mode search's job.
pub fn si_apply_rules(tree: &SiTree) -> SiExpansion {
    let mut pending = Vec::new();
    for x in tree.node_ids() {
        si_deterministic_at(tree, x, &mut pending);
        if let Some(a) = pending.first() {
            let mut t = tree.clone();
            apply(&mut t, a);
            return SiExpansion::Alternatives(vec![t]);
        }
    }
    if let Some((x, alternatives)) = si_find_or(tree) {
        let trees = alternatives
            .iter()
            .map(|&c| {
                let mut t = tree.clone();
                t.push_l(x, c, &mut Vec::new());
                t
            })
            .collect();
        return SiExpansion::Alternatives(trees);
    }
    if let Some((x, _, s, f)) = si_find_exists(tree, &si_blocking(tree), false) {
        let mut t = tree.clone();
        t.create_child(x, s, f, &mut Vec::new());
        return SiExpansion::Alternatives(vec![t]);
    }
    SiExpansion::Fixpoint
}

fn apply(tree: &mut SiTree, a: &SiAddition) {
    let trail = &mut Vec::new();
    match a.target {
        Target::LB => tree.push_lb(a.node, a.concept, trail),
        Target::L | Target::Up => tree.push_l(a.node, a.concept, trail),
    };
}

/// A breach of the monotonicity property along transitive paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathViolation {
    /// The upper node `x_i` of the offending pair of consecutive edges.
    pub node: NodeId,
    pub concept: Concept,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "path property fails below {} on {}", self.node, self.concept)
    }
}

impl SiTree {
    pub fn blocking(&self) -> Vec<SiBlock> {
        si_blocking(self)
    }

    /// Checks that no rule applies and no label clashes. Existentials
    /// recorded in a node's summary count as satisfied.
    pub fn validate(&self) -> Result<(), TreeViolation> {
        let root = self.node(self.root());
        if !root.l.contains(self.problem.goal) || !root.b.contains(self.problem.goal) {
            return Err(TreeViolation::GoalMissing);
        }
        for x in self.node_ids() {
            let n = self.node(x);
            if !n.b.is_subset(&n.l) {
                return Err(TreeViolation::Malformed {
                    node: x,
                    reason: "B is not a subset of L",
                });
            }
        }
        if let Some((node, c)) = si_clash(self) {
            return Err(TreeViolation::Clash {
                node,
                concept: self.problem.concepts.concepts[c].clone(),
            });
        }
        let mut pending = Vec::new();
        for x in self.node_ids() {
            si_deterministic_at(self, x, &mut pending);
            if let Some(a) = pending.first() {
                return Err(TreeViolation::Incomplete { node: x, rule: a.rule });
            }
        }
        if let Some((node, _)) = si_find_or(self) {
            return Err(TreeViolation::Incomplete { node, rule: Rule::Or });
        }
        let blocking = si_blocking(self);
        for x in self.node_ids() {
            if !blocking[x.0].is_blocked() && pending_exists(self, x).is_some() {
                return Err(TreeViolation::Incomplete {
                    node: x,
                    rule: Rule::Exists,
                });
            }
        }
        Ok(())
    }

    /// Along consecutive edges `x_{i-1} → x_i → x_{i+1}` labelled with the
    /// same transitive role `R`: `L(x_{i+1})/Inv(R) ⊆ L(x_i)/Inv(R)`, and
    /// `B(x_i) ⊆ B(x_{i+1}) ∪ {C}` where `C` is the filler that generated
    /// `x_i`.
    pub fn check_path_property(&self) -> Result<(), PathViolation> {
        let roles = &self.problem.roles;
        for y in self.node_ids() {
            let ny = self.node(y);
            let (Some(x), Some(r)) = (ny.parent, ny.role) else {
                continue;
            };
            if !roles.transitive[r] {
                continue;
            }
            let upper = self.restricted(x, roles.inv[r]);
            if let Some(c) = self.restricted(y, roles.inv[r]).difference(&upper).next() {
                return Err(self.violation(x, c));
            }
            let nx = self.node(x);
            if nx.role != Some(r) {
                continue;
            }
            let mut allowed = ny.b.clone();
            if let Some(g) = nx.generator {
                allowed.insert(g);
            }
            if let Some(c) = nx.b.difference(&allowed).next() {
                return Err(self.violation(x, c));
            }
        }
        Ok(())
    }

    fn violation(&self, node: NodeId, c: usize) -> PathViolation {
        PathViolation {
            node,
            concept: self.problem.concepts.concepts[c].clone(),
        }
    }

    /// Number of universal restrictions over inverse roles in `sub(D)`;
    /// zero means resets cannot happen.
    pub fn inverse_universals(&self) -> usize {
        let roles = &self.problem.roles.roles;
        self.problem
            .concepts
            .shapes
            .iter()
            .filter(|s| matches!(s, Shape::Forall(r, _) if roles[*r].is_inverse()))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineError;
    use crate::syntax::{close_hierarchy, Role, RoleBox};

    fn atom(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn r() -> Role {
        Role::named("R")
    }

    #[test]
    fn answers() {
        let rb = RoleBox::empty();
        let unsat = Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), Concept::not(atom("A"))));
        let up = Concept::and(Concept::exists(r().inverse(), Concept::forall(r(), Concept::not(atom("A")))), atom("A"));
        let tr = close_hierarchy(["R"], []);
        let s4 = Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), Concept::exists(r(), atom("A"))));
        for trace in [false, true] {
            let run = |d: &Concept, rb: &RoleBox| {
                si_decide_sat_with(d, rb, &crate::EngineOptions { trace, ..Default::default() }).unwrap()
            };
            assert!(!run(&unsat, &rb).is_sat());
            assert!(!run(&up, &rb).is_sat());
            let v = run(&s4, &tr);
            assert!(v.is_sat());
            let w = v.witness.unwrap();
            w.validate().unwrap();
            assert!(w.blocking().iter().any(|b| matches!(b, SiBlock::By(_))));
        }
    }

    #[test]
    fn rejects_non_si_input() {
        let d = Concept::at_most(1, r(), atom("A"));
        assert!(matches!(si_decide_sat(&d, &RoleBox::empty()), Err(EngineError::NumberRestrictionInSi(_))));
        let rb = close_hierarchy(Vec::<&str>::new(), [(Role::named("F"), r())]);
        assert_eq!(si_decide_sat(&atom("A"), &rb).unwrap_err(), EngineError::HierarchyInSi);
    }

    #[test]
    fn predecessor_case_updates_l_only() {
        // ∃R.(∀R⁻.B) pushes B into the root's L but not its B label
        let d = Concept::exists(r(), Concept::forall(r().inverse(), atom("B")));
        let v = si_decide_sat(&d, &RoleBox::empty()).unwrap();
        let w = v.witness.unwrap();
        assert!(w.l_contains(w.root(), &atom("B")));
        assert!(!w.b_contains(w.root(), &atom("B")));
    }

    #[test]
    fn successor_case_updates_both_labels() {
        let d = Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), atom("B")));
        let w = si_decide_sat(&d, &RoleBox::empty()).unwrap().witness.unwrap();
        let y = w.children(w.root())[0];
        assert!(w.b_contains(y, &atom("B")) && w.l_contains(y, &atom("B")));
    }

    #[test]
    fn reset_restart_regenerates_with_fresh_ids() {
        let d = Concept::and(
            Concept::exists(r().inverse(), Concept::forall(r(), Concept::not(atom("A")))),
            Concept::exists(r(), atom("B")),
        );
        let v = si_decide_sat_trace(&d, &RoleBox::empty()).unwrap();
        assert!(v.is_sat());
        assert!(v.stats.resets >= 1);
        let plain = si_decide_sat(&d, &RoleBox::empty()).unwrap();
        assert_eq!(plain.stats.resets, 0);
    }

    #[test]
    fn blocking_needs_equal_inverse_restrictions() {
        let c = Concept::forall(r().inverse(), atom("C"));
        let d = Concept::exists(r(), Concept::and(atom("A"), Concept::exists(r(), c.clone())));
        let mut t = SiTree::new(&d, &RoleBox::empty()).unwrap();
        let root = t.root();
        let trail = &mut Vec::new();
        let (ri, a) = (t.problem.roles.id(&r()).unwrap(), t.problem.concepts.id(&atom("A")).unwrap());
        let x = t.create_child(root, ri, a, trail);
        let y = t.create_child(x, ri, a, trail);
        assert_eq!(t.blocking()[y.0], SiBlock::By(x));
        let ci = t.problem.concepts.id(&c).unwrap();
        t.push_l(y, ci, trail);
        assert!(!si_is_blocked(&t, y));
    }
}
