//! Interned concepts and roles for a single satisfiability problem.
//!
//! Every label in a completion tree is a bitset over the concept table, so
//! label equality and subset tests (blocking) are word-wise comparisons.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::syntax::{extended_closure, negate, subconcepts, Concept, Role, RoleBox};

pub(crate) type ConceptId = usize;
pub(crate) type RoleId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    Top,
    Bottom,
    Atom,
    NegAtom,
    And(ConceptId, ConceptId),
    Or(ConceptId, ConceptId),
    Exists(RoleId, ConceptId),
    Forall(RoleId, ConceptId),
    AtLeast(u32, RoleId, ConceptId),
    AtMost(u32, RoleId, ConceptId),
}

#[derive(Clone, Debug)]
pub(crate) struct RoleTable {
    pub roles: Vec<Role>,
    index: HashMap<Role, RoleId>,
    pub inv: Vec<RoleId>,
    pub transitive: Vec<bool>,
    /// `below[s]` holds every `r` with `r ⊑* s`.
    pub below: Vec<FixedBitSet>,
}

impl RoleTable {
    fn new(rbox: &RoleBox, extra: &BTreeSet<Role>) -> Self {
        let mut all: BTreeSet<Role> = rbox.universe().clone();
        for r in extra {
            all.insert(r.base());
            all.insert(r.base().inverse());
        }
        let roles: Vec<Role> = all.into_iter().collect();
        let index: HashMap<Role, RoleId> = roles.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let inv = roles.iter().map(|r| index[&r.inverse()]).collect();
        let transitive = roles.iter().map(|r| rbox.is_transitive(r)).collect();
        let below = roles
            .iter()
            .map(|s| {
                let mut set = FixedBitSet::with_capacity(roles.len());
                for (i, r) in roles.iter().enumerate() {
                    if rbox.subsumed_by(r, s) {
                        set.insert(i);
                    }
                }
                set
            })
            .collect();
        RoleTable {
            roles,
            index,
            inv,
            transitive,
            below,
        }
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn id(&self, r: &Role) -> Option<RoleId> {
        self.index.get(r).copied()
    }

    /// `r ⊑* s`.
    pub fn subsumed(&self, r: RoleId, s: RoleId) -> bool {
        self.below[s].contains(r)
    }

    /// Does some role in `edge` fall under `s`?
    pub fn edge_matches(&self, edge: &FixedBitSet, s: RoleId) -> bool {
        !edge.is_disjoint(&self.below[s])
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.roles.len())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ConceptTable {
    pub concepts: Vec<Concept>,
    index: HashMap<Concept, ConceptId>,
    pub shapes: Vec<Shape>,
    /// Index of `~C`, when it is in the table.
    pub negation: Vec<Option<ConceptId>>,
    /// For `∀S.C`: every `(R, ∀R.C)` in the table with `Trans(R)` and
    /// `R ⊑* S`.
    pub plus: Vec<Vec<(RoleId, ConceptId)>>,
}

impl ConceptTable {
    fn new(set: BTreeSet<Concept>, roles: &RoleTable) -> Self {
        let concepts: Vec<Concept> = set.into_iter().collect();
        let index: HashMap<Concept, ConceptId> =
            concepts.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let role = |r: &Role| roles.id(r).expect("role interned before concepts");
        let shapes: Vec<Shape> = concepts
            .iter()
            .map(|c| match c {
                Concept::Top => Shape::Top,
                Concept::Bottom => Shape::Bottom,
                Concept::Atom(_) => Shape::Atom,
                Concept::Not(inner) => match **inner {
                    Concept::Atom(_) => Shape::NegAtom,
                    Concept::Top => Shape::Bottom,
                    _ => unreachable!("table built from NNF concepts"),
                },
                Concept::And(a, b) => Shape::And(index[&**a], index[&**b]),
                Concept::Or(a, b) => Shape::Or(index[&**a], index[&**b]),
                Concept::Exists(r, f) => Shape::Exists(role(r), index[&**f]),
                Concept::Forall(r, f) => Shape::Forall(role(r), index[&**f]),
                Concept::AtLeast(n, r, f) => Shape::AtLeast(*n, role(r), index[&**f]),
                Concept::AtMost(n, r, f) => Shape::AtMost(*n, role(r), index[&**f]),
            })
            .collect();
        let negation = concepts.iter().map(|c| index.get(&negate(c)).copied()).collect();
        let plus = shapes
            .iter()
            .map(|shape| match *shape {
                Shape::Forall(s, f) => (0..roles.len())
                    .filter(|&r| roles.transitive[r] && roles.subsumed(r, s))
                    .filter_map(|r| {
                        let g = Concept::forall(roles.roles[r].clone(), concepts[f].clone());
                        index.get(&g).map(|&id| (r, id))
                    })
                    .collect(),
                _ => Vec::new(),
            })
            .collect();
        ConceptTable {
            concepts,
            index,
            shapes,
            negation,
            plus,
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn id(&self, c: &Concept) -> Option<ConceptId> {
        self.index.get(c).copied()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.concepts.len())
    }
}

/// A concept in NNF together with its role box, interned.
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub goal: ConceptId,
    pub concepts: ConceptTable,
    pub roles: RoleTable,
    pub rbox: RoleBox,
}

impl Problem {
    /// Table over `clos(D)`, extended with `∀R.C` for every `∀S.C` in the
    /// set and transitive `R ⊑* S` so that the `∀₊`-rule stays inside it.
    pub fn shiq(d: &Concept, rbox: &RoleBox) -> Self {
        let roles = RoleTable::new(rbox, &d.roles());
        let set = extended_closure(d, rbox);
        let concepts = ConceptTable::new(set, &roles);
        Problem {
            goal: concepts.id(d).expect("goal in its own closure"),
            concepts,
            roles,
            rbox: rbox.clone(),
        }
    }

    /// Table over `sub(D)` only.
    pub fn si(d: &Concept, rbox: &RoleBox) -> Self {
        let roles = RoleTable::new(rbox, &d.roles());
        let concepts = ConceptTable::new(subconcepts(d), &roles);
        Problem {
            goal: concepts.id(d).expect("goal in its own subconcepts"),
            concepts,
            roles,
            rbox: rbox.clone(),
        }
    }

    pub fn goal_concept(&self) -> &Concept {
        &self.concepts.concepts[self.goal]
    }

    /// Atomic contradiction or `⊥` inside a label.
    pub fn atomic_clash(&self, label: &FixedBitSet) -> Option<ConceptId> {
        label.ones().find(|&c| match self.concepts.shapes[c] {
            Shape::Bottom => true,
            Shape::NegAtom => self.concepts.negation[c].is_some_and(|a| label.contains(a)),
            _ => false,
        })
    }
}
