use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::interp::{Interpretation, Relation};
use crate::shiq::{validate_completion_tree, BlockStatus, CompletionTree, TreeViolation};
use crate::syntax::{extended_closure, negate, nnf, Concept, Role, RoleBox};
use crate::trace::NodeId;

static NO_PAIRS: Relation = Relation::new();

/// Individuals `0..len` with concept labels and role edges. Frontier
/// individuals are cut-off points of a bounded construction and are not
/// required to have their existential successors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableauStructure {
    pub labels: Vec<BTreeSet<Concept>>,
    pub edges: BTreeMap<Role, Relation>,
    pub frontier: BTreeSet<usize>,
    pub names: Vec<String>,
}

impl TableauStructure {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge(&self, r: &Role) -> &Relation {
        self.edges.get(r).unwrap_or(&NO_PAIRS)
    }

    fn successors<'a>(&'a self, s: usize, r: &Role) -> impl Iterator<Item = usize> + 'a {
        self.edge(r).range((s, 0)..=(s, usize::MAX)).map(|p| p.1)
    }

    fn count(&self, s: usize, r: &Role, c: &Concept) -> usize {
        self.successors(s, r).filter(|&t| self.labels[t].contains(c)).count()
    }

    /// Every individual of `self` appears in `other` under the same name,
    /// with the same label, and every edge is kept.
    pub fn embeds_in(&self, other: &TableauStructure) -> bool {
        let index: BTreeMap<&str, usize> = other.names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let Some(map) = self.names.iter().map(|n| index.get(n.as_str()).copied()).collect::<Option<Vec<_>>>() else {
            return false;
        };
        self.labels.iter().zip(&map).all(|(l, &j)| *l == other.labels[j])
            && self
                .edges
                .iter()
                .all(|(r, pairs)| pairs.iter().all(|&(x, y)| other.edge(r).contains(&(map[x], map[y]))))
    }
}

/// Which property list applies: all eleven, or the first seven with the
/// role hierarchy read as identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Logic {
    Shiq,
    Si,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableauViolation {
    GoalMissing,
    OutsideClosure {
        individual: usize,
        concept: Concept,
    },
    /// Property `number` fails at `individual`, on `concept` where one is
    /// involved and towards `other` where a second individual is.
    Property {
        number: u8,
        individual: usize,
        concept: Option<Concept>,
        other: Option<usize>,
    },
}

impl fmt::Display for TableauViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauViolation::GoalMissing => f.write_str("no label contains the concept"),
            TableauViolation::OutsideClosure { individual, concept } => {
                write!(f, "s{individual} carries {concept}, which is outside the closure")
            }
            TableauViolation::Property {
                number,
                individual,
                concept,
                other,
            } => {
                write!(f, "property {number} fails at s{individual}")?;
                if let Some(c) = concept {
                    write!(f, " on {c}")?;
                }
                if let Some(t) = other {
                    write!(f, " towards s{t}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableauReport {
    pub violations: Vec<TableauViolation>,
}

impl TableauReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The property numbers that fail, without repeats.
    pub fn failed_properties(&self) -> BTreeSet<u8> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                TableauViolation::Property { number, .. } => Some(*number),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for TableauReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid tableau");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_tableau(t: &TableauStructure, d: &Concept, rbox: &RoleBox) -> TableauReport {
    validate_tableau_as(t, d, rbox, Logic::Shiq)
}

/// Checks every tableau property and reports each failure found.
pub fn validate_tableau_as(t: &TableauStructure, d: &Concept, rbox: &RoleBox, logic: Logic) -> TableauReport {
    let d = nnf(d);
    let rbox = rbox.with_roles(&d.roles());
    let clos = extended_closure(&d, &rbox);
    let mut roles: BTreeSet<Role> = rbox.universe().clone();
    roles.extend(t.edges.keys().flat_map(|r| [r.clone(), r.inverse()]));
    let below = |r: &Role, s: &Role| match logic {
        Logic::Shiq => rbox.subsumed_by(r, s),
        Logic::Si => r == s,
    };
    let mut out = Vec::new();
    let mut fail = |number: u8, individual: usize, concept: Option<&Concept>, other: Option<usize>| {
        out.push(TableauViolation::Property {
            number,
            individual,
            concept: concept.cloned(),
            other,
        })
    };

    for (s, label) in t.labels.iter().enumerate() {
        let frontier = t.frontier.contains(&s);
        for c in label {
            match c {
                Concept::Bottom => fail(1, s, Some(c), None),
                Concept::Not(a) if label.contains(a) => fail(1, s, Some(c), None),
                Concept::And(a, b) if !label.contains(a) || !label.contains(b) => fail(2, s, Some(c), None),
                Concept::Or(a, b) if !label.contains(a) && !label.contains(b) => fail(3, s, Some(c), None),
                Concept::Forall(sr, f) => {
                    for u in t.successors(s, sr) {
                        if !t.labels[u].contains(f) {
                            fail(4, s, Some(c), Some(u));
                        }
                    }
                    for r in roles.iter().filter(|r| rbox.is_transitive(r) && below(r, sr)) {
                        let g = Concept::forall(r.clone(), (**f).clone());
                        for u in t.successors(s, r) {
                            if !t.labels[u].contains(&g) {
                                fail(6, s, Some(c), Some(u));
                            }
                        }
                    }
                }
                Concept::Exists(sr, f) if !frontier && t.count(s, sr, f) == 0 => fail(5, s, Some(c), None),
                Concept::AtMost(n, sr, f) | Concept::AtLeast(n, sr, f) if logic == Logic::Shiq => {
                    let count = t.count(s, sr, f);
                    match c {
                        Concept::AtMost(..) if count > *n as usize => fail(9, s, Some(c), None),
                        Concept::AtLeast(..) if !frontier && count < *n as usize => fail(10, s, Some(c), None),
                        _ => {}
                    }
                    let nf = negate(f);
                    for u in t.successors(s, sr) {
                        if !t.labels[u].contains(&**f) && !t.labels[u].contains(&nf) {
                            fail(11, s, Some(c), Some(u));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    for (r, pairs) in &t.edges {
        let back = t.edge(&r.inverse());
        for &(x, y) in pairs {
            if !back.contains(&(y, x)) {
                fail(7, x, None, Some(y));
            }
        }
    }
    if logic == Logic::Shiq {
        for (r, pairs) in &t.edges {
            for s in roles.iter().filter(|s| *s != r && rbox.subsumed_by(r, s)) {
                for &(x, y) in pairs {
                    if !t.edge(s).contains(&(x, y)) {
                        fail(8, x, None, Some(y));
                    }
                }
            }
        }
    }

    for (s, label) in t.labels.iter().enumerate() {
        for c in label.iter().filter(|c| !clos.contains(*c)) {
            out.push(TableauViolation::OutsideClosure {
                individual: s,
                concept: c.clone(),
            });
        }
    }
    if !t.labels.iter().any(|l| l.contains(&d)) {
        out.push(TableauViolation::GoalMissing);
    }
    TableauReport { violations: out }
}

/// The tableau read off a model: each individual is labelled with the
/// closure members it satisfies and each role with its extension.
pub fn model_to_tableau(i: &Interpretation, d: &Concept, rbox: &RoleBox) -> TableauStructure {
    let d = nnf(d);
    let rbox = rbox.with_roles(&d.roles());
    let clos = extended_closure(&d, &rbox);
    let individuals: Vec<usize> = i.domain.iter().copied().collect();
    let index: BTreeMap<usize, usize> = individuals.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let mut labels = vec![BTreeSet::new(); individuals.len()];
    for c in &clos {
        for x in i.eval(c) {
            labels[index[&x]].insert(c.clone());
        }
    }
    let edges = rbox
        .universe()
        .iter()
        .map(|r| (r.clone(), i.pairs(r).into_iter().map(|(x, y)| (index[&x], index[&y])).collect()))
        .collect();
    TableauStructure {
        labels,
        edges,
        frontier: BTreeSet::new(),
        names: individuals.iter().map(|x| x.to_string()).collect(),
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnravelError {
    #[error("not a complete and clash-free tree: {0}")]
    InvalidTree(TreeViolation),
}

/// The bounded prefix of the path tableau of a complete completion tree.
///
/// A path is a sequence of node pairs `x/x'`: `x' ` is the node reached
/// in the tree and `x` the node whose label is used, which differs from
/// `x'` exactly when `x'` is blocked by `x`. Paths longer than
/// `depth_budget` pairs after the root are not built; those of exactly
/// that length form the frontier.
pub fn unravel_witness(
    tree: &CompletionTree,
    d: &Concept,
    rbox: &RoleBox,
    depth_budget: usize,
) -> Result<TableauStructure, UnravelError> {
    validate_completion_tree(tree, d, rbox).map_err(UnravelError::InvalidTree)?;
    let blocking = tree.blocking();
    let roles = tree.role_set();
    let rbox = tree.rbox();

    let root = tree.root();
    let mut paths: Vec<Vec<(NodeId, NodeId)>> = vec![vec![(root, root)]];
    let mut out = TableauStructure::default();
    let mut next = 0;
    while next < paths.len() {
        let p = paths[next].clone();
        let tail = p.last().expect("paths are non-empty").0;
        out.labels.push(tree.label(tail).into_iter().cloned().collect());
        out.names.push(
            p.iter()
                .map(|(x, y)| if x == y { x.to_string() } else { format!("{x}/{y}") })
                .collect::<Vec<_>>()
                .join("."),
        );
        if p.len() > depth_budget {
            out.frontier.insert(next);
            next += 1;
            continue;
        }
        for &y in tree.children(tail) {
            let x = match blocking[y.0] {
                BlockStatus::NotBlocked => y,
                BlockStatus::DirectlyBlocked { by } => by,
                BlockStatus::IndirectlyBlocked => continue,
            };
            let q = paths.len();
            let mut extended = p.clone();
            extended.push((x, y));
            paths.push(extended);
            let edge = tree.edge_roles(y);
            for s in roles {
                if edge.iter().any(|r| rbox.subsumed_by(r, s)) {
                    out.edges.entry(s.clone()).or_default().insert((next, q));
                    out.edges.entry(s.inverse()).or_default().insert((q, next));
                }
            }
        }
        next += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::find_model;
    use crate::shiq::decide_sat;
    use crate::syntax::close_hierarchy;

    fn atom(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn r() -> Role {
        Role::named("R")
    }

    #[test]
    fn model_yields_valid_tableau() {
        let rb = close_hierarchy(["R"], []);
        let d = Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), Concept::exists(r(), atom("A"))));
        let m = find_model(&d, &rb, None, 3).unwrap().unwrap();
        let t = model_to_tableau(&m, &d, &rb);
        let report = validate_tableau(&t, &d, &rb);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn broken_structures_fail_the_right_property() {
        let d = Concept::exists(r(), atom("A"));
        let rb = RoleBox::empty();
        let m = find_model(&Concept::and(d.clone(), Concept::not(atom("A"))), &rb, None, 3).unwrap().unwrap();
        let good = model_to_tableau(&m, &d, &rb);
        assert!(validate_tableau(&good, &d, &rb).is_valid());

        let mut t = good.clone();
        let pair = *t.edges[&r()].iter().next().unwrap();
        t.edges.get_mut(&r().inverse()).unwrap().remove(&(pair.1, pair.0));
        assert!(validate_tableau(&t, &d, &rb).failed_properties().contains(&7));

        let mut t = good;
        t.labels[0].insert(atom("A"));
        t.labels[0].insert(Concept::not(atom("A")));
        assert!(validate_tableau(&t, &d, &rb).failed_properties().contains(&1));
    }

    #[test]
    fn finite_witness_unravels_to_itself() {
        let rb = RoleBox::empty();
        let d = Concept::and(Concept::exists(r(), Concept::exists(r(), atom("A"))), Concept::exists(r(), atom("B")));
        let w = decide_sat(&d, &rb).unwrap().witness.unwrap();
        let t = unravel_witness(&w, &d, &rb, 5).unwrap();
        assert_eq!(t.len(), w.len());
        let report = validate_tableau(&t, &d, &rb);
        assert!(report.is_valid(), "{report}");
        let root_only = unravel_witness(&w, &d, &rb, 0).unwrap();
        assert_eq!(root_only.len(), 1);
        assert!(validate_tableau(&root_only, &d, &rb).is_valid());
    }

    #[test]
    fn blocked_witness_unravels_monotonically() {
        let f = Role::named("F");
        let rb = close_hierarchy(["R"], [(f.clone(), r())]);
        let step = Concept::exists(f.inverse(), Concept::and(atom("C"), Concept::at_most(1, f, Concept::Top)));
        let d = Concept::and_all([Concept::not(atom("C")), step.clone(), Concept::forall(r().inverse(), step)]);
        let w = decide_sat(&d, &rb).unwrap().witness.unwrap();
        let mut previous: Option<TableauStructure> = None;
        for budget in 1..8 {
            let t = unravel_witness(&w, &d, &rb, budget).unwrap();
            let report = validate_tableau(&t, &d, &rb);
            assert!(report.is_valid(), "budget {budget}: {report}");
            if let Some(p) = previous {
                assert!(p.len() < t.len());
                assert!(p.embeds_in(&t));
            }
            previous = Some(t);
        }
    }

    #[test]
    fn rejects_incomplete_trees() {
        let d = Concept::exists(r(), atom("A"));
        let tree = CompletionTree::new(&d, &RoleBox::empty());
        assert!(unravel_witness(&tree, &d, &RoleBox::empty(), 2).is_err());
    }
}
