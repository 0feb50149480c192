use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::syntax::{Concept, Role, RoleBox};

pub type Relation = BTreeSet<(usize, usize)>;

/// A finite interpretation: a domain, atom extensions and role-name
/// extensions. Names without an entry are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: BTreeSet<usize>,
    pub atoms: BTreeMap<Arc<str>, BTreeSet<usize>>,
    pub roles: BTreeMap<Arc<str>, Relation>,
}

impl Interpretation {
    pub fn new<I: IntoIterator<Item = usize>>(domain: I) -> Self {
        Interpretation {
            domain: domain.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn with_atom<I: IntoIterator<Item = usize>>(mut self, name: &str, ext: I) -> Self {
        self.atoms.entry(name.into()).or_default().extend(ext);
        self
    }

    pub fn with_role<I: IntoIterator<Item = (usize, usize)>>(mut self, name: &str, ext: I) -> Self {
        self.roles.entry(name.into()).or_default().extend(ext);
        self
    }

    pub fn atom(&self, name: &str) -> BTreeSet<usize> {
        self.atoms.get(name).cloned().unwrap_or_default()
    }

    /// `R^I`, with inverse roles read as the converse relation.
    pub fn pairs(&self, r: &Role) -> Relation {
        let Some(ext) = self.roles.get(r.name()) else {
            return Relation::new();
        };
        if r.is_inverse() {
            ext.iter().map(|&(x, y)| (y, x)).collect()
        } else {
            ext.clone()
        }
    }

    fn successors(&self, r: &Role, x: usize) -> Vec<usize> {
        let Some(ext) = self.roles.get(r.name()) else {
            return Vec::new();
        };
        if r.is_inverse() {
            ext.iter().filter(|p| p.1 == x).map(|p| p.0).collect()
        } else {
            ext.range((x, 0)..=(x, usize::MAX)).map(|p| p.1).collect()
        }
    }

    pub fn eval(&self, c: &Concept) -> BTreeSet<usize> {
        eval_concept(self, c)
    }

    /// Transitive names are closed and every `R ⊑* S` holds as `R^I ⊆ S^I`.
    pub fn satisfies_rbox(&self, rbox: &RoleBox) -> bool {
        rbox.transitive_names().iter().all(|n| {
            let r = self.pairs(&Role::named(n.clone()));
            transitive_closure(&r) == r
        }) && rbox
            .subsumption_pairs()
            .iter()
            .all(|(r, s)| self.pairs(r).is_subset(&self.pairs(s)))
    }

    /// `C^I ⊆ D^I` for every axiom.
    pub fn satisfies_gcis(&self, gcis: &[(Concept, Concept)]) -> bool {
        gcis.iter().all(|(c, d)| self.eval(c).is_subset(&self.eval(d)))
    }

    /// The least extension of the role names that satisfies `rbox`:
    /// hierarchy propagation and transitive closure, to a fixpoint.
    pub fn repair(&mut self, rbox: &RoleBox) {
        let pairs = rbox.subsumption_pairs();
        loop {
            let mut changed = false;
            for (r, s) in &pairs {
                let add: Vec<(usize, usize)> = self
                    .pairs(r)
                    .into_iter()
                    .map(|(x, y)| if s.is_inverse() { (y, x) } else { (x, y) })
                    .collect();
                let ext = self.roles.entry(s.name_arc().clone()).or_default();
                for p in add {
                    changed |= ext.insert(p);
                }
            }
            for n in rbox.transitive_names() {
                let ext = self.roles.entry(n.clone()).or_default();
                let closed = transitive_closure(ext);
                if closed.len() != ext.len() {
                    *ext = closed;
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

pub fn transitive_closure(r: &Relation) -> Relation {
    let mut out = r.clone();
    loop {
        let mut extra = Vec::new();
        for &(x, y) in &out {
            for &(_, z) in out.range((y, 0)..=(y, usize::MAX)) {
                if !out.contains(&(x, z)) {
                    extra.push((x, z));
                }
            }
        }
        if extra.is_empty() {
            return out;
        }
        out.extend(extra);
    }
}

/// `C^I`, computed row by row from the model semantics.
pub fn eval_concept(i: &Interpretation, c: &Concept) -> BTreeSet<usize> {
    let count = |x: usize, r: &Role, f: &BTreeSet<usize>| i.successors(r, x).iter().filter(|y| f.contains(y)).count();
    match c {
        Concept::Top => i.domain.clone(),
        Concept::Bottom => BTreeSet::new(),
        Concept::Atom(a) => i.atom(a).intersection(&i.domain).copied().collect(),
        Concept::Not(inner) => i.domain.difference(&eval_concept(i, inner)).copied().collect(),
        Concept::And(a, b) => eval_concept(i, a).intersection(&eval_concept(i, b)).copied().collect(),
        Concept::Or(a, b) => eval_concept(i, a).union(&eval_concept(i, b)).copied().collect(),
        Concept::Exists(r, f) => {
            let f = eval_concept(i, f);
            i.domain.iter().copied().filter(|&x| count(x, r, &f) > 0).collect()
        }
        Concept::Forall(r, f) => {
            let f = eval_concept(i, f);
            i.domain
                .iter()
                .copied()
                .filter(|&x| i.successors(r, x).iter().all(|y| f.contains(y)))
                .collect()
        }
        Concept::AtLeast(n, r, f) => {
            let f = eval_concept(i, f);
            i.domain.iter().copied().filter(|&x| count(x, r, &f) >= *n as usize).collect()
        }
        Concept::AtMost(n, r, f) => {
            let f = eval_concept(i, f);
            i.domain.iter().copied().filter(|&x| count(x, r, &f) <= *n as usize).collect()
        }
    }
}
