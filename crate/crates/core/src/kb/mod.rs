//! Terminologies, their internalisation into a single concept, and
//! subsumption by reduction to unsatisfiability.

mod classify;

pub use classify::{classify, ClassifyError, Hierarchy};

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::engine::{EngineError, EngineOptions, Verdict};
use crate::shiq::{decide_sat_with, CompletionTree};
use crate::syntax::{close_hierarchy, nnf, Concept, Role, RoleBox};

/// A finite set of general concept inclusions `C ⊑ D` together with the
/// role box they are read against.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Terminology {
    pub gcis: Vec<(Concept, Concept)>,
    pub rbox: RoleBox,
}

impl Terminology {
    /// The role box's universe is extended with every role the axioms use.
    pub fn new(gcis: Vec<(Concept, Concept)>, rbox: RoleBox) -> Self {
        let roles: BTreeSet<Role> = gcis
            .iter()
            .flat_map(|(c, d)| c.roles().into_iter().chain(d.roles()))
            .collect();
        let rbox = rbox.with_roles(&roles);
        Terminology { gcis, rbox }
    }

    pub fn empty() -> Self {
        Terminology::default()
    }

    /// `C_T`: the conjunction of `¬Cᵢ ⊔ Dᵢ`, or `⊤` for no axioms.
    pub fn internal_concept(&self) -> Concept {
        Concept::and_all(
            self.gcis
                .iter()
                .map(|(c, d)| Concept::or(Concept::not(c.clone()), d.clone())),
        )
    }

    /// Role names used by the axioms or the role box.
    pub fn role_names(&self) -> BTreeSet<Arc<str>> {
        let mut out: BTreeSet<Arc<str>> = self.rbox.universe().iter().map(|r| r.name_arc().clone()).collect();
        for (c, d) in &self.gcis {
            out.extend(c.roles().into_iter().chain(d.roles()).map(|r| r.name_arc().clone()));
        }
        out
    }
}

/// A terminology and query folded into one satisfiability problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalisedProblem {
    pub goal: Concept,
    pub rbox_u: RoleBox,
    pub universal_role: Role,
}

impl InternalisedProblem {
    pub fn decide(&self) -> Result<Verdict<CompletionTree>, EngineError> {
        self.decide_with(&EngineOptions::default())
    }

    pub fn decide_with(&self, opts: &EngineOptions) -> Result<Verdict<CompletionTree>, EngineError> {
        decide_sat_with(&self.goal, &self.rbox_u, opts)
    }
}

/// A role name in the reserved `$` namespace that none of `taken` uses.
fn fresh_role(taken: &BTreeSet<Arc<str>>) -> Role {
    let mut name = String::from("$U");
    let mut i = 0;
    while taken.contains(name.as_str()) {
        i += 1;
        name = format!("$U{i}");
    }
    Role::named(name)
}

fn internalise(t: &Terminology, query: Concept) -> InternalisedProblem {
    let mut names = t.role_names();
    names.extend(query.roles().into_iter().map(|r| r.name_arc().clone()));
    let u = fresh_role(&names);
    let mut inclusions: Vec<(Role, Role)> = t.rbox.inclusions().iter().cloned().collect();
    for n in &names {
        inclusions.push((Role::named(n.clone()), u.clone()));
        inclusions.push((Role::inverse_of(n.clone()), u.clone()));
    }
    let mut transitive: Vec<Arc<str>> = t.rbox.transitive_names().iter().cloned().collect();
    transitive.push(u.name_arc().clone());
    let rbox_u = close_hierarchy(transitive, inclusions);

    let ct = t.internal_concept();
    let goal = nnf(&Concept::and_all([query, ct.clone(), Concept::forall(u.clone(), ct)]));
    InternalisedProblem {
        goal,
        rbox_u,
        universal_role: u,
    }
}

/// `nnf(C ⊓ C_T ⊓ ∀U.C_T)` over the hierarchy extended with `R ⊑ U` and
/// `Inv(R) ⊑ U` for every role `R`, with `U` transitive and fresh.
pub fn internalise_sat(t: &Terminology, c: &Concept) -> InternalisedProblem {
    internalise(t, c.clone())
}

/// As [`internalise_sat`] for `C ⊓ ¬D`: unsatisfiable iff `D` subsumes `C`.
pub fn internalise_subsumes(t: &Terminology, c: &Concept, d: &Concept) -> InternalisedProblem {
    internalise(t, Concept::and(c.clone(), Concept::not(d.clone())))
}

/// Does `d` subsume `c` with respect to `t`?
pub fn subsumes(t: &Terminology, c: &Concept, d: &Concept) -> Result<bool, EngineError> {
    Ok(!internalise_subsumes(t, c, d).decide()?.is_sat())
}

/// Is `c` satisfiable with respect to `t`?
pub fn satisfiable(t: &Terminology, c: &Concept) -> Result<bool, EngineError> {
    Ok(internalise_sat(t, c).decide()?.is_sat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Concept {
        Concept::atom(n)
    }

    #[test]
    fn empty_terminology_goal() {
        let p = internalise_sat(&Terminology::empty(), &atom("A"));
        let u = Role::named("$U");
        assert_eq!(p.universal_role, u);
        assert_eq!(p.goal, nnf(&Concept::and_all([atom("A"), Concept::Top, Concept::forall(u, Concept::Top)])));
        assert!(p.rbox_u.is_transitive(&p.universal_role));
    }

    #[test]
    fn universal_role_covers_every_role() {
        let r = Role::named("R");
        let t = Terminology::new(vec![(atom("A"), Concept::exists(r.clone(), atom("A")))], RoleBox::empty());
        let p = internalise_sat(&t, &atom("A"));
        let u = &p.universal_role;
        assert!(p.rbox_u.inclusions().contains(&(r.clone(), u.clone())));
        assert!(p.rbox_u.inclusions().contains(&(r.inverse(), u.clone())));
        assert!(p.rbox_u.subsumed_by(&r.inverse(), u));
        assert!(p.decide().unwrap().is_sat());
    }

    #[test]
    fn fresh_name_avoids_collisions() {
        let t = Terminology::new(vec![], close_hierarchy(["$U"], []));
        let p = internalise_sat(&t, &atom("A"));
        assert_eq!(p.universal_role, Role::named("$U1"));
    }

    #[test]
    fn subsumption_reductions() {
        let e = Terminology::empty();
        assert!(subsumes(&e, &Concept::and(atom("A"), atom("B")), &atom("A")).unwrap());
        assert!(!subsumes(&e, &atom("A"), &atom("B")).unwrap());
        let t = Terminology::new(vec![(atom("A"), atom("B"))], RoleBox::empty());
        assert!(subsumes(&t, &atom("A"), &atom("B")).unwrap());
        assert!(!subsumes(&t, &atom("B"), &atom("A")).unwrap());
    }

    #[test]
    fn gci_reaches_successors() {
        // ⊤ ⊑ ∀R.B reaches nodes two steps away
        let r = Role::named("R");
        let t = Terminology::new(vec![(Concept::Top, Concept::forall(r.clone(), atom("B")))], RoleBox::empty());
        let c = Concept::exists(r.clone(), Concept::exists(r, Concept::not(atom("B"))));
        assert!(!satisfiable(&t, &c).unwrap());
    }
}
