//! Negation normal form and the syntactic closures built on top of it.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::concept::Concept;
use super::rbox::RoleBox;
use super::role::Role;

/// Pushes negation inwards until it only sits in front of atoms.
pub fn nnf(c: &Concept) -> Concept {
    match c {
        Concept::Atom(_) | Concept::Top | Concept::Bottom => c.clone(),
        Concept::Not(inner) => negate(inner),
        Concept::And(a, b) => Concept::and(nnf(a), nnf(b)),
        Concept::Or(a, b) => Concept::or(nnf(a), nnf(b)),
        Concept::Exists(r, f) => Concept::exists(r.clone(), nnf(f)),
        Concept::Forall(r, f) => Concept::forall(r.clone(), nnf(f)),
        Concept::AtLeast(n, r, f) => Concept::at_least(*n, r.clone(), nnf(f)),
        Concept::AtMost(n, r, f) => Concept::at_most(*n, r.clone(), nnf(f)),
    }
}

/// `~C`: the NNF of `¬C`.
pub fn negate(c: &Concept) -> Concept {
    match c {
        Concept::Atom(_) => Concept::Not(Arc::new(c.clone())),
        Concept::Top => Concept::Bottom,
        Concept::Bottom => Concept::Top,
        Concept::Not(inner) => nnf(inner),
        Concept::And(a, b) => Concept::or(negate(a), negate(b)),
        Concept::Or(a, b) => Concept::and(negate(a), negate(b)),
        Concept::Exists(r, f) => Concept::forall(r.clone(), negate(f)),
        Concept::Forall(r, f) => Concept::exists(r.clone(), negate(f)),
        Concept::AtLeast(0, _, _) => Concept::Bottom,
        Concept::AtLeast(n, r, f) => Concept::at_most(n - 1, r.clone(), nnf(f)),
        Concept::AtMost(n, r, f) => Concept::at_least(n + 1, r.clone(), nnf(f)),
    }
}

/// `clos(D)`: the smallest set containing `d` that is closed under
/// sub-expressions and `~`.
pub fn closure(d: &Concept) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    let mut work = vec![d.clone()];
    while let Some(c) = work.pop() {
        if out.contains(&c) {
            continue;
        }
        work.push(negate(&c));
        work.extend(c.children().into_iter().cloned());
        out.insert(c);
    }
    out
}

/// `clos(D)` extended with `∀R.C` for every `∀S.C` in it and transitive
/// `R ⊑* S`, so that transitive propagation never leaves the set.
pub fn extended_closure(d: &Concept, rbox: &RoleBox) -> BTreeSet<Concept> {
    let mut roles: BTreeSet<Role> = rbox.universe().clone();
    for r in d.roles() {
        roles.insert(r.base());
        roles.insert(r.base().inverse());
    }
    let mut set = closure(d);
    loop {
        let mut extra = BTreeSet::new();
        for c in &set {
            if let Concept::Forall(s, f) = c {
                for r in &roles {
                    if r != s && rbox.is_transitive(r) && rbox.subsumed_by(r, s) {
                        let g = Concept::forall(r.clone(), (**f).clone());
                        if !set.contains(&g) {
                            extra.extend(closure(&g));
                        }
                    }
                }
            }
        }
        if extra.is_empty() {
            return set;
        }
        set.extend(extra);
    }
}

/// `sub(D)`: the plain syntactic sub-expressions of `d`, `d` included.
pub fn subconcepts(d: &Concept) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    let mut work = vec![d];
    while let Some(c) = work.pop() {
        if out.insert(c.clone()) {
            work.extend(c.children());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Role;

    fn a() -> Concept {
        Concept::atom("A")
    }
    fn b() -> Concept {
        Concept::atom("B")
    }
    fn r() -> Role {
        Role::named("R")
    }

    #[test]
    fn double_negation() {
        assert_eq!(nnf(&Concept::not(Concept::not(a()))), a());
    }

    #[test]
    fn de_morgan_through_quantifier() {
        // ¬(∃R.A ⊓ ¬B) → ∀R.¬A ⊔ B
        let c = Concept::not(Concept::and(Concept::exists(r(), a()), Concept::not(b())));
        let want = Concept::or(Concept::forall(r(), Concept::not(a())), b());
        assert_eq!(nnf(&c), want);
    }

    #[test]
    fn number_restriction_negation() {
        assert_eq!(nnf(&Concept::not(Concept::at_least(0, r(), a()))), Concept::Bottom);
        assert_eq!(
            nnf(&Concept::not(Concept::at_least(2, r(), a()))),
            Concept::at_most(1, r(), a())
        );
        assert_eq!(
            nnf(&Concept::not(Concept::at_most(1, r(), a()))),
            Concept::at_least(2, r(), a())
        );
        assert_eq!(nnf(&Concept::not(Concept::Top)), Concept::Bottom);
        assert_eq!(nnf(&Concept::not(Concept::Bottom)), Concept::Top);
    }

    #[test]
    fn closure_of_atom() {
        let want: BTreeSet<_> = [a(), Concept::not(a())].into_iter().collect();
        assert_eq!(closure(&a()), want);
    }

    #[test]
    fn closure_of_exists() {
        let d = Concept::exists(r(), a());
        let want: BTreeSet<_> = [
            d.clone(),
            Concept::forall(r(), Concept::not(a())),
            a(),
            Concept::not(a()),
        ]
        .into_iter()
        .collect();
        assert_eq!(closure(&d), want);
    }

    #[test]
    fn closure_of_at_most() {
        let f = Role::named("F");
        let d = Concept::at_most(1, f.clone(), b());
        let want: BTreeSet<_> = [
            d.clone(),
            Concept::at_least(2, f, b()),
            b(),
            Concept::not(b()),
        ]
        .into_iter()
        .collect();
        assert_eq!(closure(&d), want);
    }

    #[test]
    fn subconcept_walks() {
        let ab = Concept::and(a(), b());
        assert_eq!(subconcepts(&ab).len(), 3);
        let d = Concept::forall(r(), Concept::or(a(), b()));
        let want: BTreeSet<_> = [d.clone(), Concept::or(a(), b()), a(), b()].into_iter().collect();
        assert_eq!(subconcepts(&d), want);
        assert_eq!(subconcepts(&a()).len(), 1);
    }
}
