use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::role::Role;

/// Transitive role names, declared role inclusions, and the computed
/// subsumption preorder `⊑*` over every role mentioned and its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleBox {
    transitive: BTreeSet<Arc<str>>,
    inclusions: BTreeSet<(Role, Role)>,
    /// `supers[r]` = every `s` with `r ⊑* s`, excluding `r` itself.
    supers: BTreeMap<Role, BTreeSet<Role>>,
    universe: BTreeSet<Role>,
}

impl RoleBox {
    pub fn empty() -> Self {
        RoleBox::default()
    }

    pub fn transitive_names(&self) -> &BTreeSet<Arc<str>> {
        &self.transitive
    }

    /// The declared `R ⊑ S` axioms, before Inv-closure.
    pub fn inclusions(&self) -> &BTreeSet<(Role, Role)> {
        &self.inclusions
    }

    /// Every role mentioned, together with its inverse.
    pub fn universe(&self) -> &BTreeSet<Role> {
        &self.universe
    }

    pub fn has_hierarchy(&self) -> bool {
        !self.inclusions.is_empty()
    }

    /// `Trans(r)`: true iff `r` or `Inv(r)` is a transitive role name.
    pub fn is_transitive(&self, r: &Role) -> bool {
        self.transitive.contains(r.name())
    }

    /// `r ⊑* s`.
    pub fn subsumed_by(&self, r: &Role, s: &Role) -> bool {
        r == s || self.supers.get(r).is_some_and(|sup| sup.contains(s))
    }

    /// Every role `s` (in the universe) with `s ⊑* r`, `r` included.
    pub fn sub_roles(&self, r: &Role) -> BTreeSet<Role> {
        let mut out: BTreeSet<Role> = self
            .supers
            .iter()
            .filter(|(_, sup)| sup.contains(r))
            .map(|(s, _)| s.clone())
            .collect();
        out.insert(r.clone());
        out
    }

    /// No transitive role lies below `r` (including `r` itself).
    pub fn is_simple(&self, r: &Role) -> bool {
        self.sub_roles(r).iter().all(|s| !self.is_transitive(s))
    }

    /// The same hierarchy with `roles` (and their inverses) added to the
    /// universe.
    pub fn with_roles<'a, I: IntoIterator<Item = &'a Role>>(&self, roles: I) -> RoleBox {
        let mut extra = self.universe.clone();
        for r in roles {
            extra.insert(r.base());
            extra.insert(r.base().inverse());
        }
        let mut out = close_hierarchy(self.transitive.iter().cloned(), self.inclusions.iter().cloned());
        out.universe.extend(extra);
        out
    }

    /// All pairs `(r, s)` with `r ⊑* s` over the universe.
    pub fn subsumption_pairs(&self) -> BTreeSet<(Role, Role)> {
        let mut out = BTreeSet::new();
        for r in &self.universe {
            out.insert((r.clone(), r.clone()));
            if let Some(sup) = self.supers.get(r) {
                for s in sup {
                    out.insert((r.clone(), s.clone()));
                }
            }
        }
        out
    }
}

/// Builds the role hierarchy: reflexive-transitive closure of the
/// inclusions together with their inverse copies.
pub fn close_hierarchy<T, I>(transitive_roles: T, inclusions: I) -> RoleBox
where
    T: IntoIterator,
    T::Item: Into<Arc<str>>,
    I: IntoIterator<Item = (Role, Role)>,
{
    let transitive: BTreeSet<Arc<str>> = transitive_roles.into_iter().map(Into::into).collect();
    let inclusions: BTreeSet<(Role, Role)> = inclusions.into_iter().collect();

    let mut universe = BTreeSet::new();
    for name in &transitive {
        universe.insert(Role::named(name.clone()));
        universe.insert(Role::inverse_of(name.clone()));
    }
    let mut edges: BTreeMap<Role, BTreeSet<Role>> = BTreeMap::new();
    for (r, s) in &inclusions {
        for x in [r, s] {
            universe.insert(x.base());
            universe.insert(x.base().inverse());
        }
        edges.entry(r.clone()).or_default().insert(s.clone());
        edges.entry(r.inverse()).or_default().insert(s.inverse());
    }

    let mut supers = BTreeMap::new();
    for r in &universe {
        let mut seen: BTreeSet<Role> = BTreeSet::new();
        let mut stack: Vec<&Role> = vec![r];
        while let Some(x) = stack.pop() {
            if let Some(next) = edges.get(x) {
                for y in next {
                    if seen.insert(y.clone()) {
                        stack.push(y);
                    }
                }
            }
        }
        seen.remove(r);
        if !seen.is_empty() {
            supers.insert(r.clone(), seen);
        }
    }

    RoleBox {
        transitive,
        inclusions,
        supers,
        universe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn role(n: &str) -> Role {
        Role::named(n)
    }

    #[test]
    fn transitivity_ignores_inverse_marker() {
        let rb = close_hierarchy(["R"], []);
        assert!(rb.is_transitive(&role("R")));
        assert!(rb.is_transitive(&Role::inverse_of("R")));
        assert!(!rb.is_transitive(&role("F")));
    }

    #[test]
    fn single_inclusion_closure() {
        let rb = close_hierarchy(Vec::<&str>::new(), [(role("F"), role("R"))]);
        let (f, r) = (role("F"), role("R"));
        assert!(rb.subsumed_by(&f, &r));
        assert!(rb.subsumed_by(&f.inverse(), &r.inverse()));
        for x in [&f, &r, &f.inverse(), &r.inverse()] {
            assert!(rb.subsumed_by(x, x));
        }
        assert!(!rb.subsumed_by(&r, &f));
        assert!(!rb.subsumed_by(&f, &r.inverse()));
        assert_eq!(rb.subsumption_pairs().len(), 6);
    }

    #[test]
    fn empty_inclusions_give_reflexive_pairs() {
        let rb = RoleBox::empty().with_roles([&role("R")]);
        let pairs = rb.subsumption_pairs();
        assert_eq!(pairs.len(), 2);
        assert!(pairs.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn chains_compose() {
        let rb = close_hierarchy(
            Vec::<&str>::new(),
            [(role("P"), role("Q")), (role("Q"), role("S"))],
        );
        assert!(rb.subsumed_by(&role("P"), &role("S")));
        assert!(rb.subsumed_by(&Role::inverse_of("P"), &Role::inverse_of("S")));
    }

    #[test]
    fn cycles_are_mutual_subsumption() {
        let rb = close_hierarchy(Vec::<&str>::new(), [(role("P"), role("Q")), (role("Q"), role("P"))]);
        assert!(rb.subsumed_by(&role("P"), &role("Q")));
        assert!(rb.subsumed_by(&role("Q"), &role("P")));
    }

    #[test]
    fn simple_roles() {
        let rb = close_hierarchy(["R"], [(role("F"), role("R"))]);
        assert!(!rb.is_simple(&role("R")));
        assert!(rb.is_simple(&role("F")));
        assert!(rb.is_simple(&Role::inverse_of("F")));

        let rb = close_hierarchy(["R"], [(role("R"), role("S"))]);
        assert!(!rb.is_simple(&role("S")));
        assert!(!rb.is_simple(&Role::inverse_of("S")));
    }

    #[test]
    fn inverse_inclusion_targets() {
        // R ⊑ S⁻ gives R⁻ ⊑ S
        let rb = close_hierarchy(Vec::<&str>::new(), [(role("R"), Role::inverse_of("S"))]);
        assert!(rb.subsumed_by(&Role::inverse_of("R"), &role("S")));
    }
}
