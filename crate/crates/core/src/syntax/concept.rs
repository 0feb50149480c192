use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::role::Role;

/// A SHIQ concept expression.
///
/// Children are reference counted so that sub-expressions can be shared
/// freely between closures, labels and terminologies.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atom(Arc<str>),
    Top,
    Bottom,
    Not(Arc<Concept>),
    And(Arc<Concept>, Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Exists(Role, Arc<Concept>),
    Forall(Role, Arc<Concept>),
    AtLeast(u32, Role, Arc<Concept>),
    AtMost(u32, Role, Arc<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<Arc<str>>) -> Self {
        Concept::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Arc::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Arc::new(a), Arc::new(b))
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Arc::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::Forall(r, Arc::new(c))
    }

    pub fn at_least(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtLeast(n, r, Arc::new(c))
    }

    pub fn at_most(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtMost(n, r, Arc::new(c))
    }

    /// Right-associated conjunction; the empty conjunction is `⊤`.
    pub fn and_all<I: IntoIterator<Item = Concept>>(items: I) -> Self {
        let mut items: Vec<Concept> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Concept::Top;
        };
        while let Some(c) = items.pop() {
            acc = Concept::and(c, acc);
        }
        acc
    }

    /// Right-associated disjunction; the empty disjunction is `⊥`.
    pub fn or_all<I: IntoIterator<Item = Concept>>(items: I) -> Self {
        let mut items: Vec<Concept> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Concept::Bottom;
        };
        while let Some(c) = items.pop() {
            acc = Concept::or(c, acc);
        }
        acc
    }

    /// Immediate sub-expressions.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bottom => vec![],
            Concept::Not(c)
            | Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c) => vec![c],
            Concept::And(a, b) | Concept::Or(a, b) => vec![a, b],
        }
    }

    /// The role of a quantifier or number restriction.
    pub fn role(&self) -> Option<&Role> {
        match self {
            Concept::Exists(r, _)
            | Concept::Forall(r, _)
            | Concept::AtLeast(_, r, _)
            | Concept::AtMost(_, r, _) => Some(r),
            _ => None,
        }
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Concept::size).sum::<usize>()
    }

    /// Nesting depth of role constructors.
    pub fn modal_depth(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::Top | Concept::Bottom => 0,
            Concept::Not(c) => c.modal_depth(),
            Concept::And(a, b) | Concept::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c) => 1 + c.modal_depth(),
        }
    }

    /// All roles occurring syntactically, as written.
    pub fn roles(&self) -> BTreeSet<Role> {
        let mut out = BTreeSet::new();
        self.collect_roles(&mut out);
        out
    }

    fn collect_roles(&self, out: &mut BTreeSet<Role>) {
        if let Some(r) = self.role() {
            out.insert(r.clone());
        }
        for c in self.children() {
            c.collect_roles(out);
        }
    }

    /// All atom names occurring in the expression.
    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        if let Concept::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Whether the expression uses any number restriction.
    pub fn has_number_restrictions(&self) -> bool {
        matches!(self, Concept::AtLeast(..) | Concept::AtMost(..))
            || self.children().into_iter().any(Concept::has_number_restrictions)
    }

    /// Negation appears only directly in front of atoms (or `⊤`).
    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Not(inner) => matches!(**inner, Concept::Atom(_) | Concept::Top),
            _ => self.children().into_iter().all(Concept::is_nnf),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atom(a) => write!(f, "{a}"),
            Concept::Top => write!(f, "top"),
            Concept::Bottom => write!(f, "bottom"),
            Concept::Not(c) => write!(f, "(not {c})"),
            Concept::And(a, b) => write!(f, "(and {a} {b})"),
            Concept::Or(a, b) => write!(f, "(or {a} {b})"),
            Concept::Exists(r, c) => write!(f, "(some {r} {c})"),
            Concept::Forall(r, c) => write!(f, "(all {r} {c})"),
            Concept::AtLeast(n, r, c) => write!(f, "(at-least {n} {r} {c})"),
            Concept::AtMost(n, r, c) => write!(f, "(at-most {n} {r} {c})"),
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atom(a) => write!(f, "{a}"),
            Concept::Top => write!(f, "⊤"),
            Concept::Bottom => write!(f, "⊥"),
            Concept::Not(c) => write!(f, "¬{c:?}"),
            Concept::And(a, b) => write!(f, "({a:?} ⊓ {b:?})"),
            Concept::Or(a, b) => write!(f, "({a:?} ⊔ {b:?})"),
            Concept::Exists(r, c) => write!(f, "∃{r:?}.{c:?}"),
            Concept::Forall(r, c) => write!(f, "∀{r:?}.{c:?}"),
            Concept::AtLeast(n, r, c) => write!(f, "(≥{n} {r:?} {c:?})"),
            Concept::AtMost(n, r, c) => write!(f, "(≤{n} {r:?} {c:?})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_conjunction_is_top() {
        assert_eq!(Concept::and_all(vec![]), Concept::Top);
        assert_eq!(Concept::or_all(vec![]), Concept::Bottom);
    }

    #[test]
    fn nary_connectives_right_associate() {
        let (a, b, c) = (Concept::atom("A"), Concept::atom("B"), Concept::atom("C"));
        let got = Concept::and_all(vec![a.clone(), b.clone(), c.clone()]);
        assert_eq!(got, Concept::and(a, Concept::and(b, c)));
    }

    #[test]
    fn nnf_flag() {
        let a = Concept::atom("A");
        assert!(Concept::not(a.clone()).is_nnf());
        assert!(!Concept::not(Concept::not(a.clone())).is_nnf());
        assert!(!Concept::exists(Role::named("R"), Concept::not(Concept::and(a.clone(), a))).is_nnf());
    }
}
