use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use super::interp::Interpretation;
use super::sat::{Cnf, Lit};
use crate::kb::Terminology;
use crate::syntax::{close_hierarchy, closure, negate, nnf, Concept, Role, RoleBox};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("model search budget exceeded at domain size {domain}")]
    BudgetExceeded { domain: usize },
}

/// Limits for [`find_model_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSearch {
    pub max_domain: usize,
    /// Conflicts the propositional search may hit per domain size.
    pub conflict_budget: u64,
}

impl Default for ModelSearch {
    fn default() -> Self {
        ModelSearch {
            max_domain: 3,
            conflict_budget: 1_000_000,
        }
    }
}

/// The axioms and role box a model must satisfy besides the concept.
fn constraints(rbox: &RoleBox, t: Option<&Terminology>, c: &Concept) -> (RoleBox, Vec<(Concept, Concept)>) {
    let gcis = t.map(|t| t.gcis.clone()).unwrap_or_default();
    let mut transitive: BTreeSet<Arc<str>> = rbox.transitive_names().clone();
    let mut inclusions: BTreeSet<(Role, Role)> = rbox.inclusions().clone();
    let mut roles: BTreeSet<Role> = rbox.universe().clone();
    roles.extend(c.roles());
    if let Some(t) = t {
        transitive.extend(t.rbox.transitive_names().iter().cloned());
        inclusions.extend(t.rbox.inclusions().iter().cloned());
        roles.extend(t.rbox.universe().iter().cloned());
    }
    for (l, r) in &gcis {
        roles.extend(l.roles());
        roles.extend(r.roles());
    }
    (close_hierarchy(transitive, inclusions).with_roles(&roles), gcis)
}

/// Looks for a model of `c` (and of `t`'s axioms, when given) on domains
/// `1..=max_domain`. `Ok(None)` only means no model that small exists.
pub fn find_model(
    c: &Concept,
    rbox: &RoleBox,
    t: Option<&Terminology>,
    max_domain: usize,
) -> Result<Option<Interpretation>, OracleError> {
    find_model_with(
        c,
        rbox,
        t,
        &ModelSearch {
            max_domain,
            ..Default::default()
        },
    )
}

/// Each domain size is encoded propositionally and handed to a CDCL
/// search. Any model found is re-checked against the semantics directly.
pub fn find_model_with(
    c: &Concept,
    rbox: &RoleBox,
    t: Option<&Terminology>,
    search: &ModelSearch,
) -> Result<Option<Interpretation>, OracleError> {
    let (rbox, gcis) = constraints(rbox, t, c);
    for n in 1..=search.max_domain {
        let enc = Encoding::build(c, &rbox, &gcis, n);
        let (cnf, enc) = enc.finish();
        let Some(assignment) = cnf
            .solve(search.conflict_budget)
            .map_err(|_| OracleError::BudgetExceeded { domain: n })?
        else {
            continue;
        };
        let model = enc.decode(&assignment);
        assert!(model.eval(c).contains(&0), "decoded model misses the concept");
        assert!(model.satisfies_rbox(&rbox), "decoded model breaks the role box");
        assert!(model.satisfies_gcis(&gcis), "decoded model breaks an axiom");
        return Ok(Some(model));
    }
    Ok(None)
}

/// Plain enumeration of atom and role extensions, with transitive closure
/// repair and individual 0 fixed inside the concept. Only usable on tiny
/// signatures; refuses more than `2^max_bits` candidates per domain size.
pub fn find_model_exhaustive(
    c: &Concept,
    rbox: &RoleBox,
    t: Option<&Terminology>,
    max_domain: usize,
    max_bits: u32,
) -> Result<Option<Interpretation>, OracleError> {
    let (rbox, gcis) = constraints(rbox, t, c);
    let mut atoms: BTreeSet<Arc<str>> = c.atoms();
    for (l, r) in &gcis {
        atoms.extend(l.atoms());
        atoms.extend(r.atoms());
    }
    let names: BTreeSet<Arc<str>> = rbox.universe().iter().map(|r| r.name_arc().clone()).collect();
    for n in 1..=max_domain {
        let bits = n * atoms.len() + n * n * names.len();
        if bits as u32 > max_bits {
            return Err(OracleError::BudgetExceeded { domain: n });
        }
        for mask in 0u64..(1u64 << bits) {
            let mut i = Interpretation::new(0..n);
            let mut bit = 0;
            for a in &atoms {
                let ext = i.atoms.entry(a.clone()).or_default();
                for x in 0..n {
                    if mask >> bit & 1 == 1 {
                        ext.insert(x);
                    }
                    bit += 1;
                }
            }
            for r in &names {
                let ext = i.roles.entry(r.clone()).or_default();
                for x in 0..n {
                    for y in 0..n {
                        if mask >> bit & 1 == 1 {
                            ext.insert((x, y));
                        }
                        bit += 1;
                    }
                }
            }
            i.repair(&rbox);
            if i.eval(c).contains(&0) && i.satisfies_gcis(&gcis) {
                return Ok(Some(i));
            }
        }
    }
    Ok(None)
}

/// Propositional encoding over a fixed domain `0..n`. Variable `t(C, x)`
/// implies `x ∈ C^I`; atom variables and role-pair variables are the
/// interpretation itself.
struct Encoding {
    n: usize,
    cnf: Cnf,
    concept_base: HashMap<Concept, usize>,
    role_base: HashMap<Arc<str>, usize>,
}

impl Encoding {
    fn build(c: &Concept, rbox: &RoleBox, gcis: &[(Concept, Concept)], n: usize) -> Encoding {
        let goal = nnf(c);
        let internal: Vec<Concept> = gcis
            .iter()
            .map(|(l, r)| nnf(&Concept::or(Concept::not(l.clone()), r.clone())))
            .collect();
        let mut concepts = closure(&goal);
        for g in &internal {
            concepts.extend(closure(g));
        }
        let mut enc = Encoding {
            n,
            cnf: Cnf::default(),
            concept_base: HashMap::new(),
            role_base: HashMap::new(),
        };
        for c in &concepts {
            let base = enc.block(n);
            enc.concept_base.insert(c.clone(), base);
        }
        for r in rbox.universe() {
            if !enc.role_base.contains_key(r.name()) {
                let base = enc.block(n * n);
                enc.role_base.insert(r.name_arc().clone(), base);
            }
        }
        for c in &concepts {
            for x in 0..n {
                enc.concept_clauses(c, x);
            }
        }
        enc.role_clauses(rbox);
        for g in &internal {
            for x in 0..n {
                let l = enc.t(g, x);
                enc.cnf.add([l]);
            }
        }
        let l = enc.t(&goal, 0);
        enc.cnf.add([l]);
        enc
    }

    fn block(&mut self, size: usize) -> usize {
        let base = self.cnf.new_var();
        for _ in 1..size {
            self.cnf.new_var();
        }
        base
    }

    fn t(&self, c: &Concept, x: usize) -> Lit {
        Lit::pos(self.concept_base[c] + x)
    }

    /// `(x, y) ∈ R^I`.
    fn e(&self, r: &Role, x: usize, y: usize) -> Lit {
        let base = self.role_base[r.name()];
        if r.is_inverse() {
            Lit::pos(base + y * self.n + x)
        } else {
            Lit::pos(base + x * self.n + y)
        }
    }

    /// Fresh `w_y ⇒ (x, y) ∈ R^I ∧ y ∈ F^I` for every `y`.
    fn witnesses(&mut self, r: &Role, f: &Concept, x: usize) -> Vec<Lit> {
        (0..self.n)
            .map(|y| {
                let w = Lit::pos(self.cnf.new_var());
                let (e, tf) = (self.e(r, x, y), self.t(f, y));
                self.cnf.add([!w, e]);
                self.cnf.add([!w, tf]);
                w
            })
            .collect()
    }

    fn concept_clauses(&mut self, c: &Concept, x: usize) {
        let t = self.t(c, x);
        let n = self.n;
        match c {
            Concept::Top | Concept::Atom(_) => {}
            Concept::Bottom => self.cnf.add([!t]),
            Concept::Not(a) => {
                let a = self.t(a, x);
                self.cnf.add([!t, !a]);
            }
            Concept::And(a, b) => {
                let (a, b) = (self.t(a, x), self.t(b, x));
                self.cnf.add([!t, a]);
                self.cnf.add([!t, b]);
            }
            Concept::Or(a, b) => {
                let (a, b) = (self.t(a, x), self.t(b, x));
                self.cnf.add([!t, a, b]);
            }
            Concept::Exists(r, f) => {
                let ws = self.witnesses(r, f, x);
                self.cnf.add(std::iter::once(!t).chain(ws));
            }
            Concept::Forall(r, f) => {
                for y in 0..n {
                    let (e, tf) = (self.e(r, x, y), self.t(f, y));
                    self.cnf.add([!t, !e, tf]);
                }
            }
            Concept::AtLeast(0, _, _) => {}
            Concept::AtLeast(k, _, _) if *k as usize > n => self.cnf.add([!t]),
            Concept::AtLeast(k, r, f) => {
                // among any n - k + 1 candidates at least one is a witness
                let ws = self.witnesses(r, f, x);
                for subset in subsets(n, n - *k as usize + 1) {
                    self.cnf.add(std::iter::once(!t).chain(subset.iter().map(|&y| ws[y])));
                }
            }
            Concept::AtMost(k, r, f) => {
                // every neighbour commits to F or ~F, so t(F, y) counts exactly
                let nf = negate(f);
                for y in 0..n {
                    let (e, tf, tn) = (self.e(r, x, y), self.t(f, y), self.t(&nf, y));
                    self.cnf.add([!t, !e, tf, tn]);
                }
                if (*k as usize) < n {
                    for subset in subsets(n, *k as usize + 1) {
                        let mut clause = vec![!t];
                        for &y in &subset {
                            clause.push(!self.e(r, x, y));
                            clause.push(!self.t(f, y));
                        }
                        self.cnf.add(clause);
                    }
                }
            }
        }
    }

    fn role_clauses(&mut self, rbox: &RoleBox) {
        let n = self.n;
        for name in rbox.transitive_names() {
            let r = Role::named(name.clone());
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let clause = [!self.e(&r, x, y), !self.e(&r, y, z), self.e(&r, x, z)];
                        self.cnf.add(clause);
                    }
                }
            }
        }
        for (r, s) in rbox.subsumption_pairs() {
            if r == s {
                continue;
            }
            for x in 0..n {
                for y in 0..n {
                    let clause = [!self.e(&r, x, y), self.e(&s, x, y)];
                    self.cnf.add(clause);
                }
            }
        }
    }

    fn finish(self) -> (Cnf, Decoder) {
        (
            self.cnf,
            Decoder {
                n: self.n,
                atoms: self
                    .concept_base
                    .iter()
                    .filter_map(|(c, &b)| match c {
                        Concept::Atom(a) => Some((a.clone(), b)),
                        _ => None,
                    })
                    .collect(),
                roles: self.role_base,
            },
        )
    }
}

struct Decoder {
    n: usize,
    atoms: Vec<(Arc<str>, usize)>,
    roles: HashMap<Arc<str>, usize>,
}

impl Decoder {
    fn decode(&self, assignment: &[bool]) -> Interpretation {
        let n = self.n;
        let mut i = Interpretation::new(0..n);
        for (a, base) in &self.atoms {
            i.atoms.insert(a.clone(), (0..n).filter(|x| assignment[base + x]).collect());
        }
        for (r, &base) in &self.roles {
            let ext = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|(x, y)| assignment[base + x * n + y])
                .collect();
            i.roles.insert(r.clone(), ext);
        }
        i
    }
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn r() -> Role {
        Role::named("R")
    }

    #[test]
    fn single_atom() {
        let m = find_model(&atom("A"), &RoleBox::empty(), None, 3).unwrap().unwrap();
        assert_eq!(m.domain.len(), 1);
        assert_eq!(m.atom("A"), [0].into_iter().collect());
    }

    #[test]
    fn exists_and_forall_need_two_individuals() {
        let c = Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), atom("B")));
        let m = find_model(&c, &RoleBox::empty(), None, 2).unwrap().unwrap();
        assert!(!m.atom("A").is_disjoint(&m.atom("B")));
        // a self-loop is enough, so the smallest model is a single point
        assert_eq!(m.domain.len(), 1);
        let strict = Concept::and(c, Concept::not(atom("A")));
        let m = find_model(&strict, &RoleBox::empty(), None, 2).unwrap().unwrap();
        assert_eq!(m.domain.len(), 2);
    }

    #[test]
    fn infinite_model_concept_has_no_small_model() {
        let f = Role::named("F");
        let rb = close_hierarchy(["R"], [(f.clone(), r())]);
        let step = Concept::exists(f.inverse(), Concept::and(atom("C"), Concept::at_most(1, f, Concept::Top)));
        let c = Concept::and_all([Concept::not(atom("C")), step.clone(), Concept::forall(r().inverse(), step)]);
        for n in 1..=4 {
            assert_eq!(find_model(&c, &rb, None, n).unwrap(), None, "domain {n}");
        }
    }

    #[test]
    fn counting() {
        let c = Concept::and_all([
            Concept::at_least(3, r(), atom("A")),
            Concept::at_most(1, r(), atom("B")),
            Concept::at_most(1, r(), Concept::not(atom("B"))),
        ]);
        assert_eq!(find_model(&c, &RoleBox::empty(), None, 4).unwrap(), None);
        let c = Concept::and(Concept::at_least(2, r(), atom("A")), Concept::at_most(1, r(), Concept::Top));
        assert_eq!(find_model(&c, &RoleBox::empty(), None, 3).unwrap(), None);
        let c = Concept::and(Concept::at_least(2, r(), atom("A")), Concept::at_most(2, r(), Concept::Top));
        let m = find_model(&c, &RoleBox::empty(), None, 3).unwrap().unwrap();
        assert_eq!(m.domain.len(), 2);
    }

    #[test]
    fn gcis_hold_everywhere() {
        let t = Terminology::new(vec![(atom("A"), Concept::exists(r(), atom("A")))], RoleBox::empty());
        let m = find_model(&atom("A"), &RoleBox::empty(), Some(&t), 3).unwrap().unwrap();
        assert_eq!(m.domain.len(), 1);
        assert!(m.pairs(&r()).contains(&(0, 0)));
        let t = Terminology::new(vec![(atom("A"), atom("B"))], RoleBox::empty());
        let c = Concept::and(atom("A"), Concept::not(atom("B")));
        assert_eq!(find_model(&c, &RoleBox::empty(), Some(&t), 3).unwrap(), None);
    }

    #[test]
    fn agrees_with_enumeration_on_tiny_inputs() {
        let tr = close_hierarchy(["R"], []);
        let cases = [
            Concept::and(Concept::exists(r(), atom("A")), Concept::forall(r(), Concept::not(atom("A")))),
            Concept::and(Concept::exists(r(), Concept::exists(r(), atom("A"))), Concept::forall(r(), Concept::not(atom("A")))),
            Concept::and(atom("A"), Concept::exists(r().inverse(), Concept::not(atom("A")))),
            Concept::at_least(2, r(), Concept::Top),
        ];
        for c in &cases {
            for rb in [&RoleBox::empty(), &tr] {
                if matches!(c, Concept::AtLeast(..)) && !rb.transitive_names().is_empty() {
                    continue;
                }
                let a = find_model(c, rb, None, 2).unwrap().is_some();
                let b = find_model_exhaustive(c, rb, None, 2, 20).unwrap().is_some();
                assert_eq!(a, b, "{c}");
            }
        }
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
