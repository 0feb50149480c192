//! Seeded random generators for the test corpora.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shiq_core::syntax::{close_hierarchy, Concept, Role, RoleBox};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atom(n: &str) -> Concept {
    Concept::atom(n)
}

pub fn role(n: &str) -> Role {
    Role::named(n)
}

/// Shape of a random concept corpus.
#[derive(Clone, Debug)]
pub struct Gen {
    pub atoms: Vec<&'static str>,
    pub roles: Vec<Role>,
    /// Roles allowed in number restrictions; none means no counting.
    pub counting_roles: Vec<Role>,
    pub max_count: u32,
    pub depth: usize,
    /// Upper bound on the number of constructors.
    pub max_size: usize,
}

impl Gen {
    /// ALC over three atoms and two roles.
    pub fn alc() -> Self {
        Gen {
            atoms: vec!["A", "B", "C"],
            roles: vec![role("R"), role("S")],
            counting_roles: vec![],
            max_count: 0,
            depth: 3,
            max_size: 12,
        }
    }

    pub fn concept(&self, rng: &mut ChaCha8Rng) -> Concept {
        let budget = rng.gen_range(self.max_size / 2..=self.max_size);
        self.grow(rng, self.depth, budget)
    }

    /// A conjunction of `clauses` disjunctions of two or three literals,
    /// where a literal is a possibly negated atom or a role restriction on
    /// a smaller clause set. The clause count steers the share of
    /// unsatisfiable outputs.
    pub fn clausal(&self, rng: &mut ChaCha8Rng, clauses: usize) -> Concept {
        self.clauses(rng, self.depth, clauses)
    }

    fn clauses(&self, rng: &mut ChaCha8Rng, depth: usize, n: usize) -> Concept {
        Concept::and_all((0..n).map(|_| {
            let width = rng.gen_range(1..=2);
            Concept::or_all((0..width).map(|_| self.literal(rng, depth)))
        }))
    }

    fn literal(&self, rng: &mut ChaCha8Rng, depth: usize) -> Concept {
        if depth == 0 || rng.gen_bool(0.7) {
            let a = atom(self.atoms.choose(rng).unwrap());
            return if rng.gen() { a } else { Concept::not(a) };
        }
        let n = rng.gen_range(1..=2);
        let f = self.clauses(rng, depth - 1, n);
        if !self.counting_roles.is_empty() && rng.gen_bool(0.35) {
            let r = self.counting_roles.choose(rng).unwrap().clone();
            let n = rng.gen_range(0..=self.max_count);
            return if rng.gen() { Concept::at_least(n, r, f) } else { Concept::at_most(n, r, f) };
        }
        let r = self.roles.choose(rng).unwrap().clone();
        if rng.gen() {
            Concept::exists(r, f)
        } else {
            Concept::forall(r, f)
        }
    }

    fn leaf(&self, rng: &mut ChaCha8Rng) -> Concept {
        match rng.gen_range(0..20) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            2..=10 => atom(self.atoms.choose(rng).unwrap()),
            _ => Concept::not(atom(self.atoms.choose(rng).unwrap())),
        }
    }

    fn role_filler(&self, rng: &mut ChaCha8Rng, depth: usize, size: usize) -> Concept {
        self.grow(rng, depth - 1, size - 1)
    }

    /// A concept with at most `size` constructors and modal depth at most
    /// `depth`.
    fn grow(&self, rng: &mut ChaCha8Rng, depth: usize, size: usize) -> Concept {
        if size <= 1 {
            return self.leaf(rng);
        }
        let modal = depth > 0 && rng.gen_bool(0.2);
        if modal {
            let f = self.role_filler(rng, depth, size);
            let counting = !self.counting_roles.is_empty() && rng.gen_bool(0.35);
            if counting {
                let r = self.counting_roles.choose(rng).unwrap().clone();
                let n = rng.gen_range(0..=self.max_count);
                return if rng.gen() { Concept::at_least(n, r, f) } else { Concept::at_most(n, r, f) };
            }
            let r = self.roles.choose(rng).unwrap().clone();
            return if rng.gen() { Concept::exists(r, f) } else { Concept::forall(r, f) };
        }
        match rng.gen_range(0..6) {
            k if k == 0 || size < 3 => Concept::not(self.grow(rng, depth, size - 1)),
            k => {
                let left = rng.gen_range(1..size - 1);
                let a = self.grow(rng, depth, left);
                let b = self.grow(rng, depth, size - 1 - left);
                if k <= 3 {
                    Concept::and(a, b)
                } else {
                    Concept::or(a, b)
                }
            }
        }
    }
}

/// A random role box over `R` and `S`: optionally one or both transitive,
/// optionally one inclusion between them.
pub fn rbox(rng: &mut ChaCha8Rng, inverses: bool) -> RoleBox {
    let mut transitive = Vec::new();
    for n in ["R", "S"] {
        if rng.gen_bool(0.4) {
            transitive.push(n);
        }
    }
    let mut inclusions = Vec::new();
    if rng.gen_bool(0.5) {
        let (a, b) = if rng.gen() { ("R", "S") } else { ("S", "R") };
        let sup = if inverses && rng.gen() { role(b).inverse() } else { role(b) };
        inclusions.push((role(a), sup));
    }
    close_hierarchy(transitive, inclusions).with_roles(&[role("R"), role("S")])
}

/// SHIQ over `R`, `S` and their inverses with a random role box; counting
/// (numbers up to 2) only over the roles the box leaves simple.
pub fn shiq_case(rng: &mut ChaCha8Rng) -> (Concept, RoleBox) {
    let rb = rbox(rng, true);
    let roles = vec![role("R"), role("S"), role("R").inverse(), role("S").inverse()];
    let counting_roles = roles.iter().filter(|r| rb.is_simple(r)).cloned().collect();
    let g = Gen {
        atoms: vec!["A", "B"],
        roles,
        counting_roles,
        max_count: 2,
        depth: 2,
        max_size: 10,
    };
    let k = rng.gen_range(2..=6);
    (g.clausal(rng, k), rb)
}

/// SI over `R`, `S` and their inverses; either role may be transitive.
pub fn si_case(rng: &mut ChaCha8Rng) -> (Concept, RoleBox) {
    let transitive: Vec<&str> = ["R", "S"].into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let rb = close_hierarchy(transitive, Vec::<(Role, Role)>::new()).with_roles(&[role("R"), role("S")]);
    let g = Gen {
        atoms: vec!["A", "B", "C"],
        roles: vec![role("R"), role("S"), role("R").inverse(), role("S").inverse()],
        counting_roles: vec![],
        max_count: 0,
        depth: 3,
        max_size: 12,
    };
    let k = rng.gen_range(2..=7);
    (g.clausal(rng, k), rb)
}
