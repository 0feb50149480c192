use std::fmt::Write;

use thiserror::Error;

use crate::engine::EngineError;
use crate::syntax::{nnf, subconcepts, Concept};

use super::{subsumes, Terminology};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("classifying {name}: {source}")]
pub struct ClassifyError {
    pub name: String,
    pub source: EngineError,
}

/// The subsumption preorder over a list of named concepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    names: Vec<String>,
    /// `below[i][j]`: concept `i` is subsumed by concept `j`.
    below: Vec<Vec<bool>>,
    tests: usize,
}

impl Hierarchy {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Is `sub` subsumed by `sup`? False for unknown names.
    pub fn is_subsumed(&self, sub: &str, sup: &str) -> bool {
        match (self.index(sub), self.index(sup)) {
            (Some(i), Some(j)) => self.below[i][j],
            _ => false,
        }
    }

    /// All `(sub, sup)` pairs, reflexive ones included.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (i, row) in self.below.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b {
                    out.push((self.names[i].as_str(), self.names[j].as_str()));
                }
            }
        }
        out
    }

    /// Number of engine calls made; the rest came from shortcuts.
    pub fn tests_run(&self) -> usize {
        self.tests
    }

    fn equivalent(&self, i: usize, j: usize) -> bool {
        self.below[i][j] && self.below[j][i]
    }

    fn strictly_below(&self, i: usize, j: usize) -> bool {
        self.below[i][j] && !self.below[j][i]
    }

    /// Representatives of equivalence classes: the first name of each.
    fn representatives(&self) -> Vec<usize> {
        (0..self.names.len())
            .filter(|&i| (0..i).all(|j| !self.equivalent(i, j)))
            .collect()
    }

    /// The name hierarchy as indented text. Equivalent names share a line,
    /// and a class appears under each of its direct parents.
    pub fn render(&self) -> String {
        let reps = self.representatives();
        let direct = |child: usize, parent: usize| {
            self.strictly_below(child, parent)
                && !reps
                    .iter()
                    .any(|&m| self.strictly_below(child, m) && self.strictly_below(m, parent))
        };
        let mut out = String::new();
        fn walk(
            h: &Hierarchy,
            reps: &[usize],
            direct: &dyn Fn(usize, usize) -> bool,
            node: usize,
            depth: usize,
            out: &mut String,
        ) {
            let names: Vec<&str> = (0..h.names.len())
                .filter(|&j| h.equivalent(node, j))
                .map(|j| h.names[j].as_str())
                .collect();
            let _ = writeln!(out, "{}{}", "  ".repeat(depth), names.join(" = "));
            for &c in reps {
                if direct(c, node) {
                    walk(h, reps, direct, c, depth + 1, out);
                }
            }
        }
        for &r in &reps {
            if !reps.iter().any(|&p| self.strictly_below(r, p)) {
                walk(self, &reps, &direct, r, 0, &mut out);
            }
        }
        out
    }
}

/// Conjuncts of a concept, looking through nested conjunctions.
fn conjuncts(c: &Concept) -> Vec<&Concept> {
    match c {
        Concept::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        _ => vec![c],
    }
}

/// Subsumption between every pair of the named concepts.
///
/// A pair is decided without the engine when the subsumer's definition
/// is a conjunct of the subsumee's (told), or when it follows by
/// transitivity from pairs already found.
pub fn classify(t: &Terminology, names: &[(String, Concept)]) -> Result<Hierarchy, ClassifyError> {
    for (name, c) in names {
        let bad = subconcepts(&nnf(c)).into_iter().find_map(|s| match &s {
            Concept::AtLeast(_, r, _) | Concept::AtMost(_, r, _) if !t.rbox.is_simple(r) => Some((r.clone(), s.clone())),
            _ => None,
        });
        if let Some((role, concept)) = bad {
            return Err(ClassifyError {
                name: name.clone(),
                source: EngineError::NonSimpleRoleInNumberRestriction { role, concept },
            });
        }
    }
    let n = names.len();
    let mut known: Vec<Vec<Option<bool>>> = vec![vec![None; n]; n];
    for (i, row) in known.iter_mut().enumerate() {
        row[i] = Some(true);
    }
    let mut tests = 0;
    for i in 0..n {
        for j in 0..n {
            if known[i][j].is_some() {
                continue;
            }
            let (ci, cj) = (&names[i].1, &names[j].1);
            let holds = if conjuncts(ci).contains(&cj) {
                true
            } else {
                tests += 1;
                subsumes(t, ci, cj).map_err(|source| ClassifyError {
                    name: names[i].0.clone(),
                    source,
                })?
            };
            known[i][j] = Some(holds);
            if holds {
                close(&mut known, i, j);
            }
        }
    }
    let below = known
        .into_iter()
        .map(|row| row.into_iter().map(|b| b.expect("every pair decided")).collect())
        .collect();
    Ok(Hierarchy {
        names: names.iter().map(|(name, _)| name.clone()).collect(),
        below,
        tests,
    })
}

/// Records every pair implied by `i ⊑ j` and the pairs already known.
fn close(known: &mut [Vec<Option<bool>>], i: usize, j: usize) {
    let n = known.len();
    let subs: Vec<usize> = (0..n).filter(|&a| known[a][i] == Some(true)).collect();
    let sups: Vec<usize> = (0..n).filter(|&b| known[j][b] == Some(true)).collect();
    for &a in &subs {
        for &b in &sups {
            known[a][b] = Some(true);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Role, RoleBox};

    fn atom(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn named(items: &[(&str, Concept)]) -> Vec<(String, Concept)> {
        items.iter().map(|(n, c)| (n.to_string(), c.clone())).collect()
    }

    #[test]
    fn conjunction_below_conjunct() {
        let names = named(&[("A", atom("A")), ("AB", Concept::and(atom("A"), atom("B")))]);
        let h = classify(&Terminology::empty(), &names).unwrap();
        assert!(h.is_subsumed("AB", "A"));
        assert!(!h.is_subsumed("A", "AB"));
        assert_eq!(h.render(), "A\n  AB\n");
    }

    #[test]
    fn existential_specialisation() {
        let r = Role::named("R");
        let names = named(&[
            ("C1", Concept::exists(r.clone(), atom("A"))),
            ("C2", Concept::exists(r, Concept::and(atom("A"), atom("B")))),
        ]);
        let h = classify(&Terminology::empty(), &names).unwrap();
        assert!(h.is_subsumed("C2", "C1"));
        assert!(!h.is_subsumed("C1", "C2"));
    }

    #[test]
    fn mutual_axioms_make_equivalents() {
        let t = Terminology::new(vec![(atom("A"), atom("B")), (atom("B"), atom("A"))], RoleBox::empty());
        let names = named(&[("A", atom("A")), ("B", atom("B"))]);
        let h = classify(&t, &names).unwrap();
        assert!(h.is_subsumed("A", "B") && h.is_subsumed("B", "A"));
        assert_eq!(h.render(), "A = B\n");
    }

    #[test]
    fn names_the_definition_with_a_non_simple_role() {
        let r = Role::named("R");
        let t = Terminology::new(vec![], crate::syntax::close_hierarchy(["R"], []));
        let names = named(&[("Fine", atom("A")), ("Bad", Concept::at_most(1, r, Concept::Top))]);
        let e = classify(&t, &names).unwrap_err();
        assert_eq!(e.name, "Bad");
    }

    #[test]
    fn shortcuts_agree_with_exhaustive_tests() {
        let names = named(&[
            ("A", atom("A")),
            ("AB", Concept::and(atom("A"), atom("B"))),
            ("ABC", Concept::and(Concept::and(atom("A"), atom("B")), atom("C"))),
            ("AorB", Concept::or(atom("A"), atom("B"))),
        ]);
        let t = Terminology::empty();
        let h = classify(&t, &names).unwrap();
        for (a, ca) in &names {
            for (b, cb) in &names {
                assert_eq!(h.is_subsumed(a, b), subsumes(&t, ca, cb).unwrap(), "{a} ⊑ {b}");
            }
        }
        assert!(h.tests_run() < names.len() * (names.len() - 1));
    }
}
