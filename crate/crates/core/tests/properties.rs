//! Property tests over random concepts, role boxes, relations and
//! interpretations.

use std::collections::BTreeSet;

use proptest::prelude::*;
use shiq_core::format::{parse_concept, parse_kb};
use shiq_core::oracle::{find_model, transitive_closure, Interpretation, Relation};
use shiq_core::shiq::{decide_sat, decide_sat_with, validate_completion_tree};
use shiq_core::si::{si_decide_sat, si_decide_sat_trace};
use shiq_core::syntax::{close_hierarchy, closure, extended_closure, negate, nnf, subconcepts};
use shiq_core::{Concept, EngineOptions, Role, RoleBox};

const ATOMS: [&str; 3] = ["A", "B", "C"];
const NAMES: [&str; 3] = ["R", "S", "T"];

fn any_role() -> impl Strategy<Value = Role> {
    (0..NAMES.len(), any::<bool>()).prop_map(|(i, inverse)| {
        let r = Role::named(NAMES[i]);
        if inverse {
            r.inverse()
        } else {
            r
        }
    })
}

fn concept_with(roles: BoxedStrategy<Role>, counting: bool) -> impl Strategy<Value = Concept> {
    let leaf = prop_oneof![
        Just(Concept::Top),
        Just(Concept::Bottom),
        (0..ATOMS.len()).prop_map(|i| Concept::atom(ATOMS[i])),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let roles = roles.clone();
        let mut options = vec![
            inner.clone().prop_map(Concept::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)).boxed(),
            (roles.clone(), inner.clone()).prop_map(|(r, c)| Concept::exists(r, c)).boxed(),
            (roles.clone(), inner.clone()).prop_map(|(r, c)| Concept::forall(r, c)).boxed(),
        ];
        if counting {
            options.push((0..3u32, roles.clone(), inner.clone()).prop_map(|(n, r, c)| Concept::at_least(n, r, c)).boxed());
            options.push((0..3u32, roles, inner).prop_map(|(n, r, c)| Concept::at_most(n, r, c)).boxed());
        }
        proptest::strategy::Union::new(options)
    })
}

fn concept() -> impl Strategy<Value = Concept> {
    concept_with(any_role().boxed(), true)
}

fn rbox() -> impl Strategy<Value = RoleBox> {
    (
        proptest::collection::btree_set(0..NAMES.len(), 0..=2),
        proptest::collection::vec((any_role(), any_role()), 0..=3),
    )
        .prop_map(|(trans, incl)| {
            let names: Vec<Role> = NAMES.iter().map(|n| Role::named(*n)).collect();
            close_hierarchy(trans.into_iter().map(|i| NAMES[i]), incl).with_roles(&names)
        })
}

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::btree_set((0..n, 0..n), 0..=n * n)
}

fn interpretation() -> impl Strategy<Value = Interpretation> {
    (1..=4usize).prop_flat_map(|n| {
        (
            proptest::collection::vec(proptest::collection::btree_set(0..n, 0..=n), ATOMS.len()),
            proptest::collection::vec(relation(n), NAMES.len()),
        )
            .prop_map(move |(atoms, roles)| {
                let mut i = Interpretation::new(0..n);
                for (a, ext) in ATOMS.iter().zip(atoms) {
                    i = i.with_atom(a, ext);
                }
                for (r, ext) in NAMES.iter().zip(roles) {
                    i = i.with_role(r, ext);
                }
                i
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nnf_is_idempotent_and_normal(c in concept()) {
        let n = nnf(&c);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(nnf(&n), n);
    }

    #[test]
    fn nnf_and_negation_preserve_semantics(c in concept(), i in interpretation()) {
        let ext = i.eval(&c);
        prop_assert_eq!(i.eval(&nnf(&c)), ext.clone());
        let complement: BTreeSet<usize> = i.domain.difference(&ext).copied().collect();
        prop_assert_eq!(i.eval(&negate(&nnf(&c))), complement);
    }

    #[test]
    fn closure_is_closed(c in concept()) {
        let d = nnf(&c);
        let clos = closure(&d);
        prop_assert!(clos.contains(&d));
        prop_assert!(subconcepts(&d).is_subset(&clos));
        for e in &clos {
            prop_assert!(clos.contains(&negate(e)));
            for child in e.children() {
                prop_assert!(clos.contains(child));
            }
        }
    }

    #[test]
    fn extended_closure_covers_transitive_propagation(c in concept(), rb in rbox()) {
        let d = nnf(&c);
        let ext = extended_closure(&d, &rb);
        prop_assert!(closure(&d).is_subset(&ext));
        for e in &ext {
            prop_assert!(ext.contains(&negate(e)));
            if let Concept::Forall(s, f) = e {
                for r in rb.universe() {
                    if rb.is_transitive(r) && rb.subsumed_by(r, s) {
                        prop_assert!(ext.contains(&Concept::forall(r.clone(), (**f).clone())));
                    }
                }
            }
        }
    }

    #[test]
    fn role_hierarchy_is_an_inverse_symmetric_preorder(rb in rbox()) {
        let roles: Vec<&Role> = rb.universe().iter().collect();
        for r in &roles {
            prop_assert!(rb.subsumed_by(r, r));
            prop_assert_eq!(rb.is_transitive(r), rb.is_transitive(&r.inverse()));
            for s in &roles {
                prop_assert_eq!(rb.subsumed_by(r, s), rb.subsumed_by(&r.inverse(), &s.inverse()));
                for t in &roles {
                    if rb.subsumed_by(r, s) && rb.subsumed_by(s, t) {
                        prop_assert!(rb.subsumed_by(r, t));
                    }
                }
            }
        }
        for (r, s) in rb.inclusions() {
            prop_assert!(rb.subsumed_by(r, s));
        }
    }

    #[test]
    fn transitive_closure_is_idempotent_and_least(r in relation(5)) {
        let t = transitive_closure(&r);
        prop_assert!(r.is_subset(&t));
        prop_assert_eq!(transitive_closure(&t), t.clone());
        for &(x, y) in &t {
            for &(y2, z) in &t {
                if y == y2 {
                    prop_assert!(t.contains(&(x, z)));
                }
            }
        }
        // every added pair is witnessed by a path through the original pairs
        for &(x, z) in &t {
            let mut seen = BTreeSet::from([x]);
            let mut frontier = vec![x];
            let mut found = false;
            while let Some(u) = frontier.pop() {
                for &(a, b) in &r {
                    if a == u {
                        found |= b == z;
                        if seen.insert(b) {
                            frontier.push(b);
                        }
                    }
                }
            }
            prop_assert!(found);
        }
    }

    #[test]
    fn concept_printing_round_trips(c in concept()) {
        prop_assert_eq!(parse_concept(&c.to_string(), &[]).unwrap(), c);
    }

    #[test]
    fn kb_printing_round_trips(
        gcis in proptest::collection::vec((concept(), concept()), 0..4),
        defs in proptest::collection::vec(concept(), 0..3),
        rb in proptest::collection::vec((0..NAMES.len(), any_role()), 0..3),
        trans in proptest::collection::btree_set(0..NAMES.len(), 0..2),
    ) {
        let mut text = String::new();
        for t in &trans {
            text += &format!("(transitive {})\n", NAMES[*t]);
        }
        for (r, s) in &rb {
            text += &format!("(implies-role {} {s})\n", NAMES[*r]);
        }
        for (i, d) in defs.iter().enumerate() {
            text += &format!("(define D{i} {d})\n");
        }
        for (c, d) in &gcis {
            text += &format!("(implies {c} {d})\n(sat {c})\n");
        }
        let doc = parse_kb(&text).unwrap();
        let again = parse_kb(&doc.to_string()).unwrap();
        prop_assert_eq!(&again.role_decls, &doc.role_decls);
        prop_assert_eq!(&again.definitions, &doc.definitions);
        prop_assert_eq!(&again.gcis, &doc.gcis);
        prop_assert_eq!(&again.queries, &doc.queries);
    }
}

fn simple_counting() -> impl Strategy<Value = (Concept, RoleBox)> {
    // R and S stay simple: only T is ever transitive
    let rb = (any::<bool>(), proptest::option::of((0..2usize, 0..2usize))).prop_map(|(t, incl)| {
        let incl = incl.map(|(a, b)| (Role::named(NAMES[a]), Role::named(NAMES[b])));
        let trans: Vec<&str> = if t { vec!["T"] } else { vec![] };
        close_hierarchy(trans, incl).with_roles(&NAMES.map(Role::named))
    });
    let counted = prop_oneof![Just(Role::named("R")), Just(Role::named("S")), Just(Role::inverse_of("R"))];
    let tr = prop_oneof![Just(Role::named("T")), Just(Role::inverse_of("T"))];
    (concept_with(prop_oneof![counted.clone(), tr].boxed(), false), concept_with(counted.boxed(), true), rb)
        .prop_map(|(a, b, rb)| (Concept::and(a, b), rb))
}

fn si_concept() -> impl Strategy<Value = (Concept, RoleBox)> {
    (concept_with(any_role().boxed(), false), proptest::collection::btree_set(0..NAMES.len(), 0..=2)).prop_map(|(c, t)| {
        let rb = close_hierarchy(t.into_iter().map(|i| NAMES[i]), Vec::<(Role, Role)>::new());
        (c, rb.with_roles(&NAMES.map(Role::named)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn witnesses_validate_and_small_models_are_found((c, rb) in simple_counting()) {
        let v = decide_sat(&c, &rb).unwrap();
        if let Some(w) = &v.witness {
            prop_assert!(validate_completion_tree(w, &c, &rb).is_ok());
        }
        if find_model(&c, &rb, None, 2).unwrap().is_some() {
            prop_assert!(v.is_sat(), "{} has a model", c);
        }
    }

    #[test]
    fn seeds_only_change_the_order((c, rb) in simple_counting(), seed in any::<u64>()) {
        let plain = decide_sat(&c, &rb).unwrap().answer;
        let opts = EngineOptions { seed: Some(seed), ..Default::default() };
        prop_assert_eq!(decide_sat_with(&c, &rb, &opts).unwrap().answer, plain);
    }

    #[test]
    fn si_engines_agree((c, rb) in si_concept()) {
        let a = si_decide_sat(&c, &rb).unwrap();
        let b = si_decide_sat_trace(&c, &rb).unwrap();
        let s = decide_sat(&c, &rb).unwrap();
        prop_assert_eq!(a.answer, b.answer);
        prop_assert_eq!(a.answer, s.answer);
        if let Some(w) = &a.witness {
            prop_assert!(w.validate().is_ok());
            prop_assert!(w.check_path_property().is_ok());
        }
    }
}
