use proptest::prelude::*;

use groundness::poly::{pm_glb, pm_leq, pm_lub, Assignment, PMode, Params};
use groundness::syntax::{parse_term, Term, Var};
use groundness::unify::{mgu, Renamer, Substitution};

fn var() -> impl Strategy<Value = Term> {
    prop::sample::select(vec!["X", "Y", "Z", "W"]).prop_map(Term::var)
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![var(), prop::sample::select(vec!["a", "b", "[]", "0", "7"]).prop_map(Term::constant)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::compound("f", vec![t])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::compound("g", vec![x, y])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::cons(x, y)),
            (prop::sample::select(vec!["+", "-", "*", "/"]), inner.clone(), inner)
                .prop_map(|(op, x, y)| Term::compound(op, vec![x, y])),
        ]
    })
}

fn vars_of(ts: &[&Term]) -> Vec<Var> {
    let mut out: Vec<Var> = ts.iter().flat_map(|t| t.vars()).collect();
    out.sort();
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn rendering_parses_back(t in term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn unifiers_unify_and_are_idempotent(s in term(), t in term()) {
        if let Some(theta) = mgu(&s, &t) {
            prop_assert_eq!(theta.apply(&s), theta.apply(&t));
            for v in vars_of(&[&s, &t]) {
                let once = theta.apply(&Term::Var(v));
                prop_assert_eq!(theta.apply(&once), once.clone());
            }
        }
    }

    #[test]
    fn unification_is_symmetric_and_most_general(s in term(), t in term()) {
        let (st, ts) = (mgu(&s, &t), mgu(&t, &s));
        prop_assert_eq!(st.is_some(), ts.is_some());
        if let (Some(a), Some(b)) = (st, ts) {
            // Each factors through the other.
            for v in vars_of(&[&s, &t]) {
                let x = Term::Var(v);
                prop_assert_eq!(b.apply(&a.apply(&x)), b.apply(&x));
                prop_assert_eq!(a.apply(&b.apply(&x)), a.apply(&x));
            }
        }
    }

    #[test]
    fn a_term_unifies_with_its_instances(t in term(), a in term()) {
        // Bind every variable of `t` to a copy of `a` renamed apart from it.
        let a = Renamer::new().rename(&a);
        let rho = Substitution::from_bindings(vars_of(&[&t]).into_iter().map(|v| (v, a.clone()))).unwrap();
        let inst = rho.apply(&t);
        let theta = mgu(&t, &inst);
        prop_assert!(theta.is_some());
        let theta = theta.unwrap();
        prop_assert_eq!(theta.apply(&t), theta.apply(&inst));
    }

    #[test]
    fn instantiation_is_a_lattice_homomorphism(
        xs in prop::collection::vec(0u32..16, 0..5),
        ys in prop::collection::vec(0u32..16, 0..5),
        mask in 0u32..16,
    ) {
        let params = Params::numbered(4);
        let (a, b) = (PMode::canon(xs), PMode::canon(ys));
        let k = Assignment::from_u_mask(&params, mask);
        let (ia, ib) = (a.instantiate(&k), b.instantiate(&k));
        prop_assert_eq!(pm_lub(&a, &b).instantiate(&k), groundness::mono::mode_lub(ia, ib));
        prop_assert_eq!(pm_glb(&a, &b).instantiate(&k), groundness::mono::mode_glb(ia, ib));
        if pm_leq(&a, &b) {
            prop_assert!(groundness::mono::mode_lub(ia, ib) == ib);
        }
    }
}
