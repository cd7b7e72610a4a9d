//! Concrete unification of substitution sets, by the defining formula and
//! by the flat second path.

use std::collections::HashMap;

use crate::syntax::{Atom, Term, Var};
use crate::unify::{compose, mgu_atoms, Rename, Renamer, Substitution};

use super::flat::FlatPair;
use super::universe::{ConcreteSet, Universe};
use super::OracleError;

/// `mgu(Ψ(θ1)(Ψ(a1)), θ2(a2)) ∘ θ2`, or `None` on failure.
pub fn unify_one(
    a1: &Atom,
    theta1: &Substitution,
    a2: &Atom,
    theta2: &Substitution,
    r: &mut Renamer,
) -> Option<Substitution> {
    let psi = r.fresh();
    let left = theta1.rename(&psi).apply_atom(&a1.rename(&psi));
    let right = theta2.apply_atom(a2);
    let m = mgu_atoms(&left, &right)?;
    compose(Some(&m), Some(theta2))
}

/// All successful unifications of a member of `s1` with a member of `s2`.
pub fn cunify(a1: &Atom, s1: &ConcreteSet, a2: &Atom, s2: &ConcreteSet, r: &mut Renamer) -> ConcreteSet {
    let mut subs = Vec::new();
    for t1 in &s1.subs {
        for t2 in &s2.subs {
            if let Some(s) = unify_one(a1, t1, a2, t2, r) {
                if !subs.contains(&s) {
                    subs.push(s);
                }
            }
        }
    }
    ConcreteSet { scope: s2.scope.clone(), subs }
}

/// Renames variables to `_V1, _V2, ...` by first occurrence across the
/// tuple, so variant tuples compare equal.
pub fn canonical_tuple(ts: &[Term]) -> Vec<Term> {
    fn go(t: &Term, names: &mut HashMap<Var, Var>) -> Term {
        match t {
            Term::Var(v) => {
                let n = names.len();
                Term::Var(names.entry(v.clone()).or_insert_with(|| Var::new(format!("_V{}", n + 1))).clone())
            }
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| go(a, names)).collect()),
        }
    }
    let mut names = HashMap::new();
    ts.iter().map(|t| go(t, &mut names)).collect()
}

/// Compares the formula route with the flat route on every pair drawn
/// from `s1 × s2`, which must be enumerated over `u`. Returns the first
/// disagreement.
pub fn compare_paths(
    u: &Universe,
    a1: &Atom,
    s1: &ConcreteSet,
    a2: &Atom,
    s2: &ConcreteSet,
    r: &mut Renamer,
) -> Result<Option<String>, OracleError> {
    let ids = |s: &Substitution, scope: &[Var]| -> Result<Vec<u32>, OracleError> {
        scope
            .iter()
            .map(|v| {
                let t = s.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone()));
                u.id(&t).ok_or_else(|| OracleError::BudgetExceeded(format!("{t} is outside the universe")))
            })
            .collect()
    };
    let flat = FlatPair::new(u, a1, &s1.scope, a2, &s2.scope);
    let mut scratch = flat.as_ref().map(|f| f.scratch());
    for t1 in &s1.subs {
        let i1 = ids(t1, &s1.scope)?;
        for t2 in &s2.subs {
            let i2 = ids(t2, &s2.scope)?;
            let formula = unify_one(a1, t1, a2, t2, r)
                .map(|s| canonical_tuple(&s2.scope.iter().map(|v| s.apply(&Term::Var(v.clone()))).collect::<Vec<_>>()));
            let direct = match (&flat, scratch.as_mut()) {
                (Some(f), Some(sc)) => f.unify(&i1, &i2, sc).then(|| canonical_tuple(&f.second_terms(&i1, &i2, sc))),
                _ => None,
            };
            if formula != direct {
                return Ok(Some(format!(
                    "{a1} under {t1} with {a2} under {t2}: formula gives {formula:?}, flat path gives {direct:?}"
                )));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_term};

    fn sub(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::from_bindings(pairs.iter().map(|(v, t)| (Var::new(v), parse_term(t).unwrap()))).unwrap()
    }

    #[test]
    fn formula_on_a_ground_binding() {
        let p = parse_atom("p(X)").unwrap();
        let one = ConcreteSet { scope: vec![Var::new("X")], subs: vec![sub(&[("X", "a")])] };
        let free = ConcreteSet { scope: vec![Var::new("X")], subs: vec![Substitution::new()] };
        let out = cunify(&p, &one, &p, &free, &mut Renamer::new());
        assert_eq!(out.subs.len(), 1);
        assert_eq!(out.subs[0].get(&Var::new("X")).unwrap().to_string(), "a");
    }

    #[test]
    fn empty_and_failing_inputs() {
        let p = parse_atom("p(X)").unwrap();
        let q = parse_atom("p(b)").unwrap();
        let one = ConcreteSet { scope: vec![Var::new("X")], subs: vec![sub(&[("X", "a")])] };
        let none = ConcreteSet { scope: vec![Var::new("X")], subs: vec![] };
        assert!(cunify(&p, &one, &p, &none, &mut Renamer::new()).is_empty());
        assert!(cunify(&p, &none, &p, &one, &mut Renamer::new()).is_empty());
        let empty = ConcreteSet { scope: vec![], subs: vec![Substitution::new()] };
        assert!(cunify(&p, &one, &q, &empty, &mut Renamer::new()).is_empty());
    }

    #[test]
    fn variants_canonicalize_alike() {
        let a = canonical_tuple(&[parse_term("f(A,B)").unwrap(), parse_term("A").unwrap()]);
        let b = canonical_tuple(&[parse_term("f(Q,R)").unwrap(), parse_term("Q").unwrap()]);
        assert_eq!(a, b);
    }

    #[test]
    fn paths_agree_on_a_small_sweep() {
        let u = Universe::standard(2).unwrap();
        let a = parse_atom("p(X, f(X))").unwrap();
        let b = parse_atom("p(g(Y, a), Y)").unwrap();
        let s1 = super::super::universe::enumerate_subs(&[Var::new("X")], &u).unwrap();
        let s2 = super::super::universe::enumerate_subs(&[Var::new("Y")], &u).unwrap();
        assert_eq!(compare_paths(&u, &a, &s1, &b, &s2, &mut Renamer::new()).unwrap(), None);
    }
}
