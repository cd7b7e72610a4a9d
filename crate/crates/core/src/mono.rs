//! The two-point groundness domain: modes `g ⊴ u`, abstract substitutions
//! mapping variables to modes, and abstract unification over them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::absub::{self, Abs, DomainError, ModeLattice, UnifyTrace};
use crate::syntax::{Atom, Term};
use crate::unify::{EqSet, Renamer, Substitution};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Definitely ground.
    #[serde(rename = "g")]
    G,
    /// Groundness unknown.
    #[serde(rename = "u")]
    U,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::G, Mode::U];

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "g" => Some(Mode::G),
            "u" => Some(Mode::U),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::G => "g",
            Mode::U => "u",
        })
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl ModeLattice for Mode {
    fn bottom() -> Self {
        Mode::G
    }

    fn top() -> Self {
        Mode::U
    }

    fn leq(&self, other: &Self) -> bool {
        self <= other
    }

    fn join(&self, other: &Self) -> Self {
        mode_lub(*self, *other)
    }

    fn meet(&self, other: &Self) -> Self {
        mode_glb(*self, *other)
    }
}

pub fn mode_lub(a: Mode, b: Mode) -> Mode {
    a.max(b)
}

pub fn mode_glb(a: Mode, b: Mode) -> Mode {
    a.min(b)
}

pub type MonoAbs = Abs<Mode>;

pub fn mabs_leq(a: &MonoAbs, b: &MonoAbs) -> Result<bool, DomainError> {
    a.leq(b)
}

pub fn mabs_lub(a: &MonoAbs, b: &MonoAbs) -> Result<MonoAbs, DomainError> {
    a.join(b)
}

pub fn mabs_glb(a: &MonoAbs, b: &MonoAbs) -> Result<MonoAbs, DomainError> {
    a.meet(b)
}

pub fn mdown(e: &EqSet, zeta: &MonoAbs) -> Result<MonoAbs, DomainError> {
    absub::down(e, zeta)
}

pub fn mup(e: &EqSet, eta: &MonoAbs) -> Result<MonoAbs, DomainError> {
    absub::up(e, eta)
}

pub fn munify(a: &Atom, theta: &MonoAbs, b: &Atom, sigma: &MonoAbs, r: &mut Renamer) -> Result<MonoAbs, DomainError> {
    absub::aunify(a, theta, b, sigma, r)
}

pub fn munify_traced(
    a: &Atom,
    theta: &MonoAbs,
    b: &Atom,
    sigma: &MonoAbs,
    r: &mut Renamer,
) -> Result<UnifyTrace<Mode>, DomainError> {
    absub::aunify_traced(a, theta, b, sigma, r)
}

/// Whether `theta` is described by `abs`: every variable marked `g` is
/// mapped to a ground term. Unbound variables map to themselves.
pub fn gamma_member(theta: &Substitution, abs: &MonoAbs) -> bool {
    abs.iter().all(|(v, m)| match m {
        Mode::U => true,
        Mode::G => theta.get(v).is_some_and(Term::is_ground),
    })
}

/// Renders `{X/g, Y/u}` with variables sorted by name.
pub fn render(abs: &MonoAbs) -> String {
    abs.render_with([], |m| m.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_term, Var};
    use crate::unify::{eq_of, mgu, mgu_atoms, Rename};

    pub(crate) fn mabs(entries: &[(&str, Mode)]) -> MonoAbs {
        Abs::new(entries.iter().map(|(v, m)| (Var::new(v), *m)))
    }

    use Mode::{G, U};

    #[test]
    fn mode_lattice_ops() {
        assert_eq!(mode_lub(G, U), U);
        assert_eq!(mode_glb(G, U), G);
        assert_eq!(mode_glb(U, U), U);
    }

    #[test]
    fn mode_lattice_laws_exhaustive() {
        for a in Mode::ALL {
            assert_eq!(mode_lub(a, a), a);
            assert_eq!(mode_glb(a, a), a);
            for b in Mode::ALL {
                assert_eq!(mode_lub(a, b), mode_lub(b, a));
                assert_eq!(mode_glb(a, b), mode_glb(b, a));
                assert_eq!(mode_lub(a, mode_glb(a, b)), a);
                assert_eq!(mode_glb(a, mode_lub(a, b)), a);
                assert_eq!(a.leq(&b), mode_lub(a, b) == b);
                for c in Mode::ALL {
                    assert_eq!(mode_lub(a, mode_lub(b, c)), mode_lub(mode_lub(a, b), c));
                    assert_eq!(mode_glb(a, mode_glb(b, c)), mode_glb(mode_glb(a, b), c));
                }
            }
        }
    }

    fn all_mabs(vars: &[&str]) -> Vec<MonoAbs> {
        let n = vars.len();
        (0..1u32 << n)
            .map(|bits| {
                Abs::new(vars.iter().enumerate().map(|(i, v)| (Var::new(v), if bits >> i & 1 == 1 { U } else { G })))
            })
            .collect()
    }

    #[test]
    fn pointwise_lub_is_least_upper_bound() {
        for scope in [&["X"][..], &["X", "Y"], &["X", "Y", "Z"]] {
            let all = all_mabs(scope);
            for a in &all {
                assert!(mabs_leq(a, a).unwrap());
                for b in &all {
                    let j = mabs_lub(a, b).unwrap();
                    let m = mabs_glb(a, b).unwrap();
                    assert!(mabs_leq(a, &j).unwrap() && mabs_leq(b, &j).unwrap());
                    assert!(mabs_leq(&m, a).unwrap() && mabs_leq(&m, b).unwrap());
                    for c in &all {
                        if mabs_leq(a, c).unwrap() && mabs_leq(b, c).unwrap() {
                            assert!(mabs_leq(&j, c).unwrap());
                        }
                        if mabs_leq(c, a).unwrap() && mabs_leq(c, b).unwrap() {
                            assert!(mabs_leq(c, &m).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pointwise_examples() {
        let a = mabs(&[("X", G), ("Y", U)]);
        let b = mabs(&[("X", U), ("Y", G)]);
        assert_eq!(mabs_lub(&a, &b).unwrap(), mabs(&[("X", U), ("Y", U)]));
        assert!(mabs_leq(&mabs(&[("X", G)]), &mabs(&[("X", U)])).unwrap());
    }

    #[test]
    fn scope_mismatch_is_an_error() {
        let a = mabs(&[("X", G)]);
        let b = mabs(&[("Y", G)]);
        assert!(matches!(mabs_leq(&a, &b), Err(DomainError::ScopeMismatch(_))));
        assert!(matches!(mabs_lub(&a, &b), Err(DomainError::ScopeMismatch(_))));
        let e = eq_of(mgu(&parse_term("X").unwrap(), &parse_term("f(W)").unwrap())).unwrap();
        assert!(matches!(mdown(&e, &a), Err(DomainError::ScopeMismatch(_))));
    }

    fn worked_equations() -> EqSet {
        let mut r = Renamer::new();
        let a = r.rename(&parse_atom("g(X,f(Y,f(Z,Z)),Y)").unwrap());
        eq_of(mgu_atoms(&a, &parse_atom("g(f(X,Y),Z,X)").unwrap())).unwrap()
    }

    #[test]
    fn mdown_worked_example() {
        let zeta = mabs(&[("X#0", G), ("Y#0", U), ("Z#0", U), ("X", U), ("Y", U), ("Z", G)]);
        let eta = mdown(&worked_equations(), &zeta).unwrap();
        assert_eq!(eta, mabs(&[("X#0", G), ("Y#0", G), ("Z#0", G), ("X", U), ("Y", G), ("Z", G)]));
    }

    #[test]
    fn mup_worked_example() {
        let eta = mabs(&[("X#0", G), ("Y#0", G), ("Z#0", G), ("X", U), ("Y", G), ("Z", G)]);
        let beta = mup(&worked_equations(), &eta).unwrap();
        assert_eq!(beta, mabs(&[("X#0", G), ("Y#0", G), ("Z#0", G), ("X", G), ("Y", G), ("Z", G)]));
    }

    #[test]
    fn empty_equations_change_nothing() {
        let e = eq_of(mgu(&parse_term("a").unwrap(), &parse_term("a").unwrap())).unwrap();
        let z = mabs(&[("X", U), ("Y", G)]);
        assert_eq!(mdown(&e, &z).unwrap(), z);
        assert_eq!(mup(&e, &z).unwrap(), z);
    }

    #[test]
    fn small_down_up_cases() {
        let e = eq_of(mgu(&parse_term("X").unwrap(), &parse_term("f(Y)").unwrap())).unwrap();
        assert_eq!(mdown(&e, &mabs(&[("X", G), ("Y", U)])).unwrap(), mabs(&[("X", G), ("Y", G)]));
        let e = eq_of(mgu(&parse_term("X").unwrap(), &parse_term("f(Y,Z)").unwrap())).unwrap();
        assert_eq!(mup(&e, &mabs(&[("X", U), ("Y", G), ("Z", G)])).unwrap(), mabs(&[("X", G), ("Y", G), ("Z", G)]));
    }

    #[test]
    fn munify_worked_example() {
        let a = parse_atom("g(X,f(Y,f(Z,Z)),Y)").unwrap();
        let b = parse_atom("g(f(X,Y),Z,X)").unwrap();
        let theta = mabs(&[("X", G), ("Y", U), ("Z", U)]);
        let sigma = mabs(&[("X", U), ("Y", U), ("Z", G)]);
        let out = munify(&a, &theta, &b, &sigma, &mut Renamer::new()).unwrap();
        assert_eq!(out, mabs(&[("X", G), ("Y", G), ("Z", G)]));
    }

    #[test]
    fn munify_failure_gives_infimum() {
        let a = parse_atom("p(a)").unwrap();
        let b = parse_atom("p(b)").unwrap();
        let out = munify(&a, &Abs::new([]), &b, &Abs::new([]), &mut Renamer::new()).unwrap();
        assert!(out.is_empty());
        let a = parse_atom("p(a,X)").unwrap();
        let b = parse_atom("p(b,Y)").unwrap();
        let out = munify(&a, &mabs(&[("X", U)]), &b, &mabs(&[("Y", U)]), &mut Renamer::new()).unwrap();
        assert_eq!(out, mabs(&[("Y", G)]));
    }

    #[test]
    fn munify_same_atom_meets() {
        let p = parse_atom("p(X)").unwrap();
        let out = munify(&p, &mabs(&[("X", G)]), &p, &mabs(&[("X", U)]), &mut Renamer::new()).unwrap();
        assert_eq!(out, mabs(&[("X", G)]));
    }

    #[test]
    fn munify_rejects_overlapping_scopes() {
        let p = parse_atom("p(X)").unwrap();
        let mut r = Renamer::new();
        // A scope that already contains the next renamed name.
        let clash = Var::new("X").rename(&Renamer::new().fresh());
        let sigma = Abs::new([(Var::new("X"), U), (clash, U)]);
        assert!(matches!(munify(&p, &mabs(&[("X", G)]), &p, &sigma, &mut r), Err(DomainError::ScopeOverlap(_))));
    }

    #[test]
    fn gamma_membership() {
        let theta = Substitution::from_bindings([(Var::new("X"), parse_term("f(a)").unwrap())]).unwrap();
        assert!(gamma_member(&theta, &mabs(&[("X", G)])));
        let theta = Substitution::from_bindings([(Var::new("X"), parse_term("f(Y)").unwrap())]).unwrap();
        assert!(!gamma_member(&theta, &mabs(&[("X", G)])));
        assert!(gamma_member(&theta, &mabs(&[("X", U), ("Y", U)])));
        assert!(!gamma_member(&Substitution::new(), &mabs(&[("X", G)])));
    }

    #[test]
    fn renders_like_listing() {
        assert_eq!(render(&mabs(&[("Y", U), ("X", G)])), "{X/g, Y/u}");
    }
}
