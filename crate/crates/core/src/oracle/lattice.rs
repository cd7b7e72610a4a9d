//! Exhaustive lattice-law checks for the polymorphic descriptions.

use crate::mono::{mode_glb, mode_lub};
use crate::poly::{all_pmodes, pm_glb, pm_leq, pm_lub, PMode, Params};

/// Outcome of an exhaustive check: how many cases ran and what failed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Checks lattice laws, canonical-form invariance and the instantiation
/// homomorphism over every description on `n` parameters.
pub fn check_laws(n: usize) -> LawReport {
    let all = all_pmodes(n);
    let params = Params::numbered(n);
    let top = PMode::supremum();
    let bottom = PMode::infimum();
    let mut r = LawReport::default();

    for a in &all {
        r.check(pm_leq(a, a), || format!("{a:?} not below itself"));
        r.check(pm_leq(&bottom, a) && pm_leq(a, &top), || format!("{a:?} outside the bounds"));
        r.check(pm_lub(a, a) == *a && pm_glb(a, a) == *a, || format!("{a:?} not idempotent"));
        r.check(pm_lub(a, &bottom) == *a && pm_glb(a, &top) == *a, || format!("{a:?} bounds are not units"));
        r.check(PMode::canon(a.sets().iter().copied()) == *a, || format!("{a:?} changes under canon"));
        // Adding supersets of members or repeating members changes nothing.
        let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
        let padded: Vec<u32> = a.sets().iter().flat_map(|&s| [s, s, s | full]).rev().collect();
        r.check(PMode::canon(padded) == *a, || format!("{a:?} not invariant under padding"));
        for kappa in params.assignments() {
            r.check(a.instantiate(&kappa) == semantic(a, &kappa), || format!("{a:?} instantiates wrongly"));
        }
    }

    for a in &all {
        for b in &all {
            let lub = pm_lub(a, b);
            let glb = pm_glb(a, b);
            r.check(lub == pm_lub(b, a) && glb == pm_glb(b, a), || format!("{a:?}, {b:?} not commutative"));
            r.check(pm_lub(a, &glb) == *a && pm_glb(a, &lub) == *a, || format!("{a:?}, {b:?} not absorptive"));
            r.check(pm_leq(a, b) == (lub == *b), || format!("{a:?}, {b:?}: order disagrees with join"));
            r.check(pm_leq(a, b) == (glb == *a), || format!("{a:?}, {b:?}: order disagrees with meet"));
            r.check(pm_leq(a, &lub) && pm_leq(b, &lub) && pm_leq(&glb, a) && pm_leq(&glb, b), || {
                format!("{a:?}, {b:?}: join or meet not a bound")
            });
            let mut below_all = true;
            for kappa in params.assignments() {
                let (x, y) = (a.instantiate(&kappa), b.instantiate(&kappa));
                r.check(lub.instantiate(&kappa) == mode_lub(x, y), || format!("{a:?}, {b:?}: join not preserved"));
                r.check(glb.instantiate(&kappa) == mode_glb(x, y), || format!("{a:?}, {b:?}: meet not preserved"));
                below_all &= mode_lub(x, y) == y;
            }
            r.check(pm_leq(a, b) == below_all, || format!("{a:?}, {b:?}: order not reflected by instantiation"));
        }
    }

    for a in &all {
        for b in &all {
            for c in &all {
                r.check(pm_lub(&pm_lub(a, b), c) == pm_lub(a, &pm_lub(b, c)), || {
                    format!("{a:?}, {b:?}, {c:?}: join not associative")
                });
                r.check(pm_glb(&pm_glb(a, b), c) == pm_glb(a, &pm_glb(b, c)), || {
                    format!("{a:?}, {b:?}, {c:?}: meet not associative")
                });
                r.check(pm_glb(a, &pm_lub(b, c)) == pm_lub(&pm_glb(a, b), &pm_glb(a, c)), || {
                    format!("{a:?}, {b:?}, {c:?}: not distributive")
                });
                if pm_leq(a, b) && pm_leq(b, c) {
                    r.check(pm_leq(a, c), || format!("{a:?}, {b:?}, {c:?}: order not transitive"));
                }
            }
            if pm_leq(a, b) && pm_leq(b, a) {
                r.check(a == b, || format!("{a:?}, {b:?}: order not antisymmetric"));
            }
        }
    }
    r
}

/// Instantiation by direct reading: some member set has every parameter
/// assigned `u`.
fn semantic(a: &PMode, kappa: &crate::poly::Assignment) -> crate::mono::Mode {
    let hit = a.index_lists().iter().any(|set| set.iter().all(|&i| kappa.get(i) == crate::mono::Mode::U));
    if hit {
        crate::mono::Mode::U
    } else {
        crate::mono::Mode::G
    }
}
