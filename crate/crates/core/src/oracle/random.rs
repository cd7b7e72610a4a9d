//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::absub::Abs;
use crate::mono::{Mode, MonoAbs};
use crate::poly::{all_pmodes, PMode, Params, PolyAbs};
use crate::syntax::{Atom, Term, Var};
use crate::unify::{mgu_atoms, Renamer};

const VARS: [&str; 3] = ["X", "Y", "Z"];

/// A term of depth at most `depth` over `{a/0, f/1, g/2}` and `vars`.
pub fn term(rng: &mut impl Rng, vars: &[Var], depth: usize) -> Term {
    if depth <= 1 || rng.gen_bool(0.4) {
        if !vars.is_empty() && rng.gen_bool(0.85) {
            Term::Var(vars.choose(rng).expect("nonempty").clone())
        } else {
            Term::constant("a")
        }
    } else if rng.gen_bool(0.5) {
        Term::compound("f", vec![term(rng, vars, depth - 1)])
    } else {
        Term::compound("g", vec![term(rng, vars, depth - 1), term(rng, vars, depth - 1)])
    }
}

/// Share of generated pairs allowed to clash. Independent draws clash most
/// of the time, and a clash makes every safety check vacuous.
const CLASH_RATE: f64 = 0.1;

/// Two atoms of the same predicate, each over its own random subset of
/// `{X, Y, Z}`, with arguments of depth at most `depth`. Pairs are redrawn
/// until they unify (once the two sides are renamed apart), except for a
/// small share left clashing.
pub fn atom_pair(rng: &mut impl Rng, depth: usize) -> (Atom, Atom) {
    let keep_clash = rng.gen_bool(CLASH_RATE);
    let arity = rng.gen_range(1..=3);
    loop {
        let a = random_atom(rng, arity, depth);
        let b = random_atom(rng, arity, depth);
        let unifies = mgu_atoms(&Renamer::new().rename(&a), &b).is_some();
        if unifies != keep_clash {
            return (a, b);
        }
    }
}

fn random_atom(rng: &mut impl Rng, arity: usize, depth: usize) -> Atom {
    let mut vars: Vec<Var> = VARS.iter().map(Var::new).collect();
    vars.shuffle(rng);
    vars.truncate(rng.gen_range(1..=3));
    Atom::new("p", (0..arity).map(|_| term(rng, &vars, depth)).collect())
}

pub fn mono_abs(rng: &mut impl Rng, scope: impl IntoIterator<Item = Var>) -> MonoAbs {
    Abs::new(scope.into_iter().map(|v| (v, if rng.gen_bool(0.5) { Mode::G } else { Mode::U })))
}

/// Descriptions drawn uniformly from every canonical description over the
/// parameters.
pub fn poly_abs(rng: &mut impl Rng, params: &Params, scope: impl IntoIterator<Item = Var>) -> PolyAbs {
    let modes = all_pmodes(params.len());
    Abs::new(scope.into_iter().map(|v| (v, modes.choose(rng).expect("at least two descriptions").clone())))
}

/// An abstract unification problem in the polymorphic domain.
#[derive(Clone, Debug)]
pub struct PolyInstance {
    pub params: Params,
    pub a: Atom,
    pub theta: PolyAbs,
    pub b: Atom,
    pub sigma: PolyAbs,
}

pub fn poly_instance(rng: &mut impl Rng, depth: usize, max_params: usize) -> PolyInstance {
    let (a, b) = atom_pair(rng, depth);
    let params = Params::numbered(rng.gen_range(1..=max_params.max(1)));
    let theta = poly_abs(rng, &params, a.vars());
    let sigma = poly_abs(rng, &params, b.vars());
    PolyInstance { params, a, theta, b, sigma }
}

/// An abstract unification problem in the monomorphic domain.
#[derive(Clone, Debug)]
pub struct MonoInstance {
    pub a: Atom,
    pub theta: MonoAbs,
    pub b: Atom,
    pub sigma: MonoAbs,
}

pub fn mono_instance(rng: &mut impl Rng, depth: usize) -> MonoInstance {
    let (a, b) = atom_pair(rng, depth);
    let theta = mono_abs(rng, a.vars());
    let sigma = mono_abs(rng, b.vars());
    MonoInstance { a, theta, b, sigma }
}

/// Whether `m` mentions only parameters below `n`.
pub fn within(m: &PMode, n: usize) -> bool {
    m.sets().iter().all(|s| n >= 32 || s >> n == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let i = poly_instance(&mut rng, 2, 3);
            assert!(i.a.args.iter().chain(i.b.args.iter()).all(|t| t.depth() <= 2));
            assert!(i.a.vars().len() <= 3 && i.params.len() <= 3);
            assert_eq!(i.theta.len(), i.a.vars().len());
            assert!(i.theta.iter().all(|(_, m)| within(m, i.params.len())));
        }
    }

    #[test]
    fn most_pairs_unify() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let unifying = (0..500)
            .filter(|_| {
                let (a, b) = atom_pair(&mut rng, 2);
                mgu_atoms(&Renamer::new().rename(&a), &b).is_some()
            })
            .count();
        assert!((400..500).contains(&unifying), "{unifying}");
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| format!("{:?}", mono_instance(&mut rng, 2))).collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
