//! Seeded drivers for the oracle checks, shared by the command line and
//! the test suites.

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mono::munify;
use crate::syntax::Var;
use crate::unify::Renamer;

use super::checks::{check_coherence, check_concretization_laws, check_poly, find_violation};
use super::concrete::compare_paths;
use super::lattice::check_laws;
use super::random::{mono_instance, poly_instance};
use super::sld::{check_engine_soundness, random_program, Bounds};
use super::universe::{enumerate_subs, Universe};
use super::OracleError;

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    /// Random instances per randomized suite.
    pub trials: usize,
    /// Term depth for generated atoms and for the universe.
    pub depth: usize,
    pub max_params: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { seed: 0, trials: 200, depth: 2, max_params: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Cases left out because they exceed an enumeration budget.
    pub skipped: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Timing is left out so seeded runs print identically.
impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{:<22} {:>7} cases", self.name, self.cases)?;
        if self.skipped > 0 {
            write!(f, " ({} skipped)", self.skipped)?;
        }
        write!(f, "  {status}")?;
        if let Some(first) = self.failures.first() {
            write!(f, "\n  first counterexample: {first}")?;
        }
        Ok(())
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn timed(name: &'static str, body: impl FnOnce(&mut SuiteReport) -> Result<(), OracleError>) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport { name, cases: 0, skipped: 0, failures: Vec::new(), elapsed: Duration::ZERO };
    if let Err(e) = body(&mut r) {
        r.failures.push(format!("error: {e}"));
    }
    r.elapsed = start.elapsed();
    r
}

/// Instantiated polymorphic unification equals monomorphic unification of
/// instantiated inputs, for every assignment.
pub fn coherence_suite(c: &CheckConfig) -> SuiteReport {
    timed("poly/mono coherence", |r| {
        let mut rng = rng(c.seed, 1);
        for _ in 0..c.trials {
            let i = poly_instance(&mut rng, c.depth, c.max_params.min(3));
            r.cases += 1;
            if let Some(f) = check_coherence(&i.params, &i.a, &i.theta, &i.b, &i.sigma)? {
                r.failures.push(format!("{} {:?} with {} {:?}: {f}", i.a, i.theta, i.b, i.sigma));
            }
        }
        Ok(())
    })
}

/// Monomorphic abstract unification covers concrete unification.
pub fn mono_safety_suite(c: &CheckConfig) -> SuiteReport {
    timed("mono safety", |r| {
        let u = Universe::standard(c.depth)?;
        let mut rng = rng(c.seed, 2);
        for _ in 0..c.trials {
            let i = mono_instance(&mut rng, c.depth);
            r.cases += 1;
            let result = munify(&i.a, &i.theta, &i.b, &i.sigma, &mut Renamer::new())?;
            if let Some(cex) = find_violation(&u, &i.a, &i.theta, &i.b, &i.sigma, &result)? {
                r.failures.push(format!("{} {:?} with {} {:?} gives {result:?}: {cex}", i.a, i.theta, i.b, i.sigma));
            }
        }
        Ok(())
    })
}

/// Polymorphic abstract unification covers concrete unification under
/// every assignment, and agrees with the monomorphic one.
pub fn poly_safety_suite(c: &CheckConfig) -> SuiteReport {
    timed("poly safety", |r| {
        let u = Universe::standard(c.depth)?;
        let mut rng = rng(c.seed, 3);
        for _ in 0..c.trials {
            let i = poly_instance(&mut rng, c.depth, c.max_params.min(3));
            r.cases += 1;
            if let Some(f) = check_poly(&u, &i.params, &i.a, &i.theta, &i.b, &i.sigma)? {
                r.failures.push(format!("{} {:?} with {} {:?}: {f}", i.a, i.theta, i.b, i.sigma));
            }
        }
        Ok(())
    })
}

/// Pairs compared per instance before it is skipped.
const PATH_PAIR_BUDGET: usize = 20_000;

/// The defining formula and the flat unifier agree on every enumerated
/// pair of substitutions.
pub fn path_agreement_suite(c: &CheckConfig) -> SuiteReport {
    timed("unifier agreement", |r| {
        let u = Universe::standard(c.depth)?;
        let mut rng = rng(c.seed, 4);
        let mut renamer = Renamer::new();
        for _ in 0..c.trials {
            let i = mono_instance(&mut rng, c.depth);
            let s1 = enumerate_subs(&i.a.vars().into_iter().collect::<Vec<_>>(), &u)?;
            let s2 = enumerate_subs(&i.b.vars().into_iter().collect::<Vec<_>>(), &u)?;
            if s1.len() * s2.len() > PATH_PAIR_BUDGET {
                r.skipped += 1;
                continue;
            }
            r.cases += 1;
            if let Some(msg) = compare_paths(&u, &i.a, &s1, &i.b, &s2, &mut renamer)? {
                r.failures.push(msg);
            }
        }
        Ok(())
    })
}

/// Lattice laws over every description with up to `max_params` parameters.
pub fn lattice_suite(c: &CheckConfig) -> SuiteReport {
    timed("lattice laws", |r| {
        for n in 0..=c.max_params.min(3) {
            let laws = check_laws(n);
            r.cases += laws.checks;
            r.failures.extend(laws.failures.into_iter().map(|f| format!("{n} parameters: {f}")));
        }
        Ok(())
    })
}

/// Concretizations form a Moore family and joins cover unions.
pub fn concretization_suite(c: &CheckConfig) -> SuiteReport {
    timed("concretization", |r| {
        let u = Universe::standard(c.depth.min(2))?;
        let scopes: [&[&str]; 2] = [&["X"], &["X", "Y"]];
        for scope in scopes {
            let vars: Vec<Var> = scope.iter().map(Var::new).collect();
            for n in 0..=c.max_params.min(2) {
                let (failures, checks) = check_concretization_laws(&u, &vars, n)?;
                r.cases += checks;
                r.failures.extend(failures);
            }
        }
        Ok(())
    })
}

/// Engine annotations describe every state of bounded concrete runs.
pub fn engine_soundness_suite(c: &CheckConfig) -> SuiteReport {
    timed("engine soundness", |r| {
        let u = Universe::standard(c.depth.min(2))?;
        let mut rng = rng(c.seed, 5);
        for _ in 0..c.trials {
            let p = random_program(&mut rng);
            r.cases += 1;
            if let Some(msg) = check_engine_soundness(&p, &u, Bounds::default())? {
                r.failures.push(format!("{msg}\nprogram:\n{p}"));
            }
        }
        Ok(())
    })
}

/// Every suite in a fixed order.
pub fn run_all(c: &CheckConfig) -> Vec<SuiteReport> {
    vec![
        lattice_suite(c),
        concretization_suite(c),
        coherence_suite(c),
        path_agreement_suite(c),
        mono_safety_suite(c),
        poly_safety_suite(c),
        engine_soundness_suite(c),
    ]
}
