//! Timing the polymorphic analysis against the monomorphic one.

use std::fmt;
use std::time::{Duration, Instant};

use crate::engine::{analyze, mono_entry, poly_entry, EngineError, Options};
use crate::syntax::Program;

/// One program analyzed both ways. The monomorphic side is run once per
/// assignment of the directive's parameters, since that is the work a
/// single polymorphic run replaces.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub params: usize,
    pub poly_iterations: usize,
    pub poly_time: Duration,
    /// Summed over all assignments.
    pub mono_time: Duration,
    pub mono_runs: usize,
}

impl Comparison {
    /// Polymorphic time over the mean time of one monomorphic run.
    pub fn ratio(&self) -> f64 {
        let mono = self.mono_time.as_secs_f64() / self.mono_runs as f64;
        self.poly_time.as_secs_f64() / mono
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "params {}  poly {:>9.1?} ({} evals)  mono {:>9.1?} over {} runs  ratio {:.2}",
            self.params,
            self.poly_time,
            self.poly_iterations,
            self.mono_time,
            self.mono_runs,
            self.ratio()
        )
    }
}

/// Repeats `f` until at least `floor` has elapsed, returning the mean time
/// per call and the last result.
fn timed<T>(floor: Duration, mut f: impl FnMut() -> Result<T, EngineError>) -> Result<(Duration, T), EngineError> {
    let start = Instant::now();
    let mut n = 0u32;
    loop {
        let out = f()?;
        n += 1;
        let spent = start.elapsed();
        if spent >= floor {
            return Ok((spent / n, out));
        }
    }
}

pub fn compare(program: &Program, opts: &Options, floor: Duration) -> Result<Comparison, EngineError> {
    let d = &program.directive;
    let (params, input) = poly_entry(d)?;
    let (poly_time, poly) = timed(floor, || analyze(program, &d.goal, &input, opts))?;
    let mut mono_time = Duration::ZERO;
    let mut mono_runs = 0;
    for kappa in params.assignments() {
        let input = mono_entry(d, Some((&params, &kappa)))?;
        let (t, _) = timed(floor, || analyze(program, &d.goal, &input, opts))?;
        mono_time += t;
        mono_runs += 1;
    }
    Ok(Comparison { params: params.len(), poly_iterations: poly.iterations, poly_time, mono_time, mono_runs })
}
