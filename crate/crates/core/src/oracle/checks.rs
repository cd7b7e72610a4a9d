//! Soundness checks of the abstract operators against the concrete ones.

use std::collections::HashMap;
use std::fmt;

use crate::absub::Abs;
use crate::mono::{mode_lub, munify, Mode, MonoAbs};
use crate::poly::{pabs_instantiate, pm_glb, pm_lub, punify, PMode, Params, PolyAbs};
use crate::syntax::{Atom, Term, Var};
use crate::unify::{Renamer, Substitution};

use super::flat::FlatPair;
use super::universe::{check_scope, enumerate_subs, tuples, Universe};
use super::OracleError;

/// Largest parameter set the poly checks enumerate assignments over.
pub const MAX_CHECK_PARAMS: usize = 3;

/// A concrete unification whose result escapes the abstract one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub theta1: Substitution,
    pub theta2: Substitution,
    pub result: Vec<(Var, Term)>,
    /// A variable described as ground but bound to a non-ground term.
    pub var: Var,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let result: Vec<String> = self.result.iter().map(|(v, t)| format!("{v}/{t}")).collect();
        write!(
            f,
            "theta1 = {}, theta2 = {} unify to {{{}}} where {} is not ground",
            self.theta1,
            self.theta2,
            result.join(", "),
            self.var
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyFailure {
    /// Instantiating the polymorphic result disagrees with the monomorphic
    /// result on instantiated inputs.
    Coherence {
        kappa: String,
        poly: MonoAbs,
        mono: MonoAbs,
    },
    Safety {
        kappa: String,
        cex: Counterexample,
    },
}

impl fmt::Display for PolyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyFailure::Coherence { kappa, poly, mono } => {
                write!(f, "under {kappa}: instantiated result {poly:?} but monomorphic result {mono:?}")
            }
            PolyFailure::Safety { kappa, cex } => write!(f, "under {kappa}: {cex}"),
        }
    }
}

/// Pool variable occurrence order per universe term, for variant pruning.
struct PoolOrder(Vec<Vec<u8>>);

impl PoolOrder {
    fn new(u: &Universe) -> Self {
        PoolOrder(
            u.terms()
                .iter()
                .map(|t| {
                    let mut seen = Vec::new();
                    for v in t.vars() {
                        let p = v.name()[1..].parse::<u8>().expect("pool variable") - 1;
                        if !seen.contains(&p) {
                            seen.push(p);
                        }
                    }
                    seen
                })
                .collect(),
        )
    }

    /// Whether pool variables first occur in index order, making the tuple
    /// the chosen representative of its variant class.
    fn canonical(&self, tuple: &[u32]) -> bool {
        let mut next = 0u8;
        let mut seen = 0u32;
        for &t in tuple {
            for &p in &self.0[t as usize] {
                if seen >> p & 1 == 0 {
                    if p != next {
                        return false;
                    }
                    seen |= 1 << p;
                    next += 1;
                }
            }
        }
        true
    }
}

fn described(u: &Universe, order: &PoolOrder, scope: &[Var], abs: &MonoAbs) -> Vec<Vec<u32>> {
    let choices: Vec<Vec<u32>> = scope.iter().map(|v| u.choices(abs.get(v) == Some(&Mode::G))).collect();
    tuples(&choices).into_iter().filter(|t| order.canonical(t)).collect()
}

fn to_subst(u: &Universe, scope: &[Var], ids: &[u32]) -> Substitution {
    Substitution::from_bindings(scope.iter().cloned().zip(ids.iter().map(|&i| u.terms()[i as usize].clone())))
        .expect("pool variables never occur in the scope")
}

/// Searches the concrete unifications of members of `γ(theta)` with members
/// of `γ(sigma)` for one that `result` fails to describe.
pub fn find_violation(
    u: &Universe,
    a: &Atom,
    theta: &MonoAbs,
    b: &Atom,
    sigma: &MonoAbs,
    result: &MonoAbs,
) -> Result<Option<Counterexample>, OracleError> {
    let a_scope: Vec<Var> = theta.scope().cloned().collect();
    let b_scope: Vec<Var> = sigma.scope().cloned().collect();
    check_scope(a_scope.len())?;
    check_scope(b_scope.len())?;
    let targets: Vec<usize> = (0..b_scope.len()).filter(|&k| result.get(&b_scope[k]) == Some(&Mode::G)).collect();
    if targets.is_empty() {
        return Ok(None);
    }
    let Some(flat) = FlatPair::new(u, a, &a_scope, b, &b_scope) else {
        return Ok(None);
    };
    let order = PoolOrder::new(u);
    let left = described(u, &order, &a_scope, theta);
    // Unification only instantiates further, so a second-side member that
    // already grounds every target cannot produce a violation.
    let right: Vec<Vec<u32>> = described(u, &order, &b_scope, sigma)
        .into_iter()
        .filter(|t2| targets.iter().any(|&k| !u.terms()[t2[k] as usize].is_ground()))
        .collect();
    let mut scratch = flat.scratch();
    for t2 in &right {
        for t1 in &left {
            if !flat.unify(t1, t2, &mut scratch) {
                continue;
            }
            if let Some(&k) = targets.iter().find(|&&k| !flat.second_ground(k, t1, t2, &scratch)) {
                let terms = flat.second_terms(t1, t2, &scratch);
                return Ok(Some(Counterexample {
                    theta1: to_subst(u, &a_scope, t1),
                    theta2: to_subst(u, &b_scope, t2),
                    result: b_scope.iter().cloned().zip(terms).collect(),
                    var: b_scope[k].clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Every concrete unification of described inputs is described by the
/// abstract unification of the descriptions.
pub fn check_mono_safety(
    u: &Universe,
    a: &Atom,
    theta: &MonoAbs,
    b: &Atom,
    sigma: &MonoAbs,
) -> Result<bool, OracleError> {
    let result = munify(a, theta, b, sigma, &mut Renamer::new())?;
    Ok(find_violation(u, a, theta, b, sigma, &result)?.is_none())
}

fn check_params(params: &Params) -> Result<(), OracleError> {
    if params.len() > MAX_CHECK_PARAMS {
        Err(OracleError::BudgetExceeded(format!("{} parameters, limit {MAX_CHECK_PARAMS}", params.len())))
    } else {
        Ok(())
    }
}

/// Under every assignment, instantiating the polymorphic result equals the
/// monomorphic result on instantiated inputs.
pub fn check_coherence(
    params: &Params,
    a: &Atom,
    theta: &PolyAbs,
    b: &Atom,
    sigma: &PolyAbs,
) -> Result<Option<PolyFailure>, OracleError> {
    check_params(params)?;
    let poly = punify(a, theta, b, sigma, &mut Renamer::new())?;
    for kappa in params.assignments() {
        let inst = pabs_instantiate(&poly, &kappa);
        let mono =
            munify(a, &pabs_instantiate(theta, &kappa), b, &pabs_instantiate(sigma, &kappa), &mut Renamer::new())?;
        if inst != mono {
            return Ok(Some(PolyFailure::Coherence { kappa: kappa.render(params), poly: inst, mono }));
        }
    }
    Ok(None)
}

/// Coherence plus concrete safety under every assignment.
pub fn check_poly(
    u: &Universe,
    params: &Params,
    a: &Atom,
    theta: &PolyAbs,
    b: &Atom,
    sigma: &PolyAbs,
) -> Result<Option<PolyFailure>, OracleError> {
    if let Some(f) = check_coherence(params, a, theta, b, sigma)? {
        return Ok(Some(f));
    }
    let poly = punify(a, theta, b, sigma, &mut Renamer::new())?;
    let mut done: HashMap<(MonoAbs, MonoAbs), ()> = HashMap::new();
    for kappa in params.assignments() {
        let (t, s) = (pabs_instantiate(theta, &kappa), pabs_instantiate(sigma, &kappa));
        if done.insert((t.clone(), s.clone()), ()).is_some() {
            continue;
        }
        let result = pabs_instantiate(&poly, &kappa);
        if let Some(cex) = find_violation(u, a, &t, b, &s, &result)? {
            return Ok(Some(PolyFailure::Safety { kappa: kappa.render(params), cex }));
        }
    }
    Ok(None)
}

/// Substitutions over `scope` described by `abs`, as positions into an
/// enumeration of all substitutions.
fn gamma_mask(all: &[Substitution], abs: &MonoAbs) -> Vec<bool> {
    all.iter().map(|s| crate::mono::gamma_member(s, abs)).collect()
}

fn all_mono(scope: &[Var]) -> Vec<MonoAbs> {
    let mut out = vec![Abs::new(Vec::<(Var, Mode)>::new())];
    for v in scope {
        out = out
            .into_iter()
            .flat_map(|a| {
                Mode::ALL.into_iter().map(move |m| {
                    let mut b = a.clone();
                    b.set(v.clone(), m);
                    b
                })
            })
            .collect();
    }
    out
}

fn all_poly(scope: &[Var], n: usize) -> Vec<PolyAbs> {
    let modes = crate::poly::all_pmodes(n);
    let mut out = vec![Abs::new(Vec::<(Var, PMode)>::new())];
    for v in scope {
        out = out
            .into_iter()
            .flat_map(|a| {
                modes.iter().map(move |m| {
                    let mut b = a.clone();
                    b.set(v.clone(), m.clone());
                    b
                })
            })
            .collect();
    }
    out
}

/// Exhaustive checks, over `scope` and `n` parameters, that the
/// concretizations form a Moore family (meets are intersections, top is
/// everything) and that joins cover unions. Returns failure messages and
/// the number of checks performed.
pub fn check_concretization_laws(u: &Universe, scope: &[Var], n: usize) -> Result<(Vec<String>, usize), OracleError> {
    let all = enumerate_subs(scope, u)?.subs;
    let mut failures = Vec::new();
    let mut checks = 0;

    let monos = all_mono(scope);
    let masks: Vec<Vec<bool>> = monos.iter().map(|a| gamma_mask(&all, a)).collect();
    let top: MonoAbs = Abs::top(scope);
    if gamma_mask(&all, &top).iter().any(|m| !m) {
        failures.push("gamma(top) misses a substitution".to_string());
    }
    for (i, a) in monos.iter().enumerate() {
        for (j, b) in monos.iter().enumerate() {
            checks += 1;
            let meet = gamma_mask(&all, &a.meet(b)?);
            let join = gamma_mask(&all, &a.join(b)?);
            for k in 0..all.len() {
                if meet[k] != (masks[i][k] && masks[j][k]) {
                    failures.push(format!("gamma({a:?} meet {b:?}) is not the intersection at {}", all[k]));
                    break;
                }
                if (masks[i][k] || masks[j][k]) && !join[k] {
                    failures.push(format!("gamma({a:?} join {b:?}) misses {}", all[k]));
                    break;
                }
            }
        }
    }

    let params = Params::numbered(n);
    let polys = all_poly(scope, n);
    for kappa in params.assignments() {
        let inst: Vec<Vec<bool>> = polys.iter().map(|p| gamma_mask(&all, &pabs_instantiate(p, &kappa))).collect();
        for (i, a) in polys.iter().enumerate() {
            for (j, b) in polys.iter().enumerate() {
                checks += 1;
                let meet = gamma_mask(&all, &pabs_instantiate(&pointwise(a, b, pm_glb), &kappa));
                let join = gamma_mask(&all, &pabs_instantiate(&pointwise(a, b, pm_lub), &kappa));
                for k in 0..all.len() {
                    if meet[k] != (inst[i][k] && inst[j][k]) || ((inst[i][k] || inst[j][k]) && !join[k]) {
                        failures.push(format!(
                            "{a:?} and {b:?} under {}: meet or join concretization wrong at {}",
                            kappa.render(&params),
                            all[k]
                        ));
                        break;
                    }
                }
            }
        }
    }
    Ok((failures, checks))
}

fn pointwise(a: &PolyAbs, b: &PolyAbs, f: fn(&PMode, &PMode) -> PMode) -> PolyAbs {
    Abs::new(a.iter().map(|(v, m)| (v.clone(), f(m, b.get(v).expect("same scope")))))
}

/// Whether instantiation preserves the order: `a ≼ b` iff `a` instantiates
/// below `b` under every assignment.
pub fn order_embedding(params: &Params, a: &PMode, b: &PMode) -> bool {
    let semantic = params.assignments().all(|k| mode_lub(a.instantiate(&k), b.instantiate(&k)) == b.instantiate(&k));
    crate::poly::pm_leq(a, b) == semantic
}
