//! Abstract substitutions over a lattice of variable descriptions, and the
//! abstract unification skeleton shared by the monomorphic and polymorphic
//! domains. The two domains differ only in the lattice plugged in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug};
use std::hash::Hash;

use thiserror::Error;

use crate::syntax::{Atom, Var};
use crate::unify::{eq_of, mgu_atoms, EqSet, Rename, Renamer, Renaming};

/// A finite lattice of per-variable descriptions. `bottom` describes
/// ground terms only, `top` describes every term.
pub trait ModeLattice: Clone + Eq + Hash + Debug {
    fn bottom() -> Self;
    fn top() -> Self;
    fn leq(&self, other: &Self) -> bool;
    fn join(&self, other: &Self) -> Self;
    fn meet(&self, other: &Self) -> Self;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("scopes overlap on {0}")]
    ScopeOverlap(String),
}

/// A total map from a variable scope to descriptions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Abs<M> {
    map: BTreeMap<Var, M>,
}

impl<M: ModeLattice> Abs<M> {
    pub fn new(entries: impl IntoIterator<Item = (Var, M)>) -> Self {
        Abs { map: entries.into_iter().collect() }
    }

    pub fn uniform<'a>(scope: impl IntoIterator<Item = &'a Var>, m: M) -> Self {
        Abs { map: scope.into_iter().map(|v| (v.clone(), m.clone())).collect() }
    }

    pub fn bottom<'a>(scope: impl IntoIterator<Item = &'a Var>) -> Self {
        Self::uniform(scope, M::bottom())
    }

    pub fn top<'a>(scope: impl IntoIterator<Item = &'a Var>) -> Self {
        Self::uniform(scope, M::top())
    }

    pub fn get(&self, v: &Var) -> Option<&M> {
        self.map.get(v)
    }

    pub fn set(&mut self, v: Var, m: M) {
        self.map.insert(v, m);
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.map.contains_key(v)
    }

    pub fn scope(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn scope_set(&self) -> BTreeSet<Var> {
        self.map.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &M)> {
        self.map.iter()
    }

    fn same_scope(&self, other: &Self) -> Result<(), DomainError> {
        if self.map.keys().eq(other.map.keys()) {
            Ok(())
        } else {
            Err(DomainError::ScopeMismatch(format!(
                "{{{}}} vs {{{}}}",
                join_vars(self.map.keys()),
                join_vars(other.map.keys())
            )))
        }
    }

    pub fn leq(&self, other: &Self) -> Result<bool, DomainError> {
        self.same_scope(other)?;
        Ok(self.map.values().zip(other.map.values()).all(|(a, b)| a.leq(b)))
    }

    fn pointwise(&self, other: &Self, f: impl Fn(&M, &M) -> M) -> Result<Self, DomainError> {
        self.same_scope(other)?;
        Ok(Abs { map: self.map.iter().zip(other.map.values()).map(|((v, a), b)| (v.clone(), f(a, b))).collect() })
    }

    pub fn join(&self, other: &Self) -> Result<Self, DomainError> {
        self.pointwise(other, M::join)
    }

    pub fn meet(&self, other: &Self) -> Result<Self, DomainError> {
        self.pointwise(other, M::meet)
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Self {
        let keep: BTreeSet<&Var> = vars.into_iter().collect();
        Abs { map: self.map.iter().filter(|(v, _)| keep.contains(v)).map(|(v, m)| (v.clone(), m.clone())).collect() }
    }

    /// Union of two abstractions over disjoint scopes.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, DomainError> {
        let shared: Vec<&Var> = self.map.keys().filter(|v| other.map.contains_key(*v)).collect();
        if !shared.is_empty() {
            return Err(DomainError::ScopeOverlap(join_vars(shared)));
        }
        let mut map = self.map.clone();
        map.extend(other.map.iter().map(|(v, m)| (v.clone(), m.clone())));
        Ok(Abs { map })
    }

    /// Renames scope variables through `f`; values are kept.
    pub fn map_vars(&self, mut f: impl FnMut(&Var) -> Var) -> Self {
        Abs { map: self.map.iter().map(|(v, m)| (f(v), m.clone())).collect() }
    }

    pub fn map_values<N: ModeLattice>(&self, mut f: impl FnMut(&M) -> N) -> Abs<N> {
        Abs { map: self.map.iter().map(|(v, m)| (v.clone(), f(m))).collect() }
    }

    fn require(&self, vars: &BTreeSet<Var>) -> Result<(), DomainError> {
        let missing: Vec<&Var> = vars.iter().filter(|v| !self.map.contains_key(*v)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(DomainError::ScopeMismatch(format!("no description for {}", join_vars(missing))))
        }
    }

    /// Renders `{X/d, ...}` in the given variable order, then any remaining
    /// scope variables by name.
    pub fn render_with<'a>(
        &self,
        order: impl IntoIterator<Item = &'a Var>,
        mut show: impl FnMut(&M) -> String,
    ) -> String {
        let mut seen = BTreeSet::new();
        let mut parts = Vec::new();
        for v in order {
            if let Some(m) = self.map.get(v) {
                if seen.insert(v.clone()) {
                    parts.push(format!("{v}/{}", show(m)));
                }
            }
        }
        for (v, m) in &self.map {
            if !seen.contains(v) {
                parts.push(format!("{v}/{}", show(m)));
            }
        }
        format!("{{{}}}", parts.join(", "))
    }
}

impl<M: ModeLattice> Rename for Abs<M> {
    fn rename(&self, r: &Renaming) -> Self {
        self.map_vars(|v| r.var(v))
    }
}

impl<M: ModeLattice> Debug for Abs<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, m)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{m:?}")?;
        }
        f.write_str("}")
    }
}

fn join_vars<'a>(vars: impl IntoIterator<Item = &'a Var>) -> String {
    vars.into_iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
}

/// Downward propagation: a variable occurring in the right side of `Y = t`
/// is at most as instantiated as `Y` allows.
pub fn down<M: ModeLattice>(e: &EqSet, zeta: &Abs<M>) -> Result<Abs<M>, DomainError> {
    zeta.require(&e.vars())?;
    let mut eta = zeta.clone();
    for (y, t) in e.equations() {
        let bound = &zeta.map[y];
        for x in t.vars() {
            let slot = eta.map.get_mut(&x).expect("scope checked above");
            *slot = slot.meet(bound);
        }
    }
    Ok(eta)
}

/// Upward propagation: `X = t` makes `X` at most the join of `t`'s
/// variables. An empty join is `bottom`, so ground right sides make `X`
/// ground.
pub fn up<M: ModeLattice>(e: &EqSet, eta: &Abs<M>) -> Result<Abs<M>, DomainError> {
    eta.require(&e.vars())?;
    let mut beta = eta.clone();
    for (x, t) in e.equations() {
        let joined = t.vars().iter().fold(M::bottom(), |acc, y| acc.join(&eta.map[y]));
        let slot = beta.map.get_mut(x).expect("scope checked above");
        *slot = slot.meet(&joined);
    }
    Ok(beta)
}

/// Intermediate values of one abstract unification, for inspection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnifyTrace<M: ModeLattice> {
    pub renamed: Atom,
    pub zeta: Abs<M>,
    /// `None` when the atoms do not unify.
    pub equations: Option<EqSet>,
    pub eta: Option<Abs<M>>,
    pub beta: Option<Abs<M>>,
    pub result: Abs<M>,
}

/// Abstract unification of `a` described by `theta` with `b` described by
/// `sigma`. The result is scoped like `sigma`.
pub fn aunify_traced<M: ModeLattice>(
    a: &Atom,
    theta: &Abs<M>,
    b: &Atom,
    sigma: &Abs<M>,
    renamer: &mut Renamer,
) -> Result<UnifyTrace<M>, DomainError> {
    let psi = renamer.fresh();
    let renamed = a.rename(&psi);
    let zeta = theta.rename(&psi).disjoint_union(sigma)?;
    zeta.require(&renamed.var_set())?;
    zeta.require(&b.var_set())?;
    let Some(e) = eq_of(mgu_atoms(&renamed, b)) else {
        let result = Abs::bottom(sigma.scope());
        return Ok(UnifyTrace { renamed, zeta, equations: None, eta: None, beta: None, result });
    };
    let eta = down(&e, &zeta)?;
    let beta = up(&e, &eta)?;
    let result = beta.restrict(sigma.scope());
    Ok(UnifyTrace { renamed, zeta, equations: Some(e), eta: Some(eta), beta: Some(beta), result })
}

pub fn aunify<M: ModeLattice>(
    a: &Atom,
    theta: &Abs<M>,
    b: &Atom,
    sigma: &Abs<M>,
    renamer: &mut Renamer,
) -> Result<Abs<M>, DomainError> {
    aunify_traced(a, theta, b, sigma, renamer).map(|t| t.result)
}

/// Abstract effect of solving `e` in place: no renaming, same scope.
pub fn solve_in_place<M: ModeLattice>(e: Option<&EqSet>, abs: &Abs<M>) -> Result<Abs<M>, DomainError> {
    match e {
        None => Ok(Abs::bottom(abs.scope())),
        Some(e) => up(e, &down(e, abs)?),
    }
}
