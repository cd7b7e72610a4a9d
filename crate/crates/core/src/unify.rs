//! Concrete substitutions: most general unifiers in solved form, the
//! equation view, renaming, restriction and composition.
//!
//! Unification failure is `None` throughout; composition treats it as
//! absorbing on either side.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use crate::syntax::{Atom, Term, Var};

/// An idempotent substitution. Bindings keep the order in which the
/// unifier produced them.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: IndexMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from bindings that are already in solved form.
    ///
    /// Returns `None` if the result would not be idempotent or binds a
    /// variable to itself.
    pub fn from_bindings(bindings: impl IntoIterator<Item = (Var, Term)>) -> Option<Self> {
        let mut map = IndexMap::new();
        for (v, t) in bindings {
            if t.as_var() == Some(&v) || map.insert(v, t).is_some() {
                return None;
            }
        }
        let s = Substitution { bindings: map };
        s.is_idempotent().then_some(s)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// Variables occurring in the bound terms.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.bindings.values() {
            out.extend(t.var_set());
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| !self.bindings.keys().any(|v| t.occurs(v)))
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_args(|t| self.apply(t))
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
        let keep: BTreeSet<&Var> = vars.into_iter().collect();
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    /// Bindings sorted by variable, for order-insensitive comparison.
    pub fn sorted(&self) -> Vec<(Var, Term)> {
        let mut v: Vec<_> = self.bindings.iter().map(|(k, t)| (k.clone(), t.clone())).collect();
        v.sort();
        v
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Follows variable bindings until an unbound variable or a compound.
fn walk<'a>(bindings: &'a IndexMap<Var, Term>, mut t: &'a Term) -> &'a Term {
    while let Term::Var(v) = t {
        match bindings.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn occurs_walked(bindings: &IndexMap<Var, Term>, v: &Var, t: &Term) -> bool {
    match walk(bindings, t) {
        Term::Var(w) => w == v,
        Term::Compound(_, args) => args.iter().any(|a| occurs_walked(bindings, v, a)),
    }
}

fn resolve(bindings: &IndexMap<Var, Term>, t: &Term) -> Term {
    match walk(bindings, t) {
        Term::Var(v) => Term::Var(v.clone()),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| resolve(bindings, a)).collect()),
    }
}

/// Most general unifier of a list of equations, with occurs check.
///
/// Equations are processed left to right. When the right side is an
/// unbound variable it is bound to the left side; otherwise an unbound
/// variable on the left is bound to the right side.
pub fn mgu_all<'a>(pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>) -> Option<Substitution> {
    let mut bindings: IndexMap<Var, Term> = IndexMap::new();
    let mut stack: Vec<(Term, Term)> = pairs.into_iter().map(|(l, r)| (l.clone(), r.clone())).collect();
    stack.reverse();
    while let Some((l, r)) = stack.pop() {
        let l = walk(&bindings, &l).clone();
        let r = walk(&bindings, &r).clone();
        match (&l, &r) {
            (Term::Var(a), Term::Var(b)) if a == b => {}
            (_, Term::Var(b)) => {
                if occurs_walked(&bindings, b, &l) {
                    return None;
                }
                bindings.insert(b.clone(), l);
            }
            (Term::Var(a), _) => {
                if occurs_walked(&bindings, a, &r) {
                    return None;
                }
                bindings.insert(a.clone(), r);
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                for (x, y) in xs.iter().zip(ys.iter()).rev() {
                    stack.push((x.clone(), y.clone()));
                }
            }
        }
    }
    let solved = bindings.iter().map(|(v, t)| (v.clone(), resolve(&bindings, t))).collect();
    Some(Substitution { bindings: solved })
}

pub fn mgu(t1: &Term, t2: &Term) -> Option<Substitution> {
    mgu_all([(t1, t2)])
}

pub fn mgu_atoms(a1: &Atom, a2: &Atom) -> Option<Substitution> {
    if a1.pred != a2.pred || a1.args.len() != a2.args.len() {
        return None;
    }
    mgu_all(a1.args.iter().zip(a2.args.iter()))
}

/// `outer ∘ inner`: applying the result equals applying `inner` then `outer`.
///
/// Both arguments must be idempotent and `outer`'s range must avoid
/// `inner`'s domain for the result to be idempotent; every use in this
/// crate satisfies that.
pub fn compose(outer: Option<&Substitution>, inner: Option<&Substitution>) -> Option<Substitution> {
    let (outer, inner) = (outer?, inner?);
    let mut bindings = IndexMap::new();
    for (v, t) in &inner.bindings {
        let t = outer.apply(t);
        if t.as_var() != Some(v) {
            bindings.insert(v.clone(), t);
        }
    }
    for (v, t) in &outer.bindings {
        if !inner.bindings.contains_key(v) {
            bindings.insert(v.clone(), t.clone());
        }
    }
    let s = Substitution { bindings };
    debug_assert!(s.is_idempotent(), "composition left solved form: {s}");
    Some(s)
}

/// One equation `lhs = rhs` of a solved form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Equation {
    pub lhs: Var,
    pub rhs: Term,
}

/// The solved-form equation view of a substitution.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct EqSet {
    subst: Substitution,
}

impl EqSet {
    pub fn equations(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.subst.iter()
    }

    pub fn to_equations(&self) -> Vec<Equation> {
        self.subst.iter().map(|(v, t)| Equation { lhs: v.clone(), rhs: t.clone() }).collect()
    }

    pub fn len(&self) -> usize {
        self.subst.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subst.is_empty()
    }

    pub fn in_domain(&self, v: &Var) -> bool {
        self.subst.get(v).is_some()
    }

    /// Right-hand side bound to `v`.
    pub fn rhs(&self, v: &Var) -> Option<&Term> {
        self.subst.get(v)
    }

    /// Variables occurring on right-hand sides.
    pub fn range(&self) -> BTreeSet<Var> {
        self.subst.range_vars()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.range();
        out.extend(self.subst.domain().cloned());
        out
    }

    /// No left side occurs on any right side.
    pub fn is_solved(&self) -> bool {
        self.subst.is_idempotent()
    }

    pub fn solve(&self) -> Substitution {
        self.subst.clone()
    }
}

impl fmt::Display for EqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.subst.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for EqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn eq_of(theta: Option<Substitution>) -> Option<EqSet> {
    theta.map(|subst| EqSet { subst })
}

/// One application of the renaming: every variable `X` becomes `X#n`
/// for this renaming's generation `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Renaming {
    generation: u64,
}

impl Renaming {
    pub fn var(&self, v: &Var) -> Var {
        Var::new(format!("{}#{}", v.name(), self.generation))
    }
}

/// Things whose variables can be renamed apart.
pub trait Rename {
    fn rename(&self, r: &Renaming) -> Self;
}

impl Rename for Var {
    fn rename(&self, r: &Renaming) -> Self {
        r.var(self)
    }
}

impl Rename for Term {
    fn rename(&self, r: &Renaming) -> Self {
        match self {
            Term::Var(v) => Term::Var(r.var(v)),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| a.rename(r)).collect()),
        }
    }
}

impl Rename for Atom {
    fn rename(&self, r: &Renaming) -> Self {
        self.map_args(|t| t.rename(r))
    }
}

impl Rename for Substitution {
    fn rename(&self, r: &Renaming) -> Self {
        Substitution { bindings: self.bindings.iter().map(|(v, t)| (r.var(v), t.rename(r))).collect() }
    }
}

/// Source of fresh renamings. Names contain `#`, which the parser never
/// produces, so they cannot clash with program variables.
#[derive(Clone, Debug, Default)]
pub struct Renamer {
    next: u64,
}

impl Renamer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts counting at `generation`; used to reproduce a fixed scheme.
    pub fn starting_at(generation: u64) -> Self {
        Renamer { next: generation }
    }

    pub fn fresh(&mut self) -> Renaming {
        let r = Renaming { generation: self.next };
        self.next += 1;
        r
    }

    /// Renames with a fresh generation.
    pub fn rename<T: Rename>(&mut self, e: &T) -> T {
        let r = self.fresh();
        e.rename(&r)
    }
}
