//! Bounded Herbrand universes and exhaustive substitution enumeration.

use std::collections::HashMap;

use crate::syntax::{Term, Var};
use crate::unify::Substitution;

use super::OracleError;

/// Most variables a substitution may be enumerated over.
pub const MAX_SCOPE: usize = 4;
/// Most terms a universe may hold.
pub const MAX_TERMS: usize = 200;

/// Terms over a signature up to a depth, plus a small pool of variables
/// that stand in for arbitrary non-ground structure. Variables and
/// constants have depth 1.
#[derive(Clone, Debug)]
pub struct Universe {
    signature: Vec<(String, usize)>,
    depth: usize,
    pool: usize,
    terms: Vec<Term>,
    index: HashMap<Term, u32>,
}

pub(crate) fn pool_var(p: usize) -> Var {
    Var::new(format!("?{}", p + 1))
}

impl Universe {
    pub fn new(signature: &[(&str, usize)], depth: usize, pool: usize) -> Result<Self, OracleError> {
        if !signature.iter().any(|(_, n)| *n == 0) {
            return Err(OracleError::NoConstant);
        }
        if depth == 0 {
            return Err(OracleError::BudgetExceeded("depth must be at least 1".into()));
        }
        let mut terms: Vec<Term> = signature.iter().filter(|(_, n)| *n == 0).map(|(f, _)| Term::constant(f)).collect();
        terms.extend((0..pool).map(|p| Term::Var(pool_var(p))));
        for _ in 1..depth {
            let prev = terms.clone();
            let mut next: Vec<Term> = terms.clone();
            for (f, n) in signature.iter().filter(|(_, n)| *n > 0) {
                let mut args = vec![0usize; *n];
                let budget = MAX_TERMS.saturating_sub(next.len());
                let combos = prev.len().checked_pow(*n as u32).unwrap_or(usize::MAX);
                if combos > budget {
                    return Err(OracleError::BudgetExceeded(format!(
                        "universe over depth {depth} exceeds {MAX_TERMS} terms"
                    )));
                }
                loop {
                    let t = Term::compound(f, args.iter().map(|&i| prev[i].clone()).collect());
                    if !next.contains(&t) {
                        next.push(t);
                    }
                    // Odometer over argument indices.
                    let mut i = 0;
                    while i < *n {
                        args[i] += 1;
                        if args[i] < prev.len() {
                            break;
                        }
                        args[i] = 0;
                        i += 1;
                    }
                    if i == *n {
                        break;
                    }
                }
            }
            terms = next;
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Universe {
            signature: signature.iter().map(|(f, n)| (f.to_string(), *n)).collect(),
            depth,
            pool,
            terms,
            index,
        })
    }

    /// `{a/0, f/1, g/2}` at the given depth with two pool variables.
    pub fn standard(depth: usize) -> Result<Self, OracleError> {
        Universe::new(&[("a", 0), ("f", 1), ("g", 2)], depth, 2)
    }

    pub fn signature(&self) -> &[(String, usize)] {
        &self.signature
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn pool(&self) -> usize {
        self.pool
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn id(&self, t: &Term) -> Option<u32> {
        self.index.get(t).copied()
    }

    /// Ids of the terms a variable may take: all of them, or only ground
    /// ones.
    pub(crate) fn choices(&self, ground_only: bool) -> Vec<u32> {
        (0..self.terms.len() as u32).filter(|&i| !ground_only || self.terms[i as usize].is_ground()).collect()
    }
}

/// A set of substitutions over one scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteSet {
    pub scope: Vec<Var>,
    pub subs: Vec<Substitution>,
}

impl ConcreteSet {
    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn contains(&self, s: &Substitution) -> bool {
        self.subs.contains(s)
    }

    pub fn filter(&self, keep: impl Fn(&Substitution) -> bool) -> ConcreteSet {
        ConcreteSet { scope: self.scope.clone(), subs: self.subs.iter().filter(|s| keep(s)).cloned().collect() }
    }
}

pub(crate) fn check_scope(scope_len: usize) -> Result<(), OracleError> {
    if scope_len > MAX_SCOPE {
        Err(OracleError::BudgetExceeded(format!("{scope_len} variables in scope, limit {MAX_SCOPE}")))
    } else {
        Ok(())
    }
}

/// Every tuple of term ids for `n` variables drawn from `choices`, in
/// odometer order.
pub(crate) fn tuples(choices: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for c in choices {
        out = out.iter().flat_map(|prefix| c.iter().map(move |&t| [prefix.as_slice(), &[t]].concat())).collect();
    }
    out
}

/// Every map from `scope` into the universe's terms.
pub fn enumerate_subs(scope: &[Var], u: &Universe) -> Result<ConcreteSet, OracleError> {
    check_scope(scope.len())?;
    let all = u.choices(false);
    let subs = tuples(&vec![all; scope.len()])
        .into_iter()
        .map(|ids| {
            Substitution::from_bindings(scope.iter().cloned().zip(ids.iter().map(|&i| u.terms()[i as usize].clone())))
                .expect("pool variables never occur in the scope")
        })
        .collect();
    Ok(ConcreteSet { scope: scope.to_vec(), subs })
}

/// Parses a term in which `P1`, `P2`, ... stand for pool variables.
#[cfg(test)]
pub(crate) fn pool_term(text: &str) -> Term {
    fn go(t: &Term) -> Term {
        match t {
            Term::Var(v) => match v.name().strip_prefix('P') {
                Some(n) => Term::Var(Var::new(format!("?{n}"))),
                None => t.clone(),
            },
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(go).collect()),
        }
    }
    go(&crate::syntax::parse_term(text).expect("test term parses"))
}
