//! Groundness implications read off polymorphic descriptions.
//!
//! `Xs -> Y` holds when, under every assignment that makes all of `Xs`
//! ground, `Y` is ground too. That is the case exactly when the
//! description of `Y` lies below the join of the descriptions of `Xs`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::absub::DomainError;
use crate::engine::ProgramPoint;
use crate::poly::{pm_leq, pm_lub, PMode, PolyAbs};
use crate::syntax::Var;

/// Largest scope for which implications are enumerated.
pub const MAX_SCOPE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DepsError {
    #[error("{0} variables in scope; implication search is limited to {MAX_SCOPE}")]
    BudgetExceeded(usize),
    #[error("antecedents and consequents must be nonempty and disjoint")]
    BadSides,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Goal,
    Point(ProgramPoint),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Goal => f.write_str("goal"),
            Site::Point((c, k)) => write!(f, "clause {c} point {k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Implication {
    pub antecedents: BTreeSet<Var>,
    pub consequents: BTreeSet<Var>,
    pub at: Site,
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |s: &BTreeSet<Var>| s.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ");
        write!(f, "{} -> {} @ {}", names(&self.antecedents), names(&self.consequents), self.at)
    }
}

fn join_of(abs: &PolyAbs, vars: &BTreeSet<Var>) -> Result<PMode, DomainError> {
    vars.iter().try_fold(PMode::infimum(), |acc, v| {
        abs.get(v).map(|m| pm_lub(&acc, m)).ok_or_else(|| DomainError::ScopeMismatch(format!("no description for {v}")))
    })
}

pub fn implies(abs: &PolyAbs, ante: &BTreeSet<Var>, cons: &BTreeSet<Var>) -> Result<bool, DepsError> {
    if ante.is_empty() || cons.is_empty() || !ante.is_disjoint(cons) {
        return Err(DepsError::BadSides);
    }
    Ok(pm_leq(&join_of(abs, cons)?, &join_of(abs, ante)?))
}

/// Every implication with one consequent and a subset-minimal antecedent
/// set, ordered by antecedents then consequent.
pub fn minimal_implications(abs: &PolyAbs, at: Site) -> Result<Vec<Implication>, DepsError> {
    let vars: Vec<Var> = abs.scope().cloned().collect();
    if vars.len() > MAX_SCOPE {
        return Err(DepsError::BudgetExceeded(vars.len()));
    }
    let mut out = Vec::new();
    for (yi, y) in vars.iter().enumerate() {
        let cons = BTreeSet::from([y.clone()]);
        let others: Vec<usize> = (0..vars.len()).filter(|&i| i != yi).collect();
        let mut masks: Vec<u32> = (1..1u32 << others.len()).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let mut found: Vec<u32> = Vec::new();
        for m in masks {
            if found.iter().any(|f| f & m == *f) {
                continue;
            }
            let ante: BTreeSet<Var> =
                others.iter().enumerate().filter(|(bit, _)| m >> bit & 1 == 1).map(|(_, &i)| vars[i].clone()).collect();
            if implies(abs, &ante, &cons)? {
                found.push(m);
                out.push(Implication { antecedents: ante, consequents: cons.clone(), at });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absub::Abs;
    use crate::mono::Mode;
    use crate::poly::{pabs_instantiate, Params};

    fn set(vs: &[&str]) -> BTreeSet<Var> {
        vs.iter().map(Var::new).collect()
    }

    fn permsort_output(params: &Params) -> PolyAbs {
        Abs::new([
            (Var::new("Xs"), PMode::from_names(params, &[&["alpha"]]).unwrap()),
            (Var::new("Ys"), PMode::from_names(params, &[&["alpha", "beta"]]).unwrap()),
        ])
    }

    #[test]
    fn permsort_direction() {
        let params = Params::new(["alpha", "beta"]).unwrap();
        let abs = permsort_output(&params);
        assert!(implies(&abs, &set(&["Xs"]), &set(&["Ys"])).unwrap());
        assert!(!implies(&abs, &set(&["Ys"]), &set(&["Xs"])).unwrap());
        let found = minimal_implications(&abs, Site::Goal).unwrap();
        assert_eq!(found.iter().map(|i| i.to_string()).collect::<Vec<_>>(), ["Xs -> Ys @ goal"]);
    }

    #[test]
    fn reverse_fails_under_some_assignment() {
        let params = Params::new(["alpha", "beta"]).unwrap();
        let abs = permsort_output(&params);
        let witness = params.assignments().find(|k| {
            let m = pabs_instantiate(&abs, k);
            m.get(&Var::new("Ys")) == Some(&Mode::G) && m.get(&Var::new("Xs")) == Some(&Mode::U)
        });
        assert!(witness.is_some());
    }

    #[test]
    fn ground_consequents_follow_from_anything() {
        let abs: PolyAbs = Abs::bottom(set(&["X", "Y"]).iter());
        let found = minimal_implications(&abs, Site::Goal).unwrap();
        assert_eq!(found.iter().map(|i| i.to_string()).collect::<Vec<_>>(), ["X -> Y @ goal", "Y -> X @ goal"]);
    }

    #[test]
    fn independent_parameters_imply_nothing() {
        let abs = Abs::new([(Var::new("X"), PMode::param(0)), (Var::new("Y"), PMode::param(1))]);
        assert!(minimal_implications(&abs, Site::Goal).unwrap().is_empty());
    }

    #[test]
    fn antecedents_combine() {
        let params = Params::new(["a", "b"]).unwrap();
        let abs = Abs::new([
            (Var::new("X"), PMode::param(0)),
            (Var::new("Y"), PMode::param(1)),
            (Var::new("Z"), PMode::from_names(&params, &[&["a"], &["b"]]).unwrap()),
        ]);
        let found: Vec<String> =
            minimal_implications(&abs, Site::Point((2, 1))).unwrap().iter().map(|i| i.to_string()).collect();
        assert_eq!(found, ["X, Y -> Z @ clause 2 point 1", "Z -> X @ clause 2 point 1", "Z -> Y @ clause 2 point 1"]);
    }

    #[test]
    fn guards() {
        let abs: PolyAbs = Abs::bottom(set(&["X", "Y"]).iter());
        assert_eq!(implies(&abs, &set(&["X"]), &set(&["X"])), Err(DepsError::BadSides));
        assert!(matches!(implies(&abs, &set(&["Q"]), &set(&["X"])), Err(DepsError::Domain(_))));
        let names: Vec<String> = (0..11).map(|i| format!("V{i}")).collect();
        let big: PolyAbs = Abs::bottom(names.iter().map(Var::new).collect::<Vec<_>>().iter());
        assert_eq!(minimal_implications(&big, Site::Goal), Err(DepsError::BudgetExceeded(11)));
    }
}
