//! The polymorphic groundness domain.
//!
//! A description is a set of sets of mode parameters read as a disjunction
//! of conjunctions: under an assignment it denotes `u` iff some member set
//! has every parameter assigned `u`. Descriptions are kept as their unique
//! minimal antichain, so structural equality coincides with equivalence.

use std::fmt;

use thiserror::Error;

use crate::absub::{self, Abs, DomainError, ModeLattice, UnifyTrace};
use crate::mono::{Mode, MonoAbs};
use crate::syntax::Atom;
use crate::unify::{EqSet, Renamer};

/// Hard limit imposed by the bitset representation.
pub const MAX_PARAMS: usize = 32;
/// Beyond this many parameters the antichain lattice gets large enough to
/// warrant a warning.
pub const SOFT_PARAM_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown mode parameter `{0}`")]
    UnknownParam(String),
    #[error("parameter `{0}` is assigned more than once")]
    DuplicateParam(String),
    #[error("assignment does not cover parameter(s) {0}")]
    PartialAssignment(String),
    #[error("{0} mode parameters exceed the supported maximum of {MAX_PARAMS}")]
    TooManyParams(usize),
    #[error("`{0}` is reserved for concrete modes and cannot name a parameter")]
    ReservedName(String),
}

/// The declared mode parameters, sorted by name. A parameter's index is its
/// bit position.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Params {
    names: Vec<String>,
}

impl Params {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, PolyError> {
        let mut names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        names.dedup();
        if let Some(bad) = names.iter().find(|n| *n == "g" || *n == "u") {
            return Err(PolyError::ReservedName(bad.clone()));
        }
        if names.len() > MAX_PARAMS {
            return Err(PolyError::TooManyParams(names.len()));
        }
        Ok(Params { names })
    }

    /// Parameters `p1 .. pn`, for generated tests.
    pub fn numbered(n: usize) -> Self {
        Params::new((1..=n).map(|i| format!("p{i}"))).expect("within limits")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize, PolyError> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).map_err(|_| PolyError::UnknownParam(name.to_string()))
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    fn full_mask(&self) -> u32 {
        if self.names.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.names.len()) - 1
        }
    }

    /// Every assignment, in increasing order of the `u` bitmask.
    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        assert!(self.len() < 32, "too many parameters to enumerate assignments");
        (0..=self.full_mask()).map(move |u_mask| Assignment { u_mask, n: self.len() })
    }
}

/// A canonical polymorphic mode description.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PMode {
    /// Minimal antichain of parameter bitsets, sorted numerically.
    sets: Vec<u32>,
}

impl PMode {
    /// `[]`: ground under every assignment.
    pub fn infimum() -> Self {
        PMode { sets: Vec::new() }
    }

    /// `[[]]`: unknown under every assignment.
    pub fn supremum() -> Self {
        PMode { sets: vec![0] }
    }

    /// The description of a single parameter.
    pub fn param(index: usize) -> Self {
        PMode { sets: vec![1 << index] }
    }

    pub fn from_mode(m: Mode) -> Self {
        match m {
            Mode::G => Self::infimum(),
            Mode::U => Self::supremum(),
        }
    }

    /// Canonicalizes an arbitrary collection of bitsets.
    pub fn canon(raw: impl IntoIterator<Item = u32>) -> Self {
        let mut sets: Vec<u32> = raw.into_iter().collect();
        sets.sort_by_key(|s| (s.count_ones(), *s));
        sets.dedup();
        let mut kept: Vec<u32> = Vec::with_capacity(sets.len());
        for s in sets {
            // Earlier entries are no larger, so only they can be subsets.
            if !kept.iter().any(|k| k & s == *k) {
                kept.push(s);
            }
        }
        kept.sort_unstable();
        PMode { sets: kept }
    }

    /// Builds from parameter names, e.g. `&[&["alpha", "beta"], &["gamma"]]`.
    pub fn from_names<S: AsRef<str>>(params: &Params, sets: &[&[S]]) -> Result<Self, PolyError> {
        let mut raw = Vec::with_capacity(sets.len());
        for set in sets {
            let mut bits = 0u32;
            for name in set.iter() {
                bits |= 1 << params.index(name.as_ref())?;
            }
            raw.push(bits);
        }
        Ok(Self::canon(raw))
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    pub fn is_infimum(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_supremum(&self) -> bool {
        self.sets == [0]
    }

    /// Member sets as sorted index lists, in lexicographic order.
    pub fn index_lists(&self) -> Vec<Vec<usize>> {
        let mut lists: Vec<Vec<usize>> =
            self.sets.iter().map(|s| (0..32).filter(|i| s >> i & 1 == 1).collect()).collect();
        lists.sort();
        lists
    }

    pub fn name_lists(&self, params: &Params) -> Vec<Vec<String>> {
        self.index_lists().into_iter().map(|l| l.into_iter().map(|i| params.name(i).to_string()).collect()).collect()
    }

    /// Renders `[[alpha,beta],[gamma]]`.
    pub fn render(&self, params: &Params) -> String {
        let inner: Vec<String> = self.name_lists(params).into_iter().map(|l| format!("[{}]", l.join(","))).collect();
        format!("[{}]", inner.join(","))
    }

    pub fn instantiate(&self, kappa: &Assignment) -> Mode {
        pm_instantiate(self, kappa)
    }
}

impl fmt::Debug for PMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self
            .index_lists()
            .into_iter()
            .map(|l| format!("[{}]", l.iter().map(|i| format!("p{}", i + 1)).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", inner.join(","))
    }
}

impl ModeLattice for PMode {
    fn bottom() -> Self {
        PMode::infimum()
    }

    fn top() -> Self {
        PMode::supremum()
    }

    fn leq(&self, other: &Self) -> bool {
        pm_leq(self, other)
    }

    fn join(&self, other: &Self) -> Self {
        pm_lub(self, other)
    }

    fn meet(&self, other: &Self) -> Self {
        pm_glb(self, other)
    }
}

/// Every member of `a` has a subset in `b`.
pub fn pm_leq(a: &PMode, b: &PMode) -> bool {
    a.sets.iter().all(|s1| b.sets.iter().any(|s2| s2 & s1 == *s2))
}

/// `⊕`: union of the collections.
pub fn pm_lub(a: &PMode, b: &PMode) -> PMode {
    PMode::canon(a.sets.iter().chain(b.sets.iter()).copied())
}

/// `⊗`: pairwise unions of members.
pub fn pm_glb(a: &PMode, b: &PMode) -> PMode {
    PMode::canon(a.sets.iter().flat_map(|s1| b.sets.iter().map(move |s2| s1 | s2)))
}

/// A total valuation of the parameters, stored as the set of parameters
/// assigned `u`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Assignment {
    u_mask: u32,
    n: usize,
}

impl Assignment {
    pub fn from_u_mask(params: &Params, u_mask: u32) -> Self {
        Assignment { u_mask: u_mask & params.full_mask(), n: params.len() }
    }

    pub fn uniform(params: &Params, m: Mode) -> Self {
        Self::from_u_mask(params, if m == Mode::U { u32::MAX } else { 0 })
    }

    /// Requires exactly one mode per declared parameter.
    pub fn from_pairs<S: AsRef<str>>(params: &Params, pairs: &[(S, Mode)]) -> Result<Self, PolyError> {
        let mut seen = 0u32;
        let mut u_mask = 0u32;
        for (name, m) in pairs {
            let i = params.index(name.as_ref())?;
            if seen >> i & 1 == 1 {
                return Err(PolyError::DuplicateParam(name.as_ref().to_string()));
            }
            seen |= 1 << i;
            if *m == Mode::U {
                u_mask |= 1 << i;
            }
        }
        if seen != params.full_mask() {
            let missing: Vec<&str> = (0..params.len()).filter(|i| seen >> i & 1 == 0).map(|i| params.name(i)).collect();
            return Err(PolyError::PartialAssignment(missing.join(", ")));
        }
        Ok(Assignment { u_mask, n: params.len() })
    }

    pub fn get(&self, index: usize) -> Mode {
        if self.u_mask >> index & 1 == 1 {
            Mode::U
        } else {
            Mode::G
        }
    }

    pub fn u_mask(&self) -> u32 {
        self.u_mask
    }

    pub fn render(&self, params: &Params) -> String {
        let parts: Vec<String> = (0..self.n).map(|i| format!("{}={}", params.name(i), self.get(i))).collect();
        parts.join(",")
    }
}

/// Join over member sets of the meet of their parameters' modes.
pub fn pm_instantiate(s: &PMode, kappa: &Assignment) -> Mode {
    if s.sets.iter().any(|set| set & !kappa.u_mask == 0) {
        Mode::U
    } else {
        Mode::G
    }
}

pub type PolyAbs = Abs<PMode>;

pub fn pabs_leq(a: &PolyAbs, b: &PolyAbs) -> Result<bool, DomainError> {
    a.leq(b)
}

pub fn pabs_lub(a: &PolyAbs, b: &PolyAbs) -> Result<PolyAbs, DomainError> {
    a.join(b)
}

pub fn pabs_glb(a: &PolyAbs, b: &PolyAbs) -> Result<PolyAbs, DomainError> {
    a.meet(b)
}

pub fn pabs_instantiate(a: &PolyAbs, kappa: &Assignment) -> MonoAbs {
    a.map_values(|s| pm_instantiate(s, kappa))
}

pub fn pdown(e: &EqSet, zeta: &PolyAbs) -> Result<PolyAbs, DomainError> {
    absub::down(e, zeta)
}

pub fn pup(e: &EqSet, eta: &PolyAbs) -> Result<PolyAbs, DomainError> {
    absub::up(e, eta)
}

pub fn punify(a: &Atom, theta: &PolyAbs, b: &Atom, sigma: &PolyAbs, r: &mut Renamer) -> Result<PolyAbs, DomainError> {
    absub::aunify(a, theta, b, sigma, r)
}

pub fn punify_traced(
    a: &Atom,
    theta: &PolyAbs,
    b: &Atom,
    sigma: &PolyAbs,
    r: &mut Renamer,
) -> Result<UnifyTrace<PMode>, DomainError> {
    absub::aunify_traced(a, theta, b, sigma, r)
}

/// Renders `{X/[[alpha]], ...}` with variables sorted by name.
pub fn render(abs: &PolyAbs, params: &Params) -> String {
    abs.render_with([], |m| m.render(params))
}

/// Every canonical description over `n` parameters (the antichains of the
/// powerset lattice).
pub fn all_pmodes(n: usize) -> Vec<PMode> {
    assert!(n <= 4, "antichain enumeration is only meant for tiny parameter sets");
    let subsets = 1u32 << n;
    let mut out: Vec<PMode> =
        (0..1u64 << subsets).map(|family| PMode::canon((0..subsets).filter(|s| family >> s & 1 == 1))).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, Var};
    use crate::unify::{eq_of, mgu, mgu_atoms};

    fn greek() -> Params {
        Params::new(["alpha1", "alpha2", "alpha3"]).unwrap()
    }

    fn pm(sets: &[&[&str]]) -> PMode {
        PMode::from_names(&greek(), sets).unwrap()
    }

    fn pabs(entries: &[(&str, PMode)]) -> PolyAbs {
        Abs::new(entries.iter().map(|(v, m)| (Var::new(v), m.clone())))
    }

    #[test]
    fn canonical_form_drops_supersets() {
        assert_eq!(pm(&[&["alpha1", "alpha2"], &["alpha1"]]), pm(&[&["alpha1"]]));
        assert_eq!(pm(&[&[], &["alpha1"]]), PMode::supremum());
        assert_eq!(PMode::canon([]), PMode::infimum());
        assert_eq!(pm(&[&["alpha1"], &["alpha1"]]).sets().len(), 1);
    }

    #[test]
    fn canon_rejects_unknown_params() {
        assert_eq!(PMode::from_names(&greek(), &[&["omega"]]), Err(PolyError::UnknownParam("omega".into())));
    }

    #[test]
    fn ordering_examples() {
        let lhs = pm(&[&["alpha1", "alpha2"], &["alpha1", "alpha3"]]);
        assert!(pm_leq(&lhs, &pm(&[&["alpha1"]])));
        assert!(pm_leq(&lhs, &pm(&[&["alpha2"], &["alpha3"]])));
        for s in all_pmodes(3) {
            assert!(pm_leq(&PMode::infimum(), &s));
            assert!(pm_leq(&s, &PMode::supremum()));
        }
    }

    #[test]
    fn lub_and_glb_examples() {
        let meet = pm_glb(&pm(&[&["alpha1"], &["alpha2"]]), &pm(&[&["alpha1", "alpha3"]]));
        assert_eq!(meet, pm(&[&["alpha1", "alpha3"]]));
        assert_eq!(
            pm_lub(&pm(&[&["alpha1", "alpha2"]]), &pm(&[&["alpha1", "alpha2", "alpha3"]])),
            pm(&[&["alpha1", "alpha2"]])
        );
        assert_eq!(
            pm_glb(&pm(&[&["alpha1", "alpha2"]]), &pm(&[&["alpha1", "alpha2", "alpha3"]])),
            pm(&[&["alpha1", "alpha2", "alpha3"]])
        );
    }

    /// Truth-table evaluation, independent of `pm_instantiate`'s bit trick.
    fn eval_dnf(s: &PMode, kappa: &Assignment, n: usize) -> Mode {
        s.index_lists()
            .iter()
            .map(|set| set.iter().fold(Mode::U, |acc, &i| crate::mono::mode_glb(acc, kappa.get(i))))
            .fold(Mode::G, crate::mono::mode_lub)
            .min(if n == usize::MAX { Mode::G } else { Mode::U })
    }

    #[test]
    fn meet_example_agrees_under_every_assignment() {
        let params = greek();
        let a = pm(&[&["alpha1"], &["alpha2"]]);
        let b = pm(&[&["alpha1", "alpha3"]]);
        let m = pm_glb(&a, &b);
        for k in params.assignments() {
            let expected = crate::mono::mode_glb(eval_dnf(&a, &k, 3), eval_dnf(&b, &k, 3));
            assert_eq!(eval_dnf(&m, &k, 3), expected);
        }
    }

    #[test]
    fn instantiation() {
        let params = Params::new(["alpha", "beta"]).unwrap();
        for k in params.assignments() {
            assert_eq!(pm_instantiate(&PMode::infimum(), &k), Mode::G);
            assert_eq!(pm_instantiate(&PMode::supremum(), &k), Mode::U);
        }
        let k = Assignment::from_pairs(&params, &[("alpha", Mode::G), ("beta", Mode::U)]).unwrap();
        let s = PMode::from_names(&params, &[&["alpha", "beta"]]).unwrap();
        assert_eq!(pm_instantiate(&s, &k), Mode::G);
        assert_eq!(eval_dnf(&s, &k, 2), Mode::G);
    }

    #[test]
    fn assignments_must_be_total() {
        let params = greek();
        assert!(matches!(
            Assignment::from_pairs(&params, &[("alpha1", Mode::G)]),
            Err(PolyError::PartialAssignment(_))
        ));
        assert!(matches!(
            Assignment::from_pairs(&params, &[("alpha1", Mode::G), ("alpha1", Mode::U)]),
            Err(PolyError::DuplicateParam(_))
        ));
        assert!(matches!(Assignment::from_pairs(&params, &[("zeta", Mode::G)]), Err(PolyError::UnknownParam(_))));
        assert_eq!(params.assignments().count(), 8);
    }

    #[test]
    fn reserved_names() {
        assert_eq!(Params::new(["g"]), Err(PolyError::ReservedName("g".into())));
    }

    #[test]
    fn antichain_counts() {
        assert_eq!(all_pmodes(0).len(), 2);
        assert_eq!(all_pmodes(1).len(), 3);
        assert_eq!(all_pmodes(2).len(), 6);
        assert_eq!(all_pmodes(3).len(), 20);
    }

    #[test]
    fn rendering() {
        let params = Params::new(["alpha", "beta", "gamma"]).unwrap();
        let s = PMode::from_names(&params, &[&["gamma"], &["beta", "alpha"]]).unwrap();
        assert_eq!(s.render(&params), "[[alpha,beta],[gamma]]");
        assert_eq!(PMode::infimum().render(&params), "[]");
        assert_eq!(PMode::supremum().render(&params), "[[]]");
    }

    fn worked_equations() -> EqSet {
        let mut r = Renamer::new();
        let a = r.rename(&parse_atom("g(X,f(Y,f(Z,Z)),Y)").unwrap());
        eq_of(mgu_atoms(&a, &parse_atom("g(f(X,Y),Z,X)").unwrap())).unwrap()
    }

    fn a12() -> PMode {
        pm(&[&["alpha1", "alpha2"]])
    }
    fn a13() -> PMode {
        pm(&[&["alpha1", "alpha3"]])
    }
    fn a23() -> PMode {
        pm(&[&["alpha2", "alpha3"]])
    }
    fn a123() -> PMode {
        pm(&[&["alpha1", "alpha2", "alpha3"]])
    }
    fn a1_or_a2() -> PMode {
        pm(&[&["alpha1"], &["alpha2"]])
    }

    #[test]
    fn pdown_worked_example() {
        let zeta = pabs(&[
            ("X#0", a12()),
            ("Y#0", a13()),
            ("Z#0", a23()),
            ("X", a1_or_a2()),
            ("Y", a23()),
            ("Z", PMode::supremum()),
        ]);
        let eta = pdown(&worked_equations(), &zeta).unwrap();
        let expected = pabs(&[
            ("X#0", a12()),
            ("Y#0", a123()),
            ("Z#0", a23()),
            ("X", a1_or_a2()),
            ("Y", a123()),
            ("Z", PMode::supremum()),
        ]);
        assert_eq!(eta, expected);
    }

    #[test]
    fn pup_worked_example() {
        let eta = pabs(&[
            ("X#0", a12()),
            ("Y#0", a123()),
            ("Z#0", a23()),
            ("X", a1_or_a2()),
            ("Y", a123()),
            ("Z", PMode::supremum()),
        ]);
        let beta = pup(&worked_equations(), &eta).unwrap();
        let expected =
            pabs(&[("X#0", a123()), ("Y#0", a123()), ("Z#0", a23()), ("X", a123()), ("Y", a123()), ("Z", a23())]);
        assert_eq!(beta, expected);
    }

    #[test]
    fn small_pdown_pup_cases() {
        let params = Params::new(["alpha", "beta"]).unwrap();
        let e =
            eq_of(mgu(&crate::syntax::parse_term("X").unwrap(), &crate::syntax::parse_term("f(Y)").unwrap())).unwrap();
        let zeta = pabs(&[("X", PMode::infimum()), ("Y", PMode::supremum())]);
        assert_eq!(pdown(&e, &zeta).unwrap(), pabs(&[("X", PMode::infimum()), ("Y", PMode::infimum())]));

        let e = eq_of(mgu(&crate::syntax::parse_term("X").unwrap(), &crate::syntax::parse_term("f(Y,Z)").unwrap()))
            .unwrap();
        let alpha = PMode::from_names(&params, &[&["alpha"]]).unwrap();
        let beta = PMode::from_names(&params, &[&["beta"]]).unwrap();
        let eta = pabs(&[("X", PMode::supremum()), ("Y", alpha.clone()), ("Z", beta.clone())]);
        let out = pup(&e, &eta).unwrap();
        assert_eq!(out.get(&Var::new("X")), Some(&PMode::from_names(&params, &[&["alpha"], &["beta"]]).unwrap()));
    }

    #[test]
    fn punify_worked_example() {
        let a = parse_atom("g(X,f(Y,f(Z,Z)),Y)").unwrap();
        let b = parse_atom("g(f(X,Y),Z,X)").unwrap();
        let theta = pabs(&[("X", a12()), ("Y", a13()), ("Z", a23())]);
        let sigma = pabs(&[("X", a1_or_a2()), ("Y", a23()), ("Z", PMode::supremum())]);
        let out = punify(&a, &theta, &b, &sigma, &mut Renamer::new()).unwrap();
        assert_eq!(out, pabs(&[("X", a123()), ("Y", a123()), ("Z", a23())]));
    }

    #[test]
    fn punify_failure_gives_infimum() {
        let a = parse_atom("p(a,X)").unwrap();
        let b = parse_atom("p(b,Y)").unwrap();
        let out = punify(&a, &pabs(&[("X", a12())]), &b, &pabs(&[("Y", a13())]), &mut Renamer::new()).unwrap();
        assert_eq!(out, pabs(&[("Y", PMode::infimum())]));
    }

    #[test]
    fn pabs_instantiation_of_lookup_output() {
        let params = Params::new(["alpha", "beta", "gamma"]).unwrap();
        let out = Abs::new([
            (Var::new("K"), PMode::from_names(&params, &[&["alpha", "beta"]]).unwrap()),
            (Var::new("D"), PMode::from_names(&params, &[&["beta"]]).unwrap()),
            (Var::new("V"), PMode::from_names(&params, &[&["beta", "gamma"]]).unwrap()),
        ]);
        let k = Assignment::from_pairs(&params, &[("alpha", Mode::G), ("beta", Mode::G), ("gamma", Mode::U)]).unwrap();
        let mono = pabs_instantiate(&out, &k);
        assert!(mono.iter().all(|(_, m)| *m == Mode::G));

        let bottom: PolyAbs = Abs::bottom(out.scope());
        for k in params.assignments() {
            assert!(pabs_instantiate(&bottom, &k).iter().all(|(_, m)| *m == Mode::G));
        }
        let single = Params::new(["alpha"]).unwrap();
        let x = Abs::new([(Var::new("X"), PMode::param(0))]);
        let k = Assignment::from_pairs(&single, &[("alpha", Mode::U)]).unwrap();
        assert_eq!(pabs_instantiate(&x, &k).get(&Var::new("X")), Some(&Mode::U));
    }

    #[test]
    fn pointwise_poly_ops() {
        let params = Params::new(["alpha", "beta"]).unwrap();
        let a = Abs::new([(Var::new("X"), PMode::from_names(&params, &[&["alpha"]]).unwrap())]);
        let b = Abs::new([(Var::new("X"), PMode::from_names(&params, &[&["beta"]]).unwrap())]);
        assert!(pabs_leq(&a, &a).unwrap());
        assert_eq!(
            pabs_lub(&a, &b).unwrap().get(&Var::new("X")),
            Some(&PMode::from_names(&params, &[&["alpha"], &["beta"]]).unwrap())
        );
        let top: PolyAbs = Abs::top(a.scope());
        assert_eq!(pabs_lub(&a, &top).unwrap(), top);
        let other = Abs::new([(Var::new("Y"), PMode::infimum())]);
        assert!(matches!(pabs_lub(&a, &other), Err(DomainError::ScopeMismatch(_))));
    }
}
