//! Goal-dependent least-fixpoint analysis over either domain.
//!
//! Calls are memoized by call pattern: the called atom with its variables
//! renamed `A1, A2, ...` by first occurrence, plus the entry description
//! projected onto those variables. Variant calls therefore share a pattern.
//! Patterns are solved by a worklist that re-evaluates callers whenever a
//! callee's output grows.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::absub::{aunify, solve_in_place, Abs, DomainError, ModeLattice};
use crate::mono::{Mode, MonoAbs};
use crate::poly::{pabs_instantiate, Assignment, PMode, Params, PolyAbs, PolyError};
use crate::syntax::{Atom, BuiltinKind, Clause, Directive, Literal, ParamOrMode, PredKey, Program, Term, Var};
use crate::unify::{eq_of, mgu, mgu_atoms, Renamer};

/// Default bound on procedure evaluations.
pub const DEFAULT_ITERATION_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("undefined predicate {0}")]
    UndefinedPredicate(PredKey),
    #[error("analysis did not stabilize within {cap} procedure evaluations ({patterns} call patterns live)")]
    IterationCap { cap: usize, patterns: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("mode parameters {0} need an assignment for a monomorphic analysis")]
    MissingAssignment(String),
}

#[derive(Clone, Debug)]
pub struct Options {
    pub iteration_cap: usize,
    /// Record every memo update, in order.
    pub trace: bool,
    pub comparisons: Comparisons,
}

/// What an arithmetic comparison tells the analysis about its operands.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Comparisons {
    /// Pass the description through unchanged. Safe for any call.
    #[default]
    Identity,
    /// Treat both operands as ground afterwards, since a comparison that
    /// succeeds must have evaluated them.
    GroundOperands,
}

impl Default for Options {
    fn default() -> Self {
        Options { iteration_cap: DEFAULT_ITERATION_CAP, trace: false, comparisons: Comparisons::Identity }
    }
}

/// A memoized call: canonical atom and entry description over its variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CallPattern<M: ModeLattice> {
    pub atom: Atom,
    pub entry: Abs<M>,
}

impl<M: ModeLattice> CallPattern<M> {
    /// The pattern for calling `call` in a state described by `cur`.
    pub fn of(call: &Atom, cur: &Abs<M>) -> Self {
        let mut names: HashMap<Var, Var> = HashMap::new();
        for v in call.vars() {
            let fresh = Var::new(format!("A{}", names.len() + 1));
            names.insert(v, fresh);
        }
        let atom = call.map_args(|t| rename_term(t, &names));
        let entry = cur.restrict(names.keys()).map_vars(|v| names[v].clone());
        CallPattern { atom, entry }
    }

    pub fn key(&self) -> PredKey {
        self.atom.key()
    }
}

fn rename_term(t: &Term, names: &HashMap<Var, Var>) -> Term {
    match t {
        Term::Var(v) => Term::Var(names[v].clone()),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| rename_term(a, names)).collect()),
    }
}

/// `(clause id, k)`: the point after head entry (`k = 0`) or after the
/// `k`-th body literal.
pub type ProgramPoint = (usize, usize);

type Points<M> = BTreeMap<ProgramPoint, Abs<M>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisResult<M: ModeLattice> {
    pub goal: Atom,
    pub goal_input: Abs<M>,
    pub goal_output: Abs<M>,
    /// Output of every call pattern reachable from the goal.
    pub memo: Vec<(CallPattern<M>, Abs<M>)>,
    /// Join over reachable call patterns of the description at each point.
    /// Points in clauses never entered are absent.
    pub points: BTreeMap<ProgramPoint, Abs<M>>,
    /// Procedure evaluations performed.
    pub iterations: usize,
    /// Memo updates as `(pattern index, new output)`, when requested.
    pub trace: Vec<(usize, Abs<M>)>,
}

impl<M: ModeLattice> AnalysisResult<M> {
    pub fn point(&self, clause: usize, k: usize) -> Option<&Abs<M>> {
        self.points.get(&(clause, k))
    }

    /// Output recorded for the call pattern of `call` under `cur`.
    pub fn lookup(&self, call: &Atom, cur: &Abs<M>) -> Option<&Abs<M>> {
        let p = CallPattern::of(call, cur);
        self.memo.iter().find(|(q, _)| *q == p).map(|(_, out)| out)
    }
}

pub fn instantiate_result(r: &AnalysisResult<PMode>, kappa: &Assignment) -> AnalysisResult<Mode> {
    let inst = |a: &PolyAbs| pabs_instantiate(a, kappa);
    AnalysisResult {
        goal: r.goal.clone(),
        goal_input: inst(&r.goal_input),
        goal_output: inst(&r.goal_output),
        memo: r
            .memo
            .iter()
            .map(|(p, out)| (CallPattern { atom: p.atom.clone(), entry: inst(&p.entry) }, inst(out)))
            .collect(),
        points: r.points.iter().map(|(k, a)| (*k, inst(a))).collect(),
        iterations: r.iterations,
        trace: r.trace.iter().map(|(i, a)| (*i, inst(a))).collect(),
    }
}

/// Entry description of the goal in the polymorphic domain.
pub fn poly_entry(d: &Directive) -> Result<(Params, PolyAbs), PolyError> {
    let params = Params::new(d.param_names())?;
    let mut abs = Abs::bottom(d.goal.vars().iter());
    for (v, b) in &d.bindings {
        let m = match b {
            ParamOrMode::Param(p) => PMode::param(params.index(p)?),
            ParamOrMode::Ground => PMode::infimum(),
            ParamOrMode::Unknown => PMode::supremum(),
        };
        abs.set(v.clone(), m);
    }
    Ok((params, abs))
}

/// Entry description of the goal in the monomorphic domain. Parameters are
/// resolved through `assign`, which must be given if any are used.
pub fn mono_entry(d: &Directive, assign: Option<(&Params, &Assignment)>) -> Result<MonoAbs, EngineError> {
    let mut abs = Abs::bottom(d.goal.vars().iter());
    for (v, b) in &d.bindings {
        let m = match b {
            ParamOrMode::Ground => Mode::G,
            ParamOrMode::Unknown => Mode::U,
            ParamOrMode::Param(p) => match assign {
                Some((params, kappa)) => kappa.get(params.index(p)?),
                None => return Err(EngineError::MissingAssignment(d.param_names().join(", "))),
            },
        };
        abs.set(v.clone(), m);
    }
    Ok(abs)
}

/// Abstract effect of a builtin literal on `abs`.
pub fn builtin_transfer<M: ModeLattice>(
    kind: BuiltinKind,
    args: &[Term],
    abs: &Abs<M>,
    comparisons: Comparisons,
) -> Result<Abs<M>, DomainError> {
    let ground = |ts: &[Term]| {
        let mut out = abs.clone();
        for v in ts.iter().flat_map(Term::vars) {
            out.set(v, M::bottom());
        }
        out
    };
    match kind {
        BuiltinKind::Unify => solve_in_place(eq_of(mgu(&args[0], &args[1])).as_ref(), abs),
        BuiltinKind::Is => Ok(ground(&args[..1])),
        BuiltinKind::Fail => Ok(Abs::bottom(abs.scope())),
        BuiltinKind::True => Ok(abs.clone()),
        _ => match comparisons {
            Comparisons::Identity => Ok(abs.clone()),
            Comparisons::GroundOperands => Ok(ground(args)),
        },
    }
}

pub fn analyze<M: ModeLattice>(
    program: &Program,
    goal: &Atom,
    input: &Abs<M>,
    opts: &Options,
) -> Result<AnalysisResult<M>, EngineError> {
    if let Some(missing) = program.undefined_predicates().into_iter().next() {
        return Err(EngineError::UndefinedPredicate(missing));
    }
    if !goal.var_set().iter().all(|v| input.contains(v)) {
        return Err(DomainError::ScopeMismatch(format!("goal {goal} has variables without a description")).into());
    }
    let mut solver =
        Solver { program, renamer: Renamer::new(), table: Table::new(), opts, iterations: 0, trace: Vec::new() };
    let root = solver.table.intern(CallPattern::of(goal, input));
    solver.run(root)?;
    let (points, reachable) = solver.collect(root)?;

    let root_pattern = &solver.table.patterns[root];
    let goal_output = aunify(&root_pattern.atom, &solver.table.outputs[root], goal, input, &mut solver.renamer)?;
    let memo =
        reachable.into_iter().map(|i| (solver.table.patterns[i].clone(), solver.table.outputs[i].clone())).collect();
    Ok(AnalysisResult {
        goal: goal.clone(),
        goal_input: input.clone(),
        goal_output,
        memo,
        points,
        iterations: solver.iterations,
        trace: solver.trace,
    })
}

struct Table<M: ModeLattice> {
    patterns: Vec<CallPattern<M>>,
    index: HashMap<CallPattern<M>, usize>,
    outputs: Vec<Abs<M>>,
    /// Callers of each pattern.
    callers: Vec<BTreeSet<usize>>,
}

impl<M: ModeLattice> Table<M> {
    fn new() -> Self {
        Table { patterns: Vec::new(), index: HashMap::new(), outputs: Vec::new(), callers: Vec::new() }
    }

    fn intern(&mut self, p: CallPattern<M>) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.patterns.len();
        self.outputs.push(Abs::bottom(p.entry.scope()));
        self.callers.push(BTreeSet::new());
        self.index.insert(p.clone(), i);
        self.patterns.push(p);
        i
    }
}

struct Solver<'a, M: ModeLattice> {
    program: &'a Program,
    renamer: Renamer,
    table: Table<M>,
    opts: &'a Options,
    iterations: usize,
    trace: Vec<(usize, Abs<M>)>,
}

/// How a body call is resolved during an evaluation pass.
enum Lookup<'b> {
    /// Intern unseen patterns and record the caller dependency.
    Solve(usize),
    /// Every pattern must already be solved; collect reached patterns.
    Collect(&'b mut BTreeSet<usize>),
}

impl<M: ModeLattice> Solver<'_, M> {
    fn run(&mut self, root: usize) -> Result<(), EngineError> {
        let mut queue = VecDeque::from([root]);
        let mut queued = BTreeSet::from([root]);
        while let Some(p) = queue.pop_front() {
            queued.remove(&p);
            if self.iterations >= self.opts.iteration_cap {
                return Err(EngineError::IterationCap {
                    cap: self.opts.iteration_cap,
                    patterns: self.table.patterns.len(),
                });
            }
            self.iterations += 1;
            let before = self.table.patterns.len();
            let out = self.evaluate(p, &mut Lookup::Solve(p), &mut |_, _| {})?;
            for fresh in before..self.table.patterns.len() {
                if queued.insert(fresh) {
                    queue.push_back(fresh);
                }
            }
            let grown = self.table.outputs[p].join(&out)?;
            if grown != self.table.outputs[p] {
                if self.opts.trace {
                    self.trace.push((p, grown.clone()));
                }
                self.table.outputs[p] = grown;
                for &c in &self.table.callers[p] {
                    if queued.insert(c) {
                        queue.push_back(c);
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-evaluates every pattern reachable from the goal against the
    /// final table, joining program-point descriptions.
    /// Returns the joined points and the reachable pattern indices.
    fn collect(&mut self, root: usize) -> Result<(Points<M>, Vec<usize>), EngineError> {
        let mut points: Points<M> = BTreeMap::new();
        let mut seen = BTreeSet::from([root]);
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            let mut reached = BTreeSet::new();
            let mut failed = None;
            self.evaluate(p, &mut Lookup::Collect(&mut reached), &mut |pt, abs| {
                let joined = match points.get(&pt) {
                    Some(prev) => match prev.join(abs) {
                        Ok(j) => j,
                        Err(e) => {
                            failed = Some(e);
                            return;
                        }
                    },
                    None => abs.clone(),
                };
                points.insert(pt, joined);
            })?;
            if let Some(e) = failed {
                return Err(e.into());
            }
            for q in reached {
                if seen.insert(q) {
                    stack.push(q);
                }
            }
        }
        Ok((points, seen.into_iter().collect()))
    }

    /// One pass over the clauses of pattern `p`. Returns the join of the
    /// clause contributions and reports each program point to `visit`.
    fn evaluate(
        &mut self,
        p: usize,
        lookup: &mut Lookup<'_>,
        visit: &mut dyn FnMut(ProgramPoint, &Abs<M>),
    ) -> Result<Abs<M>, EngineError> {
        let pattern = self.table.patterns[p].clone();
        let mut out = Abs::bottom(pattern.entry.scope());
        let program = self.program;
        for clause in program.clauses_for(&pattern.key()) {
            if let Some(contrib) = self.clause(&pattern, clause, lookup, visit)? {
                out = out.join(&contrib)?;
            }
        }
        Ok(out)
    }

    fn clause(
        &mut self,
        pattern: &CallPattern<M>,
        clause: &Clause,
        lookup: &mut Lookup<'_>,
        visit: &mut dyn FnMut(ProgramPoint, &Abs<M>),
    ) -> Result<Option<Abs<M>>, EngineError> {
        // Clauses whose head cannot match the call contribute nothing.
        if mgu_atoms(&self.renamer.rename(&pattern.atom), &clause.head).is_none() {
            return Ok(None);
        }
        let scope = clause.vars();
        let mut cur = aunify(&pattern.atom, &pattern.entry, &clause.head, &Abs::top(scope.iter()), &mut self.renamer)?;
        visit((clause.id, 0), &cur);
        for (k, lit) in clause.body.iter().enumerate() {
            cur = match lit {
                Literal::Builtin(kind, args) => builtin_transfer(*kind, args, &cur, self.opts.comparisons)?,
                Literal::Call(call) => {
                    let callee = CallPattern::of(call, &cur);
                    let q = match lookup {
                        Lookup::Solve(caller) => {
                            let q = self.table.intern(callee);
                            self.table.callers[q].insert(*caller);
                            q
                        }
                        Lookup::Collect(reached) => {
                            let q = *self.table.index.get(&callee).expect("fixpoint covers every reachable call");
                            reached.insert(q);
                            q
                        }
                    };
                    let callee = &self.table.patterns[q];
                    aunify(&callee.atom.clone(), &self.table.outputs[q].clone(), call, &cur, &mut self.renamer)?
                }
            };
            visit((clause.id, k + 1), &cur);
        }
        Ok(Some(aunify(&clause.head, &cur, &pattern.atom, &pattern.entry, &mut self.renamer)?))
    }
}
