//! Bounded concrete execution of tiny programs, for checking that the
//! engine's annotations describe every reachable concrete state.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::{analyze, mono_entry, AnalysisResult, Options, ProgramPoint};
use crate::mono::{gamma_member, Mode};
use crate::syntax::{Atom, BuiltinKind, Clause, Directive, Literal, ParamOrMode, Program, Term, Var};
use crate::unify::{compose, mgu, mgu_atoms, Rename, Renamer, Renaming, Substitution};

use super::random::term;
use super::universe::{enumerate_subs, Universe};
use super::OracleError;

/// Limits on a concrete run.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    /// Deepest call nesting explored.
    pub depth: usize,
    /// Most answers kept per call or per body position.
    pub answers: usize,
    /// Most program-point visits per run. Cutting a run short loses
    /// coverage but every state recorded is still reachable.
    pub visits: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { depth: 5, answers: 32, visits: 4000 }
    }
}

/// A concrete state seen at a program point: the run's substitution and
/// the renaming applied to that clause activation.
struct Visit {
    point: ProgramPoint,
    clause: usize,
    subst: Substitution,
    renaming: Renaming,
}

struct Interp<'a> {
    program: &'a Program,
    renamer: Renamer,
    bounds: Bounds,
    visits: Vec<Visit>,
}

impl Interp<'_> {
    fn solve(&mut self, call: &Atom, s: &Substitution, depth: usize) -> Vec<Substitution> {
        if depth > self.bounds.depth || self.visits.len() >= self.bounds.visits {
            return Vec::new();
        }
        let mut answers = Vec::new();
        let program = self.program;
        for clause in program.clauses_for(&call.key()) {
            let psi = self.renamer.fresh();
            let head = clause.head.rename(&psi);
            let Some(s1) = compose(mgu_atoms(&s.apply_atom(call), &head).as_ref(), Some(s)) else {
                continue;
            };
            self.visit(clause, 0, &s1, psi);
            let mut states = vec![s1];
            for (k, lit) in clause.body.iter().enumerate() {
                let mut next = Vec::new();
                for st in &states {
                    match lit {
                        Literal::Call(b) => next.extend(self.solve(&b.rename(&psi), st, depth + 1)),
                        Literal::Builtin(BuiltinKind::Unify, args) => {
                            let (l, r) = (st.apply(&args[0].rename(&psi)), st.apply(&args[1].rename(&psi)));
                            next.extend(compose(mgu(&l, &r).as_ref(), Some(st)));
                        }
                        Literal::Builtin(BuiltinKind::True, _) => next.push(st.clone()),
                        Literal::Builtin(BuiltinKind::Fail, _) => {}
                        Literal::Builtin(other, _) => unreachable!("{} is not generated", other.symbol()),
                    }
                }
                next.truncate(self.bounds.answers);
                for st in &next {
                    self.visit(clause, k + 1, st, psi);
                }
                states = next;
            }
            answers.extend(states);
            if answers.len() >= self.bounds.answers {
                answers.truncate(self.bounds.answers);
                break;
            }
        }
        answers
    }

    fn visit(&mut self, clause: &Clause, k: usize, s: &Substitution, renaming: Renaming) {
        self.visits.push(Visit { point: (clause.id, k), clause: clause.id, subst: s.clone(), renaming });
    }
}

/// A random program of up to three clauses over `p` and `q`, with bodies of
/// up to two literals drawn from calls, `=`, `true` and `fail`. The goal
/// is `p` applied to fresh variables with random modes.
pub fn random_program(rng: &mut impl Rng) -> Program {
    let arity = |rng: &mut dyn rand::RngCore| rng.gen_range(1..=2usize);
    let p_arity = arity(rng);
    let q_arity = arity(rng);
    let n = rng.gen_range(1..=3);
    let preds: Vec<&str> = (0..n).map(|i| if i == 0 || rng.gen_bool(0.5) { "p" } else { "q" }).collect();
    let defined: Vec<(&str, usize)> =
        [("p", p_arity), ("q", q_arity)].into_iter().filter(|(name, _)| preds.contains(name)).collect();
    let pool: Vec<Var> = ["X", "Y", "Z"].iter().map(Var::new).collect();
    let clauses = preds
        .iter()
        .enumerate()
        .map(|(id, &pred)| {
            let k = rng.gen_range(1..=3);
            let vars = &pool[..k];
            let n_args = if pred == "p" { p_arity } else { q_arity };
            let head = Atom::new(pred, (0..n_args).map(|_| term(rng, vars, 2)).collect());
            let body = (0..rng.gen_range(0..=2))
                .map(|_| match rng.gen_range(0..10) {
                    0..=4 => {
                        let (name, m) = *defined.choose(rng).expect("p is defined");
                        Literal::Call(Atom::new(name, (0..m).map(|_| term(rng, vars, 2)).collect()))
                    }
                    5..=7 => Literal::Builtin(BuiltinKind::Unify, vec![term(rng, vars, 2), term(rng, vars, 2)]),
                    8 => Literal::Builtin(BuiltinKind::True, vec![]),
                    _ => Literal::Builtin(BuiltinKind::Fail, vec![]),
                })
                .collect();
            Clause { id, head, body }
        })
        .collect();
    let goal_vars: Vec<Var> = (1..=p_arity).map(|i| Var::new(format!("G{i}"))).collect();
    let goal = Atom::new("p", goal_vars.iter().map(|v| Term::Var(v.clone())).collect());
    let bindings = goal_vars
        .into_iter()
        .map(|v| (v, if rng.gen_bool(0.5) { ParamOrMode::Ground } else { ParamOrMode::Unknown }))
        .collect();
    Program { clauses, directive: Directive { goal, bindings } }
}

/// Runs every described goal instance concretely and reports the first
/// state that the analysis fails to describe.
pub fn check_engine_soundness(program: &Program, u: &Universe, bounds: Bounds) -> Result<Option<String>, OracleError> {
    let d = &program.directive;
    let input = mono_entry(d, None)?;
    let result = analyze(program, &d.goal, &input, &Options::default())?;
    let goal_vars: Vec<Var> = d.goal.vars().into_iter().collect();
    let starts = enumerate_subs(&goal_vars, u)?.filter(|s| gamma_member(s, &input));
    for start in &starts.subs {
        let mut interp = Interp { program, renamer: Renamer::new(), bounds, visits: Vec::new() };
        let answers = interp.solve(&d.goal, start, 0);
        for v in &interp.visits {
            if let Some(msg) = undescribed(&result, program, v) {
                return Ok(Some(format!("goal instance {start}: {msg}")));
            }
        }
        for ans in &answers {
            for (var, m) in result.goal_output.iter() {
                if *m == Mode::G && !ans.apply(&Term::Var(var.clone())).is_ground() {
                    return Ok(Some(format!("goal instance {start}: answer {ans} leaves {var} non-ground")));
                }
            }
        }
    }
    Ok(None)
}

fn undescribed(result: &AnalysisResult<Mode>, program: &Program, v: &Visit) -> Option<String> {
    let clause = &program.clauses[v.clause];
    let Some(abs) = result.points.get(&v.point) else {
        return Some(format!("clause {} point {} reached but not annotated", v.point.0, v.point.1));
    };
    for (var, m) in abs.iter() {
        let t = v.subst.apply(&Term::Var(v.renaming.var(var)));
        if *m == Mode::G && !t.is_ground() {
            return Some(format!("in `{clause}` at point {}, {var} is {t} but described as ground", v.point.1));
        }
    }
    None
}
