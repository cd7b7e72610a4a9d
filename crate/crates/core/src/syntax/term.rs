use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

/// A logic variable. Names are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(name: &str) -> Self {
        Var::new(name)
    }
}

/// Name of the list constructor `'.'/2`.
pub const CONS: &str = ".";
/// Name of the empty list constant.
pub const NIL: &str = "[]";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// A constant is a compound with no arguments.
    Compound(Arc<str>, Vec<Term>),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Term {
        Term::Compound(Arc::from(name.as_ref()), Vec::new())
    }

    pub fn compound(functor: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::Compound(Arc::from(functor.as_ref()), args)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(CONS, vec![head, tail])
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    /// Builds a proper list, or a partial list ending in `tail`.
    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        items.into_iter().rev().fold(tail.unwrap_or_else(Term::nil), |acc, item| Term::cons(item, acc))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Compound(..) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Nesting depth: variables and constants have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// Appends variables in first-occurrence order.
    pub fn collect_vars(&self, out: &mut IndexSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> IndexSet<Var> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl AsRef<str>, args: Vec<Term>) -> Self {
        Atom { pred: Arc::from(pred.as_ref()), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    pub fn vars(&self) -> IndexSet<Var> {
        let mut out = IndexSet::new();
        for a in &self.args {
            a.collect_vars(&mut out);
        }
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    pub fn to_term(&self) -> Term {
        Term::Compound(self.pred.clone(), self.args.clone())
    }

    pub fn map_args(&self, f: impl FnMut(&Term) -> Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(f).collect() }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `name/arity`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Arc<str>,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Debug for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum BuiltinKind {
    /// `=`
    Unify,
    Lt,
    Gt,
    Le,
    Ge,
    /// `=:=`
    ArithEq,
    /// `=\=`
    ArithNe,
    Is,
    True,
    Fail,
}

impl BuiltinKind {
    pub fn arity(self) -> usize {
        match self {
            BuiltinKind::True | BuiltinKind::Fail => 0,
            _ => 2,
        }
    }

    /// Infix spelling for the binary built-ins.
    pub fn symbol(self) -> &'static str {
        match self {
            BuiltinKind::Unify => "=",
            BuiltinKind::Lt => "<",
            BuiltinKind::Gt => ">",
            BuiltinKind::Le => "=<",
            BuiltinKind::Ge => ">=",
            BuiltinKind::ArithEq => "=:=",
            BuiltinKind::ArithNe => "=\\=",
            BuiltinKind::Is => "is",
            BuiltinKind::True => "true",
            BuiltinKind::Fail => "fail",
        }
    }

    pub fn from_infix(op: &str) -> Option<BuiltinKind> {
        Some(match op {
            "=" => BuiltinKind::Unify,
            "<" => BuiltinKind::Lt,
            ">" => BuiltinKind::Gt,
            "=<" => BuiltinKind::Le,
            ">=" => BuiltinKind::Ge,
            "=:=" => BuiltinKind::ArithEq,
            "=\\=" => BuiltinKind::ArithNe,
            "is" => BuiltinKind::Is,
            _ => return None,
        })
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BuiltinKind::Lt
                | BuiltinKind::Gt
                | BuiltinKind::Le
                | BuiltinKind::Ge
                | BuiltinKind::ArithEq
                | BuiltinKind::ArithNe
        )
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Literal {
    Call(Atom),
    Builtin(BuiltinKind, Vec<Term>),
}

impl Literal {
    pub fn collect_vars(&self, out: &mut IndexSet<Var>) {
        let args = match self {
            Literal::Call(a) => &a.args,
            Literal::Builtin(_, args) => args,
        };
        for t in args {
            t.collect_vars(out);
        }
    }

    pub fn vars(&self) -> IndexSet<Var> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub id: usize,
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Clause {
    /// Variables of head and body in first-occurrence order. Always recomputed.
    pub fn vars(&self) -> IndexSet<Var> {
        let mut out = self.head.vars();
        for lit in &self.body {
            lit.collect_vars(&mut out);
        }
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }
}

/// What a goal variable is bound to by the analysis directive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ParamOrMode {
    Param(String),
    Ground,
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Directive {
    pub goal: Atom,
    /// Goal variable to its description, in the order written.
    pub bindings: Vec<(Var, ParamOrMode)>,
}

impl Directive {
    /// Distinct parameter names in order of first use.
    pub fn param_names(&self) -> Vec<String> {
        let mut seen = IndexSet::new();
        for (_, b) in &self.bindings {
            if let ParamOrMode::Param(p) = b {
                seen.insert(p.clone());
            }
        }
        seen.into_iter().collect()
    }

    pub fn binding(&self, v: &Var) -> Option<&ParamOrMode> {
        self.bindings.iter().find(|(w, _)| w == v).map(|(_, b)| b)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub directive: Directive,
}

impl Program {
    pub fn clauses_for<'a>(&'a self, key: &'a PredKey) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses.iter().filter(move |c| c.head.pred == key.name && c.head.args.len() == key.arity)
    }

    pub fn is_defined(&self, key: &PredKey) -> bool {
        self.clauses_for(key).next().is_some()
    }

    /// Predicates in definition order.
    pub fn predicates(&self) -> Vec<PredKey> {
        let mut seen = IndexSet::new();
        for c in &self.clauses {
            seen.insert(c.head.key());
        }
        seen.into_iter().collect()
    }

    /// Called predicates (including the goal's) that have no clauses.
    pub fn undefined_predicates(&self) -> Vec<PredKey> {
        let mut missing = IndexSet::new();
        let goal = self.directive.goal.key();
        if !self.is_defined(&goal) {
            missing.insert(goal);
        }
        for c in &self.clauses {
            for lit in &c.body {
                if let Literal::Call(a) = lit {
                    let key = a.key();
                    if !self.is_defined(&key) {
                        missing.insert(key);
                    }
                }
            }
        }
        missing.into_iter().collect()
    }
}
