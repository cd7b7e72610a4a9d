//! Text rendering. Everything printed here parses back to the same structure.

use std::fmt;

use super::term::{Atom, BuiltinKind, Clause, Directive, Literal, ParamOrMode, Program, Term, CONS, NIL};

/// Precedence of the arithmetic infix functors; lower binds tighter.
pub(crate) fn infix_precedence(functor: &str) -> Option<u32> {
    match functor {
        "*" | "/" => Some(400),
        "+" | "-" => Some(500),
        _ => None,
    }
}

fn needs_quotes(name: &str) -> bool {
    if name == NIL {
        return false;
    }
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_digit()) {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => !chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => true,
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if needs_quotes(name) {
        f.write_str("'")?;
        for c in name.chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("'")
    } else {
        f.write_str(name)
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, parent: u32, right: bool) -> fmt::Result {
    let wrap = match t {
        Term::Compound(name, args) if args.len() == 2 => match infix_precedence(name) {
            Some(p) => p > parent || (right && p == parent),
            None => false,
        },
        _ => false,
    };
    if wrap {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v.name()),
            Term::Compound(name, args) if &**name == CONS && args.len() == 2 => {
                f.write_str("[")?;
                write!(f, "{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::Compound(n, a) if &**n == CONS && a.len() == 2 => {
                            write!(f, ",{}", a[0])?;
                            tail = &a[1];
                        }
                        Term::Compound(n, a) if &**n == NIL && a.is_empty() => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::Compound(name, args) if args.len() == 2 && infix_precedence(name).is_some() => {
                let p = infix_precedence(name).unwrap_or_default();
                write_operand(f, &args[0], p, false)?;
                f.write_str(name)?;
                write_operand(f, &args[1], p, true)
            }
            Term::Compound(name, args) => {
                write_name(f, name)?;
                if args.is_empty() {
                    Ok(())
                } else {
                    write_args(f, args)
                }
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.pred)?;
        if self.args.is_empty() {
            Ok(())
        } else {
            write_args(f, &self.args)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Call(a) => write!(f, "{a}"),
            Literal::Builtin(kind @ (BuiltinKind::True | BuiltinKind::Fail), _) => f.write_str(kind.symbol()),
            Literal::Builtin(kind, args) => write!(f, "{} {} {}", args[0], kind.symbol(), args[1]),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for ParamOrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamOrMode::Param(p) => f.write_str(p),
            ParamOrMode::Ground => f.write_str("g"),
            ParamOrMode::Unknown => f.write_str("u"),
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":- analyze({}, [", self.goal)?;
        for (i, (v, b)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} = {b}")?;
        }
        f.write_str("]).")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.directive)?;
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
