//! The analyzed Prolog subset: terms, clauses, the analysis directive,
//! a parser and a printer.

mod parser;
mod render;
mod term;

pub use parser::{parse_atom, parse_clause, parse_program, parse_term, ParseError};
pub use term::{Atom, BuiltinKind, Clause, Directive, Literal, ParamOrMode, PredKey, Program, Term, Var, CONS, NIL};
