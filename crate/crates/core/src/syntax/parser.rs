use std::collections::HashSet;

use thiserror::Error;

use super::render::infix_precedence;
use super::term::{Atom, BuiltinKind, Clause, Directive, Literal, ParamOrMode, Program, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("directive error: {0}")]
    Directive(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Name(String),
    Punct(&'static str),
    /// Clause terminator.
    End,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// `(` follows with no whitespace in between.
    paren_follows: bool,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line, column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.bump() else {
                out.push(Token { tok: Tok::Eof, line, column, paren_follows: false });
                return Ok(out);
            };
            let tok = if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(self.word(c))
            } else if c.is_ascii_lowercase() {
                Tok::Name(self.word(c))
            } else if c.is_ascii_digit() {
                let mut s = c.to_string();
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Name(s)
            } else if c == '\'' {
                Tok::Name(self.quoted(line, column)?)
            } else {
                match c {
                    '(' => Tok::Punct("("),
                    ')' => Tok::Punct(")"),
                    '[' => Tok::Punct("["),
                    ']' => Tok::Punct("]"),
                    '|' => Tok::Punct("|"),
                    ',' => Tok::Punct(","),
                    c if SYMBOL_CHARS.contains(c) => {
                        let mut s = c.to_string();
                        while let Some(&d) = self.chars.peek() {
                            if SYMBOL_CHARS.contains(d) {
                                s.push(d);
                                self.bump();
                            } else {
                                break;
                            }
                        }
                        let at_end = self.chars.peek().is_none_or(|d| d.is_whitespace() || *d == '%');
                        if s == "." && at_end {
                            Tok::End
                        } else {
                            match s.as_str() {
                                ":-" => Tok::Punct(":-"),
                                "=" => Tok::Punct("="),
                                "<" => Tok::Punct("<"),
                                ">" => Tok::Punct(">"),
                                "=<" => Tok::Punct("=<"),
                                ">=" => Tok::Punct(">="),
                                "=:=" => Tok::Punct("=:="),
                                "=\\=" => Tok::Punct("=\\="),
                                "+" => Tok::Punct("+"),
                                "-" => Tok::Punct("-"),
                                "*" => Tok::Punct("*"),
                                "/" => Tok::Punct("/"),
                                other => return Err(self.err(line, column, format!("unsupported operator `{other}`"))),
                            }
                        }
                    }
                    other => return Err(self.err(line, column, format!("unexpected character `{other}`"))),
                }
            };
            let paren_follows = self.chars.peek() == Some(&'(');
            out.push(Token { tok, line, column, paren_follows });
        }
    }

    fn word(&mut self, first: char) -> String {
        let mut s = first.to_string();
        while let Some(&d) = self.chars.peek() {
            if d.is_ascii_alphanumeric() || d == '_' {
                s.push(d);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn quoted(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, column, "unterminated quoted atom")),
                Some('\'') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some(c @ ('\'' | '\\')) => s.push(c),
                    _ => return Err(self.err(line, column, "bad escape in quoted atom")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

/// Placeholder prefix for `_` before fresh names are assigned per clause.
const ANON: &str = "\u{0}anon";

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: t.line, column: t.column, message: message.into() }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Punct(q) if *q == p => Ok(()),
            other => Err(self.err_at(&t, format!("expected `{p}`, found {}", describe(other)))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::End => Ok(()),
            other => Err(self.err_at(&t, format!("expected `.`, found {}", describe(other)))),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.expr(500)
    }

    /// Arithmetic expressions, left-associative, precedence climbing.
    fn expr(&mut self, max: u32) -> Result<Term, ParseError> {
        let mut lhs = self.primary()?;
        while let Tok::Punct(op @ ("+" | "-" | "*" | "/")) = self.peek().tok {
            let prec = infix_precedence(op).unwrap_or(u32::MAX);
            if prec > max {
                break;
            }
            self.next();
            // Right operand binds strictly tighter for left associativity.
            let rhs = self.expr(prec - 1)?;
            lhs = Term::compound(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let t = self.next();
        match t.tok.clone() {
            Tok::Var(name) => {
                if name == "_" {
                    self.anon += 1;
                    Ok(Term::var(format!("{ANON}{}", self.anon)))
                } else {
                    Ok(Term::var(name))
                }
            }
            Tok::Name(name) => {
                if t.paren_follows {
                    self.next();
                    let args = self.args()?;
                    Ok(Term::compound(name, args))
                } else {
                    Ok(Term::constant(name))
                }
            }
            Tok::Punct("[") => self.list(),
            Tok::Punct("(") => {
                let inner = self.term()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            other => Err(self.err_at(&t, format!("expected a term, found {}", describe(&other)))),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while self.is_punct(",") {
            self.next();
            args.push(self.term()?);
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn list(&mut self) -> Result<Term, ParseError> {
        if self.is_punct("]") {
            self.next();
            return Ok(Term::nil());
        }
        let mut items = vec![self.term()?];
        while self.is_punct(",") {
            self.next();
            items.push(self.term()?);
        }
        let tail = if self.is_punct("|") {
            self.next();
            Some(self.term()?)
        } else {
            None
        };
        self.expect_punct("]")?;
        Ok(Term::list(items, tail))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.peek().clone();
        match self.term()? {
            Term::Compound(name, args) if infix_precedence(&name).is_none() || args.len() != 2 => {
                if name.starts_with(|c: char| c.is_ascii_digit())
                    || &*name == super::term::NIL
                    || &*name == super::term::CONS
                {
                    Err(self.err_at(&start, format!("`{name}` cannot be used as a predicate")))
                } else {
                    Ok(Atom { pred: name, args })
                }
            }
            other => Err(self.err_at(&start, format!("expected an atom, found `{other}`"))),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.peek().clone();
        let lhs = self.term()?;
        let op = match &self.peek().tok {
            Tok::Punct(p) => BuiltinKind::from_infix(p),
            Tok::Name(n) if n == "is" => Some(BuiltinKind::Is),
            _ => None,
        };
        if let Some(kind) = op {
            self.next();
            let rhs = self.term()?;
            return Ok(Literal::Builtin(kind, vec![lhs, rhs]));
        }
        match lhs {
            Term::Compound(name, args) if args.is_empty() && &*name == "true" => {
                Ok(Literal::Builtin(BuiltinKind::True, vec![]))
            }
            Term::Compound(name, args) if args.is_empty() && &*name == "fail" => {
                Ok(Literal::Builtin(BuiltinKind::Fail, vec![]))
            }
            Term::Compound(name, args) if &*name == "is" && args.len() == 2 => {
                Ok(Literal::Builtin(BuiltinKind::Is, args))
            }
            Term::Compound(name, args)
                if !(args.len() == 2 && infix_precedence(&name).is_some())
                    && name.starts_with(|c: char| c.is_ascii_lowercase() || !c.is_ascii()) =>
            {
                Ok(Literal::Call(Atom { pred: name, args }))
            }
            other => Err(self.err_at(&start, format!("`{other}` is not a callable goal"))),
        }
    }

    fn clause(&mut self, id: usize) -> Result<Clause, ParseError> {
        self.anon = 0;
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.is_punct(":-") {
            self.next();
            body.push(self.literal()?);
            while self.is_punct(",") {
                self.next();
                body.push(self.literal()?);
            }
        }
        self.expect_end()?;
        let mut clause = Clause { id, head, body };
        name_anonymous(&mut clause);
        Ok(clause)
    }

    fn directive(&mut self) -> Result<Directive, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Name(n) if n == "analyze" => {}
            other => {
                return Err(ParseError::Directive(format!(
                    "only `:- analyze(Goal, Bindings).` is supported, found {} at {}:{}",
                    describe(other),
                    t.line,
                    t.column
                )))
            }
        }
        self.expect_punct("(")?;
        self.anon = 0;
        let goal = self.atom()?;
        self.expect_punct(",")?;
        self.expect_punct("[")?;
        let mut bindings = Vec::new();
        if !self.is_punct("]") {
            loop {
                let vt = self.next();
                let Tok::Var(v) = vt.tok.clone() else {
                    return Err(self.err_at(&vt, "expected a goal variable in a binding"));
                };
                self.expect_punct("=")?;
                let pt = self.next();
                let value = match &pt.tok {
                    Tok::Name(n) if n == "g" => ParamOrMode::Ground,
                    Tok::Name(n) if n == "u" => ParamOrMode::Unknown,
                    Tok::Name(n) if n.starts_with(|c: char| c.is_ascii_lowercase()) => ParamOrMode::Param(n.clone()),
                    other => {
                        return Err(
                            self.err_at(&pt, format!("expected a parameter name or g/u, found {}", describe(other)))
                        )
                    }
                };
                bindings.push((Var::new(v), value));
                if self.is_punct(",") {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_punct("]")?;
        self.expect_punct(")")?;
        self.expect_end()?;
        if goal.vars().iter().any(|v| v.name().starts_with(ANON)) {
            return Err(ParseError::Directive("the goal may not contain anonymous variables".into()));
        }
        let goal_vars = goal.vars();
        let mut seen = HashSet::new();
        for (v, _) in &bindings {
            if !goal_vars.contains(v) {
                return Err(ParseError::Directive(format!("`{v}` is bound but does not occur in the goal {goal}")));
            }
            if !seen.insert(v.clone()) {
                return Err(ParseError::Directive(format!("`{v}` is bound more than once")));
            }
        }
        if let Some(missing) = goal_vars.iter().find(|v| !seen.contains(*v)) {
            return Err(ParseError::Directive(format!("goal variable `{missing}` has no binding")));
        }
        Ok(Directive { goal, bindings })
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut clauses = Vec::new();
        let mut directive = None;
        loop {
            if matches!(self.peek().tok, Tok::Eof) {
                break;
            }
            if self.is_punct(":-") {
                self.next();
                let d = self.directive()?;
                if directive.replace(d).is_some() {
                    return Err(ParseError::Directive("more than one analyze directive".into()));
                }
            } else {
                let id = clauses.len();
                clauses.push(self.clause(id)?);
            }
        }
        let directive =
            directive.ok_or_else(|| ParseError::Directive("missing `:- analyze(Goal, Bindings).`".into()))?;
        Ok(Program { clauses, directive })
    }
}

fn name_anonymous(clause: &mut Clause) {
    let used: HashSet<String> = clause.vars().iter().map(|v| v.name().to_string()).collect();
    if !used.iter().any(|n| n.starts_with(ANON)) {
        return;
    }
    let mut fresh = 0usize;
    let mut rename = std::collections::HashMap::new();
    for v in clause.vars() {
        if v.name().starts_with(ANON) {
            let name = loop {
                fresh += 1;
                let candidate = format!("_{fresh}");
                if !used.contains(&candidate) {
                    break candidate;
                }
            };
            rename.insert(v, Term::var(name));
        }
    }
    let fix = |t: &Term| replace_vars(t, &rename);
    clause.head = clause.head.map_args(fix);
    for lit in &mut clause.body {
        match lit {
            Literal::Call(a) => *a = a.map_args(fix),
            Literal::Builtin(_, args) => args.iter_mut().for_each(|t| *t = fix(t)),
        }
    }
}

fn replace_vars(t: &Term, map: &std::collections::HashMap<Var, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| replace_vars(a, map)).collect()),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::End => "end of clause".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser { toks: Lexer::new(text).tokens()?, pos: 0, anon: 0 })
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parser(text)?.program()
}

fn finish<T>(mut p: Parser, value: T) -> Result<T, ParseError> {
    let t = p.next();
    match t.tok.clone() {
        Tok::Eof => Ok(value),
        other => Err(p.err_at(&t, format!("trailing input: {}", describe(&other)))),
    }
}

/// Parses a single term such as `f(X,[a|T])`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = parser(text)?;
    let t = p.term()?;
    finish(p, t)
}

/// Parses a single atom such as `append(L1,L2,L3)`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = parser(text)?;
    let a = p.atom()?;
    finish(p, a)
}

/// Parses one clause, terminated by `.`.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = parser(text)?;
    let c = p.clause(0)?;
    finish(p, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clause_with_directive() {
        let p = parse_program("p(X). :- analyze(p(X),[X=alpha]).").unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.directive.goal, Atom::new("p", vec![Term::var("X")]));
        assert_eq!(p.directive.bindings, vec![(Var::new("X"), ParamOrMode::Param("alpha".into()))]);
    }

    #[test]
    fn fact_has_empty_body() {
        let c = parse_clause("append([],L,L).").unwrap();
        assert!(c.body.is_empty());
        assert_eq!(c.head.args[0], Term::nil());
    }

    #[test]
    fn missing_operand_is_a_syntax_error() {
        let err = parse_program("p(X) :- X < .\n:- analyze(p(X),[X=g]).").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_program("p(a).\nq(X) :- p(X) p(X).\n").unwrap_err();
        match err {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 14)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn directive_errors() {
        let missing = parse_program("p(a).").unwrap_err();
        assert!(matches!(missing, ParseError::Directive(_)));
        let twice = parse_program("p(a). :- analyze(p(X),[X=g]). :- analyze(p(X),[X=u]).").unwrap_err();
        assert!(matches!(twice, ParseError::Directive(_)));
        let stray = parse_program("p(a). :- analyze(p(X),[Y=g]).").unwrap_err();
        assert!(matches!(stray, ParseError::Directive(_)));
        let unbound = parse_program("p(a,b). :- analyze(p(X,Y),[X=g]).").unwrap_err();
        assert!(matches!(unbound, ParseError::Directive(_)));
        let dup = parse_program("p(a). :- analyze(p(X),[X=g, X=u]).").unwrap_err();
        assert!(matches!(dup, ParseError::Directive(_)));
    }

    #[test]
    fn unsupported_control_is_rejected() {
        for src in ["p :- !.", "p :- \\+ q.", "p :- (q ; r).", "p :- q -> r."] {
            let text = format!("{src}\n:- analyze(p,[]).");
            assert!(parse_program(&text).is_err(), "{src}");
        }
    }

    #[test]
    fn anonymous_variables_get_fresh_names() {
        let c = parse_clause("p(_, _, _1) :- q(_).").unwrap();
        let names: Vec<String> = c.vars().iter().map(|v| v.name().to_string()).collect();
        assert_eq!(names, vec!["_2", "_3", "_1", "_4"]);
    }

    #[test]
    fn builtins_parse_infix() {
        let c = parse_clause("p(K,K1,N) :- K < K1, K1 =< N, N is K+1, X = f(Y), true, fail.").unwrap();
        let kinds: Vec<_> = c
            .body
            .iter()
            .map(|l| match l {
                Literal::Builtin(k, _) => *k,
                Literal::Call(_) => panic!("unexpected call"),
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                BuiltinKind::Lt,
                BuiltinKind::Le,
                BuiltinKind::Is,
                BuiltinKind::Unify,
                BuiltinKind::True,
                BuiltinKind::Fail
            ]
        );
    }

    #[test]
    fn append_clause_round_trips() {
        let c = parse_clause("append([H|L1],L2,[H|L3]) :- append(L1,L2,L3).").unwrap();
        assert_eq!(c.to_string(), "append([H|L1],L2,[H|L3]) :- append(L1,L2,L3).");
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_program("% header\np(a). % trailing\n:- analyze(p(X), [X = u]).\n").unwrap();
        assert_eq!(p.clauses.len(), 1);
    }

    #[test]
    fn space_before_paren_is_not_application() {
        assert!(parse_term("f (a)").is_err());
        assert_eq!(parse_term("f(a)").unwrap(), Term::compound("f", vec![Term::constant("a")]));
    }
}
