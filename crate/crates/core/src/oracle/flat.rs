//! A second unification path used for exhaustive sweeps.
//!
//! Both atoms are instantiated by tuples of universe term ids and unified
//! in place. The only variables left after instantiation are pool
//! variables, two sides' worth, so bindings fit in a small fixed array and
//! a sweep over millions of pairs never allocates.

use std::collections::HashMap;

use crate::syntax::{Atom, Term, Var};

use super::universe::Universe;

#[derive(Clone, Debug)]
enum Node {
    /// A scope variable of the atom on this side, by position.
    Slot(u8),
    /// A pool variable.
    Pool(u8),
    App(u16, Box<[u32]>),
}

/// Reference to a node: pattern or universe arena, and which side's
/// instantiation and pool it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum R {
    Pat(u32, u8),
    Uni(u32, u8),
}

/// Bindings for the pool variables of both sides.
pub struct Scratch {
    bind: Vec<Option<R>>,
    stack: Vec<(R, R)>,
}

/// Two atoms ready to be unified under many instantiations.
pub struct FlatPair {
    uni: Vec<Node>,
    pat: Vec<Node>,
    args: [Vec<u32>; 2],
    scopes: [Vec<Var>; 2],
    pool: usize,
    /// Functor names by id, for reading terms back.
    functors: Vec<String>,
}

struct Interner {
    ids: HashMap<(String, usize), u16>,
    names: Vec<String>,
}

impl Interner {
    fn id(&mut self, f: &str, n: usize) -> u16 {
        if let Some(&i) = self.ids.get(&(f.to_string(), n)) {
            return i;
        }
        let i = self.names.len() as u16;
        self.ids.insert((f.to_string(), n), i);
        self.names.push(f.to_string());
        i
    }
}

fn pattern(t: &Term, scope: &[Var], pat: &mut Vec<Node>, fs: &mut Interner) -> u32 {
    let node = match t {
        Term::Var(v) => Node::Slot(scope.iter().position(|w| w == v).expect("scope covers the atom") as u8),
        Term::Compound(f, args) => {
            let kids: Vec<u32> = args.iter().map(|a| pattern(a, scope, pat, fs)).collect();
            Node::App(fs.id(f, args.len()), kids.into())
        }
    };
    pat.push(node);
    (pat.len() - 1) as u32
}

impl FlatPair {
    /// `None` when the atoms can never unify (different predicates).
    /// Scopes list each atom's variables; instantiation tuples follow
    /// their order.
    pub fn new(u: &Universe, a: &Atom, a_scope: &[Var], b: &Atom, b_scope: &[Var]) -> Option<Self> {
        if a.pred != b.pred || a.args.len() != b.args.len() {
            return None;
        }
        let mut fs = Interner { ids: HashMap::new(), names: Vec::new() };
        let uni = u
            .terms()
            .iter()
            .map(|t| match t {
                Term::Var(v) => Node::Pool(v.name()[1..].parse::<u8>().expect("pool variable") - 1),
                Term::Compound(f, args) => Node::App(
                    fs.id(f, args.len()),
                    args.iter().map(|x| u.id(x).expect("universe is subterm-closed")).collect(),
                ),
            })
            .collect();
        let mut pat = Vec::new();
        let a_args = a.args.iter().map(|t| pattern(t, a_scope, &mut pat, &mut fs)).collect();
        let b_args = b.args.iter().map(|t| pattern(t, b_scope, &mut pat, &mut fs)).collect();
        Some(FlatPair {
            uni,
            pat,
            args: [a_args, b_args],
            scopes: [a_scope.to_vec(), b_scope.to_vec()],
            pool: u.pool(),
            functors: fs.names,
        })
    }

    pub fn scratch(&self) -> Scratch {
        Scratch { bind: vec![None; 2 * self.pool], stack: Vec::new() }
    }

    fn deref(&self, mut r: R, th: [&[u32]; 2], s: &Scratch) -> R {
        loop {
            match r {
                R::Pat(i, side) => match self.pat[i as usize] {
                    Node::Slot(k) => r = R::Uni(th[side as usize][k as usize], side),
                    _ => return r,
                },
                R::Uni(i, side) => match self.uni[i as usize] {
                    Node::Pool(p) => match s.bind[side as usize * self.pool + p as usize] {
                        Some(t) => r = t,
                        None => return r,
                    },
                    _ => return r,
                },
            }
        }
    }

    /// Functor and children of a dereferenced non-variable node, or the
    /// binding slot of an unbound pool variable.
    fn view(&self, r: R) -> Result<(u16, &[u32], R), usize> {
        match r {
            R::Pat(i, _) => match &self.pat[i as usize] {
                Node::App(f, kids) => Ok((*f, kids, r)),
                _ => unreachable!("dereferenced"),
            },
            R::Uni(i, side) => match &self.uni[i as usize] {
                Node::App(f, kids) => Ok((*f, kids, r)),
                Node::Pool(p) => Err(side as usize * self.pool + *p as usize),
                Node::Slot(_) => unreachable!("universe terms have no slots"),
            },
        }
    }

    fn child(parent: R, id: u32) -> R {
        match parent {
            R::Pat(_, side) => R::Pat(id, side),
            R::Uni(_, side) => R::Uni(id, side),
        }
    }

    fn occurs(&self, slot: usize, r: R, th: [&[u32]; 2], s: &Scratch) -> bool {
        let r = self.deref(r, th, s);
        match self.view(r) {
            Err(other) => other == slot,
            Ok((_, kids, parent)) => kids.iter().any(|&k| self.occurs(slot, Self::child(parent, k), th, s)),
        }
    }

    /// Unifies the two atoms instantiated by `th1` and `th2`, leaving the
    /// unifier in `s`.
    pub fn unify(&self, th1: &[u32], th2: &[u32], s: &mut Scratch) -> bool {
        let th = [th1, th2];
        s.bind.iter_mut().for_each(|b| *b = None);
        s.stack.clear();
        for (&x, &y) in self.args[0].iter().zip(self.args[1].iter()) {
            s.stack.push((R::Pat(x, 0), R::Pat(y, 1)));
        }
        while let Some((x, y)) = s.stack.pop() {
            let x = self.deref(x, th, s);
            let y = self.deref(y, th, s);
            if x == y {
                continue;
            }
            match (self.view(x), self.view(y)) {
                (Err(a), Err(b)) if a == b => {}
                (Err(a), _) => {
                    if self.occurs(a, y, th, s) {
                        return false;
                    }
                    s.bind[a] = Some(y);
                }
                (_, Err(b)) => {
                    if self.occurs(b, x, th, s) {
                        return false;
                    }
                    s.bind[b] = Some(x);
                }
                (Ok((f, xs, px)), Ok((g, ys, py))) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    for (&a, &b) in xs.iter().zip(ys.iter()) {
                        s.stack.push((Self::child(px, a), Self::child(py, b)));
                    }
                }
            }
        }
        true
    }

    fn ground(&self, r: R, th: [&[u32]; 2], s: &Scratch) -> bool {
        let r = self.deref(r, th, s);
        match self.view(r) {
            Err(_) => false,
            Ok((_, kids, parent)) => kids.iter().all(|&k| self.ground(Self::child(parent, k), th, s)),
        }
    }

    /// After a successful `unify`, whether the `k`-th variable of the second
    /// atom is bound to a ground term.
    pub fn second_ground(&self, k: usize, th1: &[u32], th2: &[u32], s: &Scratch) -> bool {
        self.ground(R::Uni(th2[k], 1), [th1, th2], s)
    }

    fn read(&self, r: R, th: [&[u32]; 2], s: &Scratch) -> Term {
        let r = self.deref(r, th, s);
        match self.view(r) {
            Err(slot) => Term::var(format!("_S{}", slot)),
            Ok((f, kids, parent)) => Term::compound(
                &self.functors[f as usize],
                kids.iter().map(|&k| self.read(Self::child(parent, k), th, s)).collect(),
            ),
        }
    }

    /// After a successful `unify`, the terms bound to the second atom's
    /// variables, in scope order. Unbound pool variables read as `_S<n>`.
    pub fn second_terms(&self, th1: &[u32], th2: &[u32], s: &Scratch) -> Vec<Term> {
        (0..self.scopes[1].len()).map(|k| self.read(R::Uni(th2[k], 1), [th1, th2], s)).collect()
    }
}
