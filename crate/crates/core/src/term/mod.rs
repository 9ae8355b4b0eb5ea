//! Terms over an arbitrary arity signature.
//!
//! A [`Term`] is stored as a tree. The fully parenthesized word form is only
//! the serialization boundary: [`Term::serialize`] emits it and [`parse`]
//! reads it back, and unique reading makes the two mutually inverse.
//! Subterm occurrences are addressed by [`Position`], a path of 1-based child
//! indices from the root.

mod parser;
mod position;
mod signature;

use core::fmt;

use thiserror::Error;

use crate::prelude::*;

pub use parser::{parse, tokenize, ParseError, Token};
pub use position::Position;
pub use signature::{is_constant_literal, Signature, SignatureError, AND, NOT, ONE, OR, PLUS, TIMES, ZERO};

/// Name of a functional symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

/// The variable `x_i`; the index is always at least 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Option<Var> {
        (index >= 1).then_some(Var(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} does not address a subterm")]
    InvalidPosition(Position),
}

/// A term: an atom, or a functional symbol applied to one, two or `k >= 3`
/// argument terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Symbol),
    Var(Var),
    Unary(Symbol, Box<Term>),
    Binary(Symbol, Box<Term>, Box<Term>),
    /// Always at least three children.
    Nary(Symbol, Vec<Term>),
}

impl Term {
    /// `x_i`. Panics if `index == 0`.
    pub fn var(index: u32) -> Term {
        Term::Var(Var::new(index).expect("variable indices start at 1"))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::new(name))
    }

    pub fn unary(op: &str, arg: Term) -> Term {
        Term::Unary(Symbol::new(op), Box::new(arg))
    }

    pub fn binary(op: &str, left: Term, right: Term) -> Term {
        Term::Binary(Symbol::new(op), Box::new(left), Box::new(right))
    }

    /// Panics if fewer than three children are given.
    pub fn nary(op: &str, children: Vec<Term>) -> Term {
        assert!(children.len() >= 3, "k-ary terms need at least three children");
        Term::Nary(Symbol::new(op), children)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    /// The head symbol, if the term is not a variable.
    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::Const(s) | Term::Unary(s, _) | Term::Binary(s, _, _) | Term::Nary(s, _) => {
                Some(s)
            }
        }
    }

    /// True when the head symbol is `op`.
    pub fn has_head(&self, op: &str) -> bool {
        self.symbol().is_some_and(|s| s.as_str() == op)
    }

    pub fn arity(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::Unary(..) => 1,
            Term::Binary(..) => 2,
            Term::Nary(_, cs) => cs.len(),
        }
    }

    /// Child `i` (1-based).
    pub fn child(&self, i: usize) -> Option<&Term> {
        match (self, i) {
            (Term::Unary(_, a), 1) => Some(a),
            (Term::Binary(_, l, _), 1) => Some(l),
            (Term::Binary(_, _, r), 2) => Some(r),
            (Term::Nary(_, cs), i) if i >= 1 => cs.get(i - 1),
            _ => None,
        }
    }

    pub fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (Term::Unary(_, a), 1) => Some(a),
            (Term::Binary(_, l, _), 1) => Some(l),
            (Term::Binary(_, _, r), 2) => Some(r),
            (Term::Nary(_, cs), i) if i >= 1 => cs.get_mut(i - 1),
            _ => None,
        }
    }

    pub fn children(&self) -> impl Iterator<Item = &Term> {
        (1..=self.arity()).filter_map(move |i| self.child(i))
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Term, TermError> {
        let mut cur = self;
        for &i in pos.as_slice() {
            cur = cur
                .child(i)
                .ok_or_else(|| TermError::InvalidPosition(pos.clone()))?;
        }
        Ok(cur)
    }

    pub fn subterm_at_mut(&mut self, pos: &Position) -> Result<&mut Term, TermError> {
        let mut cur = self;
        for &i in pos.as_slice() {
            cur = cur
                .child_mut(i)
                .ok_or_else(|| TermError::InvalidPosition(pos.clone()))?;
        }
        Ok(cur)
    }

    /// A copy of `self` with the subterm at `pos` replaced by `u`.
    pub fn replace_at(&self, pos: &Position, u: Term) -> Result<Term, TermError> {
        let mut out = self.clone();
        out.replace_in_place(pos, u)?;
        Ok(out)
    }

    /// Replaces the subterm at `pos` and returns the old one.
    pub fn replace_in_place(&mut self, pos: &Position, u: Term) -> Result<Term, TermError> {
        let slot = self.subterm_at_mut(pos)?;
        Ok(core::mem::replace(slot, u))
    }

    /// `t[x/u]`: every occurrence of `x` replaced by `u` simultaneously.
    pub fn substitute_var(&self, x: Var, u: &Term) -> Term {
        self.map_vars(&mut |v| if v == x { u.clone() } else { Term::Var(v) })
    }

    /// Rebuilds the term with every variable occurrence replaced by `f(var)`.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Const(_) => self.clone(),
            Term::Unary(s, a) => Term::Unary(s.clone(), Box::new(a.map_vars(f))),
            Term::Binary(s, l, r) => {
                Term::Binary(s.clone(), Box::new(l.map_vars(f)), Box::new(r.map_vars(f)))
            }
            Term::Nary(s, cs) => Term::Nary(s.clone(), cs.iter().map(|c| c.map_vars(f)).collect()),
        }
    }

    /// 0 for atoms, otherwise one more than the deepest child.
    pub fn depth(&self) -> usize {
        self.children().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        1 + self.children().map(Term::size).sum::<usize>()
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        if let Term::Var(v) = self {
            out.insert(*v);
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// Largest variable index occurring in the term, 0 for constant terms.
    pub fn max_var(&self) -> u32 {
        match self {
            Term::Var(v) => v.index(),
            _ => self.children().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Length of the word form, counting every symbol, variable, bracket and
    /// comma as one letter.
    pub fn word_len(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Unary(_, a) => a.word_len() + 3,
            Term::Binary(_, l, r) => l.word_len() + r.word_len() + 3,
            Term::Nary(_, cs) => cs.iter().map(Term::word_len).sum::<usize>() + cs.len() + 2,
        }
    }

    /// All positions in preorder (a node before its children, left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk_positions(&mut path, &mut out);
        out
    }

    fn walk_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        out.push(Position::from(path.clone()));
        for i in 1..=self.arity() {
            path.push(i);
            self.child(i)
                .expect("child index within arity")
                .walk_positions(path, out);
            path.pop();
        }
    }

    /// The fully parenthesized word form.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_word(&mut out).expect("writing to a String cannot fail");
        out
    }

    fn write_word(&self, out: &mut impl fmt::Write) -> fmt::Result {
        match self {
            Term::Const(s) => write!(out, "{s}"),
            Term::Var(v) => write!(out, "{v}"),
            Term::Unary(s, a) => {
                write!(out, "{s}(")?;
                a.write_word(out)?;
                out.write_char(')')
            }
            Term::Binary(s, l, r) => {
                out.write_char('(')?;
                l.write_word(out)?;
                write!(out, "{s}")?;
                r.write_word(out)?;
                out.write_char(')')
            }
            Term::Nary(s, cs) => {
                write!(out, "{s}(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.write_char(',')?;
                    }
                    c.write_word(out)?;
                }
                out.write_char(')')
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_word(f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}
