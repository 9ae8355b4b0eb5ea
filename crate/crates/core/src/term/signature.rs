use thiserror::Error;

use super::Symbol;
use crate::prelude::*;

/// Symbols of the ring signature.
pub const PLUS: &str = "+";
pub const TIMES: &str = "·";
pub const ZERO: &str = "0";
pub const ONE: &str = "1";

/// Symbols of the Boolean signature (`0` and `1` are shared with the ring).
pub const OR: &str = "∨";
pub const AND: &str = "∧";
pub const NOT: &str = "¬";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol name {0:?} is empty or contains a bracket, comma or whitespace")]
    BadName(String),
    #[error("symbol name {0:?} collides with the variable alphabet")]
    VariableLike(String),
    #[error("symbol {0:?} already has an arity")]
    Duplicate(String),
    #[error("alias target {0:?} is not a symbol of the signature")]
    UnknownTarget(String),
}

/// An arity function: finitely many named symbols, each with one arity,
/// plus optional ASCII aliases and the ring-constant literal family
/// `c{...}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Symbol, usize>,
    aliases: BTreeMap<String, Symbol>,
    constant_literals: bool,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// `+`, `·` (alias `*`), `0`, `1` and the constants `c{r}`.
    pub fn ring() -> Self {
        let mut sig = Signature::new();
        for (name, arity) in [(PLUS, 2), (TIMES, 2), (ZERO, 0), (ONE, 0)] {
            sig.arities.insert(Symbol::new(name), arity);
        }
        sig.aliases.insert("*".into(), Symbol::new(TIMES));
        sig.constant_literals = true;
        sig
    }

    /// `∨` (alias `|`), `∧` (alias `&`), `¬` (alias `!`), `0` and `1`.
    pub fn boolean() -> Self {
        let mut sig = Signature::new();
        for (name, arity) in [(OR, 2), (AND, 2), (NOT, 1), (ZERO, 0), (ONE, 0)] {
            sig.arities.insert(Symbol::new(name), arity);
        }
        sig.aliases.insert("|".into(), Symbol::new(OR));
        sig.aliases.insert("&".into(), Symbol::new(AND));
        sig.aliases.insert("!".into(), Symbol::new(NOT));
        sig
    }

    pub fn with_symbol(mut self, name: &str, arity: usize) -> Result<Self, SignatureError> {
        check_name(name)?;
        let sym = Symbol::new(name);
        if self.arities.contains_key(&sym) || self.aliases.contains_key(name) {
            return Err(SignatureError::Duplicate(name.into()));
        }
        self.arities.insert(sym, arity);
        Ok(self)
    }

    pub fn with_alias(mut self, alias: &str, target: &str) -> Result<Self, SignatureError> {
        check_name(alias)?;
        let target = Symbol::new(target);
        if !self.arities.contains_key(&target) {
            return Err(SignatureError::UnknownTarget(target.as_str().into()));
        }
        if self.arities.contains_key(&Symbol::new(alias)) || self.aliases.contains_key(alias) {
            return Err(SignatureError::Duplicate(alias.into()));
        }
        self.aliases.insert(alias.into(), target);
        Ok(self)
    }

    /// Accept `c{...}` literals as constants.
    pub fn with_constant_literals(mut self) -> Self {
        self.constant_literals = true;
        self
    }

    pub fn constant_literals(&self) -> bool {
        self.constant_literals
    }

    pub fn arity(&self, sym: &Symbol) -> Option<usize> {
        if let Some(&a) = self.arities.get(sym) {
            return Some(a);
        }
        (self.constant_literals && is_constant_literal(sym.as_str())).then_some(0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.arities.iter().map(|(s, &a)| (s, a))
    }

    /// Every spelling the lexer accepts for a named symbol, with the symbol
    /// it denotes, longest spelling first.
    pub(crate) fn spellings(&self) -> Vec<(String, Symbol)> {
        let mut out: Vec<(String, Symbol)> = self
            .arities
            .keys()
            .map(|s| (s.as_str().to_owned(), s.clone()))
            .chain(self.aliases.iter().map(|(a, s)| (a.clone(), s.clone())))
            .collect();
        out.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then(a.0.cmp(&b.0)));
        out
    }
}

/// `c{...}` with a nonempty body free of braces.
pub fn is_constant_literal(name: &str) -> bool {
    name.strip_prefix("c{")
        .and_then(|rest| rest.strip_suffix('}'))
        .is_some_and(|body| !body.is_empty() && !body.contains(['{', '}']))
}

fn check_name(name: &str) -> Result<(), SignatureError> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',')) {
        return Err(SignatureError::BadName(name.into()));
    }
    let mut chars = name.chars();
    if chars.next() == Some('x') && chars.next().is_some_and(|c| c.is_ascii_digit()) {
        return Err(SignatureError::VariableLike(name.into()));
    }
    Ok(())
}
