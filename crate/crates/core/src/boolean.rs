//! Boolean terms over `∨ ∧ ¬ 0 1`, the nineteen Boolean transformations,
//! evaluation in Boolean algebras and certified reduction to the standard
//! disjunctive normal form.

use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::prelude::*;
use crate::prob::Event;
use crate::rewrite::{
    self, comb_elements, flatten_comb, sort_comb, spine, Binding, Certificate, Direction, PatternRule, RedexError,
    Recorder, RuleSystem, Step, Verdict,
};
use crate::term::{parse, ParseError, Signature, Term, Var, AND, NOT, ONE, OR, ZERO};

use Direction::{Fwd, Rev};

/// The Boolean transformations BT1 to BT19.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BtRule {
    /// `(0∧u) ∼ 0`
    AndZero,
    /// `(0∨u) ∼ u`
    OrZero,
    /// `(1∧u) ∼ u`
    AndOne,
    /// `(1∨u) ∼ 1`
    OrOne,
    /// `(u∧¬(u)) ∼ 0`
    Contradiction,
    /// `(u∨¬(u)) ∼ 1`
    ExcludedMiddle,
    /// `(u∨u') ∼ (u'∨u)`
    OrComm,
    /// `(u∧u') ∼ (u'∧u)`
    AndComm,
    /// `(u∨(u'∨u'')) ∼ ((u∨u')∨u'')`
    OrAssoc,
    /// `(u∧(u'∧u'')) ∼ ((u∧u')∧u'')`
    AndAssoc,
    /// `(u∨u) ∼ u`
    OrIdem,
    /// `(u∧u) ∼ u`
    AndIdem,
    /// `(u∨(u'∧u'')) ∼ ((u∨u')∧(u∨u''))`
    OrDistribute,
    /// `(u∧(u'∨u'')) ∼ ((u∧u')∨(u∧u''))`
    AndDistribute,
    /// `(u∨(u∧u')) ∼ u`
    OrAbsorb,
    /// `(u∧(u∨u')) ∼ u`
    AndAbsorb,
    /// `¬(¬(u)) ∼ u`
    DoubleNegation,
    /// `¬((u∨u')) ∼ (¬(u)∧¬(u'))`
    DeMorganOr,
    /// `¬((u∧u')) ∼ (¬(u)∨¬(u'))`
    DeMorganAnd,
}

impl BtRule {
    pub const ALL: [BtRule; 19] = [
        BtRule::AndZero,
        BtRule::OrZero,
        BtRule::AndOne,
        BtRule::OrOne,
        BtRule::Contradiction,
        BtRule::ExcludedMiddle,
        BtRule::OrComm,
        BtRule::AndComm,
        BtRule::OrAssoc,
        BtRule::AndAssoc,
        BtRule::OrIdem,
        BtRule::AndIdem,
        BtRule::OrDistribute,
        BtRule::AndDistribute,
        BtRule::OrAbsorb,
        BtRule::AndAbsorb,
        BtRule::DoubleNegation,
        BtRule::DeMorganOr,
        BtRule::DeMorganAnd,
    ];

    /// The rule number, from 1 to 19.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<BtRule> {
        n.checked_sub(1).and_then(|i| BtRule::ALL.get(i as usize).copied())
    }

    /// The two sides as words over `x1`, `x2`, `x3`.
    pub fn sides(self) -> (&'static str, &'static str) {
        match self {
            BtRule::AndZero => ("(0∧x1)", "0"),
            BtRule::OrZero => ("(0∨x1)", "x1"),
            BtRule::AndOne => ("(1∧x1)", "x1"),
            BtRule::OrOne => ("(1∨x1)", "1"),
            BtRule::Contradiction => ("(x1∧¬(x1))", "0"),
            BtRule::ExcludedMiddle => ("(x1∨¬(x1))", "1"),
            BtRule::OrComm => ("(x1∨x2)", "(x2∨x1)"),
            BtRule::AndComm => ("(x1∧x2)", "(x2∧x1)"),
            BtRule::OrAssoc => ("(x1∨(x2∨x3))", "((x1∨x2)∨x3)"),
            BtRule::AndAssoc => ("(x1∧(x2∧x3))", "((x1∧x2)∧x3)"),
            BtRule::OrIdem => ("(x1∨x1)", "x1"),
            BtRule::AndIdem => ("(x1∧x1)", "x1"),
            BtRule::OrDistribute => ("(x1∨(x2∧x3))", "((x1∨x2)∧(x1∨x3))"),
            BtRule::AndDistribute => ("(x1∧(x2∨x3))", "((x1∧x2)∨(x1∧x3))"),
            BtRule::OrAbsorb => ("(x1∨(x1∧x2))", "x1"),
            BtRule::AndAbsorb => ("(x1∧(x1∨x2))", "x1"),
            BtRule::DoubleNegation => ("¬(¬(x1))", "x1"),
            BtRule::DeMorganOr => ("¬((x1∨x2))", "(¬(x1)∧¬(x2))"),
            BtRule::DeMorganAnd => ("¬((x1∧x2))", "(¬(x1)∨¬(x2))"),
        }
    }
}

impl fmt::Display for BtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BT{}", self.number())
    }
}

impl FromStr for BtRule {
    type Err = String;

    /// `BT7` or a bare number.
    fn from_str(s: &str) -> Result<BtRule, String> {
        let n = s.strip_prefix("BT").unwrap_or(s);
        n.parse::<u8>()
            .ok()
            .and_then(BtRule::from_number)
            .ok_or_else(|| format!("unknown Boolean rule {s:?}"))
    }
}

/// The nineteen transformations as a rule system.
#[derive(Debug, Clone)]
pub struct BtRules {
    patterns: Vec<PatternRule>,
}

impl BtRules {
    pub fn new() -> BtRules {
        let sig = Signature::boolean();
        let p = |w: &str| parse(w, &sig).expect("rule pattern parses");
        let patterns = BtRule::ALL
            .iter()
            .map(|r| {
                let (l, rhs) = r.sides();
                PatternRule::new(p(l), p(rhs))
            })
            .collect();
        BtRules { patterns }
    }

    pub fn pattern(&self, rule: BtRule) -> &PatternRule {
        &self.patterns[rule as usize]
    }
}

impl Default for BtRules {
    fn default() -> Self {
        BtRules::new()
    }
}

impl RuleSystem for BtRules {
    type Rule = BtRule;

    fn rewrite(&self, slot: &mut Term, rule: BtRule, dir: Direction, bind: &Binding) -> Result<Binding, RedexError> {
        self.pattern(rule).rewrite(slot, dir, bind)
    }
}

pub type BtCertStep = Step<BtRule>;
pub type BtCertificate = Certificate<BtRule>;

/// Applies one Boolean transformation.
pub fn apply_bt(t: &Term, step: &BtCertStep) -> Result<Term, rewrite::RewriteError> {
    rewrite::apply(&BtRules::new(), t, step)
}

/// Replays the certificate step by step.
pub fn verify_bt_certificate(cert: &BtCertificate) -> Verdict {
    rewrite::verify(&BtRules::new(), cert)
}

pub fn parse_bool_term(word: &str) -> Result<Term, ParseError> {
    parse(word, &Signature::boolean())
}

/// Replaces every `x_i` with `x_{i+offset}`.
pub fn shift_variables(t: &Term, offset: u32) -> Term {
    t.map_vars(&mut |v| Term::var(v.index() + offset))
}

fn check_boolean(t: &Term) -> Result<(), String> {
    let ok = match t {
        Term::Var(_) => true,
        Term::Const(s) => s.as_str() == ZERO || s.as_str() == ONE,
        Term::Unary(s, _) => s.as_str() == NOT,
        Term::Binary(s, _, _) => s.as_str() == OR || s.as_str() == AND,
        Term::Nary(..) => false,
    };
    if !ok {
        return Err(t.symbol().map_or_else(String::new, |s| s.as_str().to_string()));
    }
    t.children().try_for_each(check_boolean)
}

/// A Boolean algebra `(A, ∨, ∧, ᶜ, 0, 1)`.
pub trait BooleanAlgebra {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn complement(&self, a: &Self::Elem) -> Self::Elem;
}

/// `{0, 1}` with the usual operations.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoElement;

impl BooleanAlgebra for TwoElement {
    type Elem = bool;

    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn join(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn meet(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn complement(&self, a: &bool) -> bool {
        !*a
    }
}

/// Subsets of `{0, …, universe-1}`.
#[derive(Debug, Clone, Copy)]
pub struct PowerSet {
    pub universe: usize,
}

impl BooleanAlgebra for PowerSet {
    type Elem = Event;

    fn zero(&self) -> Event {
        Event::empty(self.universe)
    }
    fn one(&self) -> Event {
        Event::full(self.universe)
    }
    fn join(&self, a: &Event, b: &Event) -> Event {
        a | b
    }
    fn meet(&self, a: &Event, b: &Event) -> Event {
        a & b
    }
    fn complement(&self, a: &Event) -> Event {
        !a
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolEvalError {
    #[error("no argument supplied for {0}")]
    MissingArgument(Var),
    #[error("symbol {0:?} cannot be evaluated in a Boolean algebra")]
    ForeignSymbol(String),
}

/// Evaluates `t` with `x_i` set to `args[i-1]`.
pub fn bool_eval<B: BooleanAlgebra>(t: &Term, alg: &B, args: &[B::Elem]) -> Result<B::Elem, BoolEvalError> {
    let foreign = |t: &Term| BoolEvalError::ForeignSymbol(t.symbol().map_or_else(String::new, |s| s.as_str().into()));
    Ok(match t {
        Term::Var(v) => args
            .get(v.index() as usize - 1)
            .cloned()
            .ok_or(BoolEvalError::MissingArgument(*v))?,
        Term::Const(s) if s.as_str() == ZERO => alg.zero(),
        Term::Const(s) if s.as_str() == ONE => alg.one(),
        Term::Unary(s, a) if s.as_str() == NOT => alg.complement(&bool_eval(a, alg, args)?),
        Term::Binary(s, a, b) if s.as_str() == OR => alg.join(&bool_eval(a, alg, args)?, &bool_eval(b, alg, args)?),
        Term::Binary(s, a, b) if s.as_str() == AND => alg.meet(&bool_eval(a, alg, args)?, &bool_eval(b, alg, args)?),
        _ => return Err(foreign(t)),
    })
}

/// The set of assignments `a ∈ {0,1}ⁿ` where `t` is true; assignment `a`
/// is the integer whose bit `i-1` is the value of `x_i`.
pub fn truth_table(t: &Term, n: u32) -> Result<Event, BoolEvalError> {
    let alg = PowerSet { universe: 1usize << n };
    let args: Vec<Event> = (0..n)
        .map(|i| Event::from_fn(alg.universe, |a| a >> i & 1 == 1))
        .collect();
    bool_eval(t, &alg, &args)
}

/// A conjunction of literals over distinct variables, stored in increasing
/// variable order. `true` in the type marks a negated literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WedgeMonomial {
    literals: Vec<(u32, bool)>,
}

fn literal_of(t: &Term) -> Option<(u32, bool)> {
    match t {
        Term::Var(v) => Some((v.index(), false)),
        Term::Unary(s, a) if s.as_str() == NOT => a.as_var().map(|v| (v.index(), true)),
        _ => None,
    }
}

fn literal_term(var: u32, negated: bool) -> Term {
    if negated {
        Term::unary(NOT, Term::var(var))
    } else {
        Term::var(var)
    }
}

fn leaves<'t>(t: &'t Term, op: &str, out: &mut Vec<&'t Term>) {
    match t {
        Term::Binary(s, a, b) if s.as_str() == op => {
            leaves(a, op, out);
            leaves(b, op, out);
        }
        _ => out.push(t),
    }
}

impl WedgeMonomial {
    /// `None` if a variable repeats or is 0.
    pub fn new(literals: impl IntoIterator<Item = (u32, bool)>) -> Option<WedgeMonomial> {
        let mut literals: Vec<(u32, bool)> = literals.into_iter().collect();
        literals.sort_unstable();
        let distinct = literals.windows(2).all(|w| w[0].0 != w[1].0);
        (distinct && literals.iter().all(|l| l.0 >= 1)).then_some(WedgeMonomial { literals })
    }

    /// The monomial over `support` (sorted, distinct) with the given type.
    pub fn from_type(support: &[u32], ty: &[bool]) -> Option<WedgeMonomial> {
        (support.len() == ty.len())
            .then(|| WedgeMonomial::new(support.iter().copied().zip(ty.iter().copied())))
            .flatten()
    }

    /// Reads any bracketing of a conjunction of literals, or `1`.
    pub fn recognize(t: &Term) -> Option<WedgeMonomial> {
        if t.has_head(ONE) {
            return Some(WedgeMonomial { literals: Vec::new() });
        }
        let mut ls = Vec::new();
        leaves(t, AND, &mut ls);
        WedgeMonomial::new(ls.into_iter().map(literal_of).collect::<Option<Vec<_>>>()?)
    }

    pub fn literals(&self) -> &[(u32, bool)] {
        &self.literals
    }

    pub fn support(&self) -> Vec<u32> {
        self.literals.iter().map(|l| l.0).collect()
    }

    pub fn type_vector(&self) -> Vec<bool> {
        self.literals.iter().map(|l| l.1).collect()
    }

    /// `(l1∧(l2∧(…∧lk)))`, or `1` for the empty monomial.
    pub fn to_term(&self) -> Term {
        let mut it = self.literals.iter().rev();
        let Some(&(v, n)) = it.next() else { return Term::constant(ONE) };
        it.fold(literal_term(v, n), |acc, &(v, n)| Term::binary(AND, literal_term(v, n), acc))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DnfError {
    #[error("symbol {0:?} is not part of the Boolean signature")]
    ForeignSymbol(String),
    #[error("variable x{var} exceeds the width {width}")]
    VariableOutOfRange { var: u32, width: u32 },
    #[error("the width must be at least 1")]
    ZeroWidth,
    #[error("widths differ: {0} and {1}")]
    WidthMismatch(usize, usize),
    #[error("type vector of length {found} over a support of size {expected}")]
    BadType { expected: usize, found: usize },
}

/// A disjunction of monomials over one common support with pairwise
/// distinct types. No monomials means the term `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DnfTerm {
    support: Vec<u32>,
    types: BTreeSet<Vec<bool>>,
}

impl DnfTerm {
    /// `support` is sorted and deduplicated here.
    pub fn new(support: impl IntoIterator<Item = u32>, types: impl IntoIterator<Item = Vec<bool>>) -> Result<DnfTerm, DnfError> {
        let support: BTreeSet<u32> = support.into_iter().collect();
        let support: Vec<u32> = support.into_iter().collect();
        let types: BTreeSet<Vec<bool>> = types.into_iter().collect();
        if let Some(bad) = types.iter().find(|t| t.len() != support.len()) {
            return Err(DnfError::BadType { expected: support.len(), found: bad.len() });
        }
        Ok(DnfTerm { support, types })
    }

    /// A DNF over `[n]`.
    pub fn standard(n: u32, types: impl IntoIterator<Item = Vec<bool>>) -> Result<DnfTerm, DnfError> {
        DnfTerm::new(1..=n, types)
    }

    pub fn zero(n: u32) -> DnfTerm {
        DnfTerm { support: (1..=n).collect(), types: BTreeSet::new() }
    }

    /// All `2ⁿ` types over `[n]`.
    pub fn full(n: u32) -> DnfTerm {
        let types = (0..1u64 << n).map(|a| (0..n).map(|i| a >> (n - 1 - i) & 1 == 1).collect());
        DnfTerm { support: (1..=n).collect(), types: types.collect() }
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    /// Size of the support.
    pub fn width(&self) -> usize {
        self.support.len()
    }

    /// Types in increasing order (read as binary numbers, first entry most
    /// significant).
    pub fn types(&self) -> &BTreeSet<Vec<bool>> {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_zero(&self) -> bool {
        self.types.is_empty()
    }

    pub fn monomials(&self) -> Vec<WedgeMonomial> {
        self.types
            .iter()
            .map(|t| WedgeMonomial::from_type(&self.support, t).expect("types match the support"))
            .collect()
    }

    /// Right-nested disjunction of the monomials in type order, or `0`.
    pub fn to_term(&self) -> Term {
        let mut ms: Vec<Term> = self.monomials().iter().map(WedgeMonomial::to_term).collect();
        let Some(last) = ms.pop() else { return Term::constant(ZERO) };
        ms.into_iter().rev().fold(last, |acc, m| Term::binary(OR, m, acc))
    }

    /// Reads any arrangement of a disjunction of `[n]`-monomials with
    /// distinct types, or `0`.
    pub fn recognize(t: &Term, n: u32) -> Option<DnfTerm> {
        if t.has_head(ZERO) {
            return Some(DnfTerm::zero(n));
        }
        let mut ds = Vec::new();
        leaves(t, OR, &mut ds);
        let support: Vec<u32> = (1..=n).collect();
        let mut types = BTreeSet::new();
        for d in ds {
            let m = WedgeMonomial::recognize(d)?;
            if m.support() != support || !types.insert(m.type_vector()) {
                return None;
            }
        }
        Some(DnfTerm { support, types })
    }

    /// Moves every variable `x_i` of the support to `x_{i+offset}`.
    pub fn shift(&self, offset: u32) -> DnfTerm {
        DnfTerm { support: self.support.iter().map(|v| v + offset).collect(), types: self.types.clone() }
    }

    /// The same Boolean function over a larger support.
    pub fn widen(&self, support: &[u32]) -> Option<DnfTerm> {
        let target: BTreeSet<u32> = support.iter().copied().collect();
        if !self.support.iter().all(|v| target.contains(v)) {
            return None;
        }
        let target: Vec<u32> = target.into_iter().collect();
        let extra: Vec<usize> = (0..target.len()).filter(|&i| !self.support.contains(&target[i])).collect();
        let mut types = BTreeSet::new();
        for ty in &self.types {
            for bits in 0..1u64 << extra.len() {
                let mut full = vec![false; target.len()];
                let mut k = 0;
                for (i, slot) in full.iter_mut().enumerate() {
                    if let Some(e) = extra.iter().position(|&x| x == i) {
                        *slot = bits >> e & 1 == 1;
                    } else {
                        *slot = ty[k];
                        k += 1;
                    }
                }
                types.insert(full);
            }
        }
        Some(DnfTerm { support: target, types })
    }
}

/// DNF of `(p ∧ q)`: every pair of monomials is conjoined; pairs that
/// disagree on a shared variable vanish and equal results merge.
pub fn wedge_of_dnfs(p: &DnfTerm, q: &DnfTerm) -> Result<DnfTerm, DnfError> {
    if p.width() != q.width() {
        return Err(DnfError::WidthMismatch(p.width(), q.width()));
    }
    let support: Vec<u32> = p.support.iter().chain(&q.support).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut types = BTreeSet::new();
    for a in p.monomials() {
        'pair: for b in q.monomials() {
            let mut lits: BTreeMap<u32, bool> = a.literals.iter().copied().collect();
            for &(v, neg) in &b.literals {
                if *lits.entry(v).or_insert(neg) != neg {
                    continue 'pair;
                }
            }
            types.insert(lits.into_values().collect::<Vec<bool>>());
        }
    }
    Ok(DnfTerm { support, types })
}

/// Output of [`to_dnf`].
#[derive(Debug, Clone)]
pub struct DnfOutcome {
    pub dnf: DnfTerm,
    /// Certificate from the input to `dnf.to_term()`.
    pub certificate: BtCertificate,
    /// Reduction pair over negated non-variables before each negation step.
    pub negation_pairs: Vec<(usize, usize)>,
    /// Reduction pair over d-subterms before each distribution step.
    pub distribution_pairs: Vec<(usize, usize)>,
    /// Weight before each distribution step and after the last one.
    pub distribution_weights: Vec<BigUint>,
}

fn is_n_subterm(t: &Term) -> bool {
    matches!(t, Term::Unary(s, a) if s.as_str() == NOT && a.as_var().is_none())
}

fn is_d_subterm(t: &Term) -> bool {
    matches!(t, Term::Binary(s, l, r) if s.as_str() == AND && (l.has_head(OR) || r.has_head(OR)))
}

/// Deepest subterm satisfying `pred` (leftmost among equals), with the
/// reduction pair (its depth, number of such subterms of that depth).
fn deepest(t: &Term, pred: fn(&Term) -> bool) -> Option<(Vec<usize>, (usize, usize))> {
    fn walk(
        t: &Term,
        pred: fn(&Term) -> bool,
        path: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, (usize, usize))>,
    ) -> usize {
        let mut d = 0;
        for (i, c) in t.children().enumerate() {
            path.push(i + 1);
            d = d.max(walk(c, pred, path, best) + 1);
            path.pop();
        }
        if pred(t) {
            match best {
                Some((_, (bd, k))) if *bd == d => *k += 1,
                Some((_, (bd, _))) if *bd > d => {}
                _ => *best = Some((path.clone(), (d, 1))),
            }
        }
        d
    }
    let mut best = None;
    walk(t, pred, &mut Vec::new(), &mut best);
    best
}

/// Reduction pair over subterms `¬(v)` with `v` not a variable.
pub fn negation_pair(t: &Term) -> Option<(usize, usize)> {
    deepest(t, is_n_subterm).map(|(_, p)| p)
}

/// Reduction pair over subterms `(v∧v')` with `v` or `v'` a disjunction.
pub fn conjunction_pair(t: &Term) -> Option<(usize, usize)> {
    deepest(t, is_d_subterm).map(|(_, p)| p)
}

/// `[a] = 2` on atoms, `[¬a] = [a]+1`, `[a∨b] = [a]+[b]+1`, `[a∧b] = [a][b]`.
pub fn conjunction_weight(t: &Term) -> BigUint {
    rewrite::product_weight(t, AND)
}

fn join(p: &[usize], tail: &[usize]) -> Vec<usize> {
    [p, tail].concat()
}

fn literal_key(t: &Term) -> (u32, bool) {
    literal_of(t).expect("conjunct holds literals only")
}

fn monomial_key(t: &Term) -> Vec<(u32, bool)> {
    comb_elements(t, AND).into_iter().map(literal_key).collect()
}

/// Reduces `t` to the `n`-standard DNF and certifies every step.
pub fn to_dnf(t: &Term, n: u32) -> Result<DnfOutcome, DnfError> {
    check_boolean(t).map_err(DnfError::ForeignSymbol)?;
    if n == 0 {
        return Err(DnfError::ZeroWidth);
    }
    if t.max_var() > n {
        return Err(DnfError::VariableOutOfRange { var: t.max_var(), width: n });
    }
    let sys = BtRules::new();
    let mut rec = Recorder::new(&sys, t.clone());
    let mut out = DnfOutcome {
        dnf: DnfTerm::zero(n),
        certificate: Certificate { source: t.clone(), target: t.clone(), steps: Vec::new() },
        negation_pairs: Vec::new(),
        distribution_pairs: Vec::new(),
        distribution_weights: Vec::new(),
    };

    push_negations(&mut rec, &mut out.negation_pairs);
    eliminate_constants(&mut rec);
    if !rec.term().has_head(ZERO) {
        if !rec.term().has_head(ONE) {
            distribute(&mut rec, &mut out.distribution_pairs, &mut out.distribution_weights);
            let mut conjuncts = Vec::new();
            disjunct_positions(rec.term(), &mut Vec::new(), &mut conjuncts);
            for p in &conjuncts {
                clean_conjunct(&mut rec, p);
            }
            drop_zero_disjuncts(&mut rec, &[]);
        }
        if !rec.term().has_head(ZERO) {
            extend_all(&mut rec, &[], n);
            merge_sort(&mut rec, &[]);
        }
    }
    out.certificate = rec.finish();
    out.dnf = DnfTerm::recognize(&out.certificate.target, n).expect("reduction ends in a standard DNF");
    debug_assert_eq!(out.dnf.to_term(), out.certificate.target);
    Ok(out)
}

fn push_negations(rec: &mut Recorder<'_, BtRules>, pairs: &mut Vec<(usize, usize)>) {
    while let Some((p, pair)) = deepest(rec.term(), is_n_subterm) {
        pairs.push(pair);
        let arg = rec.at(&p).child(1).expect("negation has an argument");
        match arg {
            Term::Unary(..) => rec.step(BtRule::DoubleNegation, &p, Fwd),
            Term::Binary(s, ..) if s.as_str() == OR => rec.step(BtRule::DeMorganOr, &p, Fwd),
            Term::Binary(..) => rec.step(BtRule::DeMorganAnd, &p, Fwd),
            Term::Const(s) if s.as_str() == ZERO => {
                // ¬(0) → (0∨¬(0)) → 1
                rec.step(BtRule::OrZero, &p, Rev);
                rec.step(BtRule::ExcludedMiddle, &p, Fwd);
            }
            Term::Const(_) => {
                // ¬(1) → (1∧¬(1)) → 0
                rec.step(BtRule::AndOne, &p, Rev);
                rec.step(BtRule::Contradiction, &p, Fwd);
            }
            _ => unreachable!("checked Boolean term"),
        }
    }
}

fn has_constant_child(t: &Term) -> bool {
    matches!(t, Term::Binary(_, l, r) if matches!(**l, Term::Const(_)) || matches!(**r, Term::Const(_)))
}

fn first_postorder(t: &Term, pred: fn(&Term) -> bool, path: &mut Vec<usize>) -> Option<Vec<usize>> {
    for (i, c) in t.children().enumerate() {
        path.push(i + 1);
        if let Some(p) = first_postorder(c, pred, path) {
            return Some(p);
        }
        path.pop();
    }
    pred(t).then(|| path.clone())
}

fn eliminate_constants(rec: &mut Recorder<'_, BtRules>) {
    while let Some(p) = first_postorder(rec.term(), has_constant_child, &mut Vec::new()) {
        let Term::Binary(op, l, _) = rec.at(&p) else { unreachable!() };
        let is_or = op.as_str() == OR;
        if !matches!(**l, Term::Const(_)) {
            rec.step(if is_or { BtRule::OrComm } else { BtRule::AndComm }, &p, Fwd);
        }
        let zero = rec.at(&p).child(1).is_some_and(|c| c.has_head(ZERO));
        let rule = match (is_or, zero) {
            (false, true) => BtRule::AndZero,
            (true, true) => BtRule::OrZero,
            (false, false) => BtRule::AndOne,
            (true, false) => BtRule::OrOne,
        };
        rec.step(rule, &p, Fwd);
    }
}

fn distribute(rec: &mut Recorder<'_, BtRules>, pairs: &mut Vec<(usize, usize)>, weights: &mut Vec<BigUint>) {
    weights.push(conjunction_weight(rec.term()));
    while let Some((p, pair)) = deepest(rec.term(), is_d_subterm) {
        pairs.push(pair);
        if !rec.at(&p).child(2).is_some_and(|r| r.has_head(OR)) {
            rec.step(BtRule::AndComm, &p, Fwd);
        }
        rec.step(BtRule::AndDistribute, &p, Fwd);
        weights.push(conjunction_weight(rec.term()));
    }
}

fn disjunct_positions(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    match t {
        Term::Binary(s, a, b) if s.as_str() == OR => {
            path.push(1);
            disjunct_positions(a, path, out);
            path.pop();
            path.push(2);
            disjunct_positions(b, path, out);
            path.pop();
        }
        _ => out.push(path.clone()),
    }
}

/// Sorts the conjunction of literals at `base`, removes repeated literals
/// and turns it into `0` when a variable occurs with both signs.
fn clean_conjunct(rec: &mut Recorder<'_, BtRules>, base: &[usize]) {
    flatten_comb(rec, base, AND, BtRule::AndAssoc);
    sort_comb(rec, base, AND, BtRule::AndAssoc, BtRule::AndComm, literal_key);
    loop {
        let keys = monomial_key(rec.at(base));
        let k = keys.len();
        let Some(i) = (0..k.saturating_sub(1)).find(|&i| keys[i].0 == keys[i + 1].0) else { return };
        let q = spine(base, i);
        let tail = i + 2 == k;
        if keys[i] == keys[i + 1] {
            if tail {
                rec.step(BtRule::AndIdem, &q, Fwd);
            } else {
                rec.step(BtRule::AndAssoc, &q, Fwd);
                rec.step(BtRule::AndIdem, &join(&q, &[1]), Fwd);
            }
            continue;
        }
        if tail {
            rec.step(BtRule::Contradiction, &q, Fwd);
        } else {
            rec.step(BtRule::AndAssoc, &q, Fwd);
            rec.step(BtRule::Contradiction, &join(&q, &[1]), Fwd);
            rec.step(BtRule::AndZero, &q, Fwd);
        }
        let mut q = q;
        while q.len() > base.len() {
            q.pop();
            rec.step(BtRule::AndComm, &q, Fwd);
            rec.step(BtRule::AndZero, &q, Fwd);
        }
        return;
    }
}

fn drop_zero_disjuncts(rec: &mut Recorder<'_, BtRules>, p: &[usize]) {
    if !rec.at(p).has_head(OR) {
        return;
    }
    drop_zero_disjuncts(rec, &join(p, &[1]));
    drop_zero_disjuncts(rec, &join(p, &[2]));
    if rec.at(&join(p, &[1])).has_head(ZERO) {
        rec.step(BtRule::OrZero, p, Fwd);
    } else if rec.at(&join(p, &[2])).has_head(ZERO) {
        rec.step(BtRule::OrComm, p, Fwd);
        rec.step(BtRule::OrZero, p, Fwd);
    }
}

fn extend_all(rec: &mut Recorder<'_, BtRules>, p: &[usize], n: u32) {
    if rec.at(p).has_head(OR) {
        extend_all(rec, &join(p, &[1]), n);
        extend_all(rec, &join(p, &[2]), n);
    } else {
        extend(rec, p, n);
    }
}

/// Splits the monomial at `p` on its smallest missing variable until its
/// support is `[n]`: `μ → (1∧μ) → ((x_j∨¬(x_j))∧μ) → (μ∧(x_j∨¬(x_j)))
/// → ((μ∧x_j)∨(μ∧¬(x_j)))`.
fn extend(rec: &mut Recorder<'_, BtRules>, p: &[usize], n: u32) {
    let mu = rec.at(p);
    let support: Vec<u32> = if mu.has_head(ONE) { Vec::new() } else { monomial_key(mu).iter().map(|l| l.0).collect() };
    let Some(j) = (1..=n).find(|j| !support.contains(j)) else { return };
    let witness = Binding::default().with_term(0, Term::var(j));
    if support.is_empty() {
        rec.step_with(BtRule::ExcludedMiddle, p, Rev, witness);
    } else {
        rec.step(BtRule::AndOne, p, Rev);
        rec.step_with(BtRule::ExcludedMiddle, &join(p, &[1]), Rev, witness);
        rec.step(BtRule::AndComm, p, Fwd);
        rec.step(BtRule::AndDistribute, p, Fwd);
        for c in [1, 2] {
            let q = join(p, &[c]);
            flatten_comb(rec, &q, AND, BtRule::AndAssoc);
            sort_comb(rec, &q, AND, BtRule::AndAssoc, BtRule::AndComm, literal_key);
        }
    }
    extend(rec, &join(p, &[1]), n);
    extend(rec, &join(p, &[2]), n);
}

/// Sorts the disjunction tree at `p` into a right comb of distinct
/// monomials, merging sorted halves with whole-block moves.
fn merge_sort(rec: &mut Recorder<'_, BtRules>, p: &[usize]) {
    if !rec.at(p).has_head(OR) {
        return;
    }
    merge_sort(rec, &join(p, &[1]));
    merge_sort(rec, &join(p, &[2]));
    merge(rec, p.to_vec());
}

fn head_key(t: &Term) -> (Vec<(u32, bool)>, bool) {
    match t {
        Term::Binary(s, a, _) if s.as_str() == OR => (monomial_key(a), true),
        _ => (monomial_key(t), false),
    }
}

/// Merges `(A∨B)` at `p` where `A` and `B` are sorted combs.
fn merge(rec: &mut Recorder<'_, BtRules>, mut p: Vec<usize>) {
    use BtRule::{OrAssoc, OrComm, OrIdem};
    loop {
        let t = rec.at(&p);
        if !t.has_head(OR) {
            return;
        }
        let (a, a_comb) = head_key(t.child(1).expect("binary"));
        let (b, b_comb) = head_key(t.child(2).expect("binary"));
        let ord = a.cmp(&b);
        match (a_comb, b_comb, ord) {
            (false, false, Ordering::Less) => return,
            (false, false, Ordering::Greater) => {
                rec.step(OrComm, &p, Fwd);
                return;
            }
            (false, false, Ordering::Equal) => {
                rec.step(OrIdem, &p, Fwd);
                return;
            }
            (false, true, Ordering::Less) => return,
            (false, true, Ordering::Equal) => {
                rec.step(OrAssoc, &p, Fwd);
                rec.step(OrIdem, &join(&p, &[1]), Fwd);
                return;
            }
            (true, false, Ordering::Greater) => {
                rec.step(OrComm, &p, Fwd);
                return;
            }
            (true, false, Ordering::Equal) => {
                rec.step(OrComm, &p, Fwd);
                rec.step(OrAssoc, &p, Fwd);
                rec.step(OrIdem, &join(&p, &[1]), Fwd);
                return;
            }
            (true, _, Ordering::Less) => {
                rec.step(OrAssoc, &p, Rev);
            }
            (_, true, Ordering::Greater) => {
                rec.step(OrComm, &p, Fwd);
                rec.step(OrAssoc, &p, Rev);
            }
            (true, true, Ordering::Equal) => {
                // ((a∨A')∨(a∨B')) → (a∨(A'∨(a∨B'))) → (a∨(a∨(A'∨B'))) → (a∨(A'∨B'))
                rec.step(OrAssoc, &p, Rev);
                let q = join(&p, &[2]);
                rec.step(OrAssoc, &q, Fwd);
                rec.step(OrComm, &join(&q, &[1]), Fwd);
                rec.step(OrAssoc, &q, Rev);
                rec.step(OrAssoc, &p, Fwd);
                rec.step(OrIdem, &join(&p, &[1]), Fwd);
            }
        }
        p.push(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(w: &str) -> Term {
        parse_bool_term(w).unwrap()
    }

    fn brute_table(t: &Term, n: u32) -> Vec<bool> {
        (0..1u32 << n)
            .map(|a| {
                let args: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
                bool_eval(t, &TwoElement, &args).unwrap()
            })
            .collect()
    }

    #[test]
    fn rule_examples() {
        let cases = [
            (BtRule::DoubleNegation, "¬(¬(x1))", vec![], "x1"),
            (BtRule::DeMorganOr, "¬((x1∨x2))", vec![], "(¬(x1)∧¬(x2))"),
            (BtRule::Contradiction, "((x2∧¬(x2))∨x3)", vec![1], "(0∨x3)"),
        ];
        for (rule, src, pos, want) in cases {
            let got = apply_bt(&b(src), &Step::new(rule, pos, Fwd)).unwrap();
            assert_eq!(got, b(want));
        }
        assert_eq!("BT14".parse::<BtRule>().unwrap(), BtRule::AndDistribute);
        assert_eq!(BtRule::AndDistribute.to_string(), "BT14");
        assert!("BT20".parse::<BtRule>().is_err());
    }

    #[test]
    fn eval_examples() {
        let t = b("¬(((0∨x4)∧¬(x5)))");
        assert!(!bool_eval(&t, &TwoElement, &[false, false, false, true, false]).unwrap());
        assert!(bool_eval(&b("1"), &TwoElement, &[]).unwrap());
        assert_eq!(
            bool_eval(&b("x2"), &TwoElement, &[true]),
            Err(BoolEvalError::MissingArgument(Var::new(2).unwrap()))
        );
        assert!(truth_table(&b("((¬(x1)∧x2)∧x1)"), 2).unwrap().is_empty());
    }

    #[test]
    fn contradiction_is_empty() {
        let out = to_dnf(&b("((¬(x1)∧x2)∧x1)"), 2).unwrap();
        assert!(out.dnf.is_zero());
        assert_eq!(out.certificate.target, b("0"));
        assert!(verify_bt_certificate(&out.certificate).is_valid());
    }

    #[test]
    fn one_and_tautology() {
        for w in ["1", "(x1∨¬(x1))", "¬(0)"] {
            let out = to_dnf(&b(w), 1).unwrap();
            assert_eq!(out.dnf, DnfTerm::full(1));
            assert_eq!(out.certificate.target, b("(x1∨¬(x1))"));
            assert!(verify_bt_certificate(&out.certificate).is_valid());
        }
        assert_eq!(to_dnf(&b("1"), 3).unwrap().dnf, DnfTerm::full(3));
    }

    #[test]
    fn standard_example_is_recognized() {
        let t = b("(((x2∧x3)∧¬(x1))∨(x1∧(x3∧¬(x2))))");
        let dnf = DnfTerm::recognize(&t, 3).unwrap();
        let want: BTreeSet<Vec<bool>> = [vec![true, false, false], vec![false, true, false]].into();
        assert_eq!(dnf.types(), &want);
        let out = to_dnf(&t, 3).unwrap();
        assert_eq!(out.dnf, dnf);
        assert_eq!(out.certificate.target.serialize(), "((x1∧(¬(x2)∧x3))∨(¬(x1)∧(x2∧x3)))");
        assert!(verify_bt_certificate(&out.certificate).is_valid());
    }

    #[test]
    fn canonical_output_has_empty_certificate() {
        let t = b("(((x1∨¬(x3))∧¬((x2∧x1)))∨¬(¬(x3)))");
        let out = to_dnf(&t, 3).unwrap();
        let again = to_dnf(&out.certificate.target, 3).unwrap();
        assert!(again.certificate.steps.is_empty());
        assert_eq!(again.dnf, out.dnf);
    }

    #[test]
    fn dnf_matches_truth_table() {
        let words = [
            "(((x1∨¬(x3))∧¬((x2∧x1)))∨¬(¬(x3)))",
            "((x1∨x2)∧(x3∨(x1∧¬(1))))",
            "¬(((x1∨0)∧(x2∨¬(x2))))",
            "((x2∨x2)∧(x1∨x1))",
            "(x1∧(x2∧(x3∨x4)))",
        ];
        for w in words {
            let t = b(w);
            for n in [t.max_var(), t.max_var() + 1] {
                let out = to_dnf(&t, n).unwrap();
                assert!(verify_bt_certificate(&out.certificate).is_valid(), "{w}");
                assert_eq!(brute_table(&out.certificate.target, n), brute_table(&t, n), "{w}");
                assert!(out.negation_pairs.windows(2).all(|p| p[0] > p[1]), "{w}");
                assert!(out.distribution_weights.windows(2).all(|p| p[0] > p[1]), "{w}");
            }
        }
    }

    #[test]
    fn conjunction_pair_can_grow() {
        let out = to_dnf(&b("(x1∧(x2∧(x3∨x4)))"), 4).unwrap();
        assert_eq!(out.distribution_pairs[..2], [(2, 1), (3, 1)]);
    }

    #[test]
    fn wedge_examples() {
        let zero = DnfTerm::zero(2);
        let m = DnfTerm::standard(2, [vec![false, true]]).unwrap();
        let m2 = DnfTerm::standard(2, [vec![true, true]]).unwrap();
        assert!(wedge_of_dnfs(&zero, &m).unwrap().is_zero());
        assert_eq!(wedge_of_dnfs(&m, &m).unwrap(), m);
        assert!(wedge_of_dnfs(&m, &m2).unwrap().is_zero());
        assert_eq!(wedge_of_dnfs(&m, &DnfTerm::zero(3)), Err(DnfError::WidthMismatch(2, 3)));
        let shifted = wedge_of_dnfs(&m, &m2.shift(2)).unwrap();
        assert_eq!(shifted.support(), &[1, 2, 3, 4]);
        assert_eq!(shifted.types().iter().next().unwrap(), &vec![false, true, true, true]);
    }

    #[test]
    fn shifting() {
        assert_eq!(shift_variables(&b("(x1∧x2)"), 2), b("(x3∧x4)"));
        assert_eq!(shift_variables(&b("(1∨0)"), 7), b("(1∨0)"));
        assert_eq!(shift_variables(&b("¬(x3)"), 5), b("¬(x8)"));
    }

    #[test]
    fn widen_agrees_with_truth_table() {
        let d = DnfTerm::standard(2, [vec![false, true], vec![true, true]]).unwrap();
        let w = d.widen(&[1, 2, 3]).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(brute_table(&w.to_term(), 3), brute_table(&d.to_term(), 3));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(to_dnf(&b("x3"), 2).unwrap_err(), DnfError::VariableOutOfRange { var: 3, width: 2 });
        assert_eq!(to_dnf(&Term::binary("+", Term::var(1), Term::var(1)), 1).unwrap_err(), DnfError::ForeignSymbol("+".into()));
    }
}
