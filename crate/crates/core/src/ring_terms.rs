//! Ring terms over `+`, `·`, `0`, `1` and the constants `c{r}`: the
//! elementary transformations ET-1…ET10, the evaluation Ψ into standard
//! polynomials, reduction to standard terms with a replayable certificate,
//! and the decision procedure that turns equality of Ψ-images into an
//! explicit chain of transformations.

use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::poly::{ExponentVector, Flavor, StandardPolynomial};
use crate::prelude::*;
use crate::rewrite::{
    self, comb_element, comb_elements, flatten_comb, sort_comb, spine, Binding, Certificate, Direction, PatternRule,
    RedexError, Recorder, RuleSystem, Step, Verdict,
};
use crate::ring::{RAlgebra, Ring, RingError, Scalar};
use crate::term::{is_constant_literal, parse, ParseError, Signature, Term, Var, ONE, PLUS, TIMES, ZERO};

use Direction::{Fwd, Rev};

/// The twelve elementary transformations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EtRule {
    /// `0 ∼ c{0}`
    ZeroConst,
    /// `1 ∼ c{1}`
    OneConst,
    /// `(c_r+c_s) ∼ c_{r⊕s}`
    AddConst,
    /// `(c_r·c_s) ∼ c_{r⊙s}`
    MulConst,
    /// `(0+u) ∼ u`
    AddZero,
    /// `(1·u) ∼ u`
    MulOne,
    /// `(u+u') ∼ (u'+u)`
    AddComm,
    /// `(u·u') ∼ (u'·u)`
    MulComm,
    /// `(u+(u'+u'')) ∼ ((u+u')+u'')`
    AddAssoc,
    /// `(u·(u'·u'')) ∼ ((u·u')·u'')`
    MulAssoc,
    /// `(u·(u'+u'')) ∼ ((u·u')+(u·u''))`
    Distribute,
    /// `(0·u) ∼ 0`
    MulZero,
}

impl EtRule {
    pub const ALL: [EtRule; 12] = [
        EtRule::ZeroConst,
        EtRule::OneConst,
        EtRule::AddConst,
        EtRule::MulConst,
        EtRule::AddZero,
        EtRule::MulOne,
        EtRule::AddComm,
        EtRule::MulComm,
        EtRule::AddAssoc,
        EtRule::MulAssoc,
        EtRule::Distribute,
        EtRule::MulZero,
    ];

    /// The rule number, from -1 to 10.
    pub fn number(self) -> i8 {
        self as i8 - 1
    }

    pub fn from_number(n: i8) -> Option<EtRule> {
        usize::try_from(n + 1).ok().and_then(|i| EtRule::ALL.get(i).copied())
    }
}

impl fmt::Display for EtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ET{}", self.number())
    }
}

impl FromStr for EtRule {
    type Err = String;

    /// `ET9`, `ET-1` or a bare number.
    fn from_str(s: &str) -> Result<EtRule, String> {
        let n = s.strip_prefix("ET").unwrap_or(s);
        n.parse::<i8>()
            .ok()
            .and_then(EtRule::from_number)
            .ok_or_else(|| format!("unknown ring rule {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingTermError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("symbol {0:?} is not part of the ring signature")]
    ForeignSymbol(String),
    #[error("constant {literal}: {source}")]
    Constant { literal: String, source: RingError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no argument supplied for {0}")]
    MissingArgument(Var),
    #[error("symbol {0:?} cannot be evaluated in a ring")]
    ForeignSymbol(String),
    #[error("constant {0} is not an element of the coefficient ring")]
    BadConstant(String),
}

/// The term `c{r}` for a ring element `r`.
pub fn literal(r: &Scalar) -> Term {
    Term::constant(&format!("c{{{r}}}"))
}

/// The value of a constant literal, if `t` is one.
fn literal_value(t: &Term) -> Option<Result<Scalar, RingError>> {
    match t {
        Term::Const(s) if is_constant_literal(s.as_str()) => {
            let body = &s.as_str()[2..s.as_str().len() - 1];
            Some(body.parse::<Scalar>())
        }
        _ => None,
    }
}

fn is_literal(t: &Term) -> bool {
    matches!(t, Term::Const(s) if is_constant_literal(s.as_str()))
}

/// Parses a ring term and rewrites every constant literal to the canonical
/// spelling of its ring element (`c{8}` over ℤ_6 becomes `c{2}`).
pub fn parse_ring_term(word: &str, ring: &Ring) -> Result<Term, RingTermError> {
    canonicalize_ring_term(&parse(word, &Signature::ring())?, ring)
}

/// Checks that `t` uses only ring symbols and canonicalizes its literals.
pub fn canonicalize_ring_term(t: &Term, ring: &Ring) -> Result<Term, RingTermError> {
    Ok(match t {
        Term::Var(_) => t.clone(),
        Term::Const(s) if s.as_str() == ZERO || s.as_str() == ONE => t.clone(),
        Term::Const(s) => match literal_value(t) {
            Some(v) => {
                let err = |source| RingTermError::Constant { literal: s.to_string(), source };
                let v = v.map_err(err)?;
                literal(&ring.element(v.value()).map_err(err)?)
            }
            None => return Err(RingTermError::ForeignSymbol(s.to_string())),
        },
        Term::Binary(s, l, r) if s.as_str() == PLUS || s.as_str() == TIMES => Term::Binary(
            s.clone(),
            Box::new(canonicalize_ring_term(l, ring)?),
            Box::new(canonicalize_ring_term(r, ring)?),
        ),
        Term::Unary(s, _) | Term::Binary(s, _, _) | Term::Nary(s, _) => {
            return Err(RingTermError::ForeignSymbol(s.to_string()))
        }
    })
}

/// Structural evaluation: variables take `args[i-1]`, constants their image
/// in the algebra, `+` and `·` the algebra operations.
pub fn phi_eval<A: RAlgebra>(t: &Term, alg: &A, args: &[A::Elem]) -> Result<A::Elem, EvalError> {
    match t {
        Term::Var(v) => args
            .get(v.index() as usize - 1)
            .cloned()
            .ok_or(EvalError::MissingArgument(*v)),
        Term::Const(s) if s.as_str() == ZERO => Ok(alg.zero()),
        Term::Const(s) if s.as_str() == ONE => Ok(alg.one()),
        Term::Const(s) => match literal_value(t) {
            Some(Ok(v)) => {
                let r = alg
                    .coefficient_ring()
                    .element(v.value())
                    .map_err(|_| EvalError::BadConstant(s.to_string()))?;
                Ok(alg.constant(&r))
            }
            _ => Err(EvalError::ForeignSymbol(s.to_string())),
        },
        Term::Binary(s, l, r) if s.as_str() == PLUS => {
            Ok(alg.add(&phi_eval(l, alg, args)?, &phi_eval(r, alg, args)?))
        }
        Term::Binary(s, l, r) if s.as_str() == TIMES => {
            Ok(alg.mul(&phi_eval(l, alg, args)?, &phi_eval(r, alg, args)?))
        }
        Term::Unary(s, _) | Term::Binary(s, _, _) | Term::Nary(s, _) => {
            Err(EvalError::ForeignSymbol(s.to_string()))
        }
    }
}

/// Ψ: evaluation in `R[x_1, x_2, …]` with `x_i` sent to the variable
/// polynomial `x_i`. Panics if `t` is not a ring term over `ring`.
pub fn psi(t: &Term, ring: &Ring) -> StandardPolynomial {
    match t {
        Term::Var(v) => StandardPolynomial::variable(ring, v.index() as usize),
        Term::Const(s) if s.as_str() == ZERO => StandardPolynomial::zero(ring, Flavor::Unbounded),
        Term::Const(s) if s.as_str() == ONE => StandardPolynomial::one(ring, Flavor::Unbounded),
        Term::Const(s) => {
            let v = literal_value(t)
                .and_then(Result::ok)
                .unwrap_or_else(|| panic!("{s} is not a ring constant"));
            let r = ring.element(v.value()).unwrap_or_else(|e| panic!("{e}"));
            StandardPolynomial::constant(ring, Flavor::Unbounded, &r)
        }
        Term::Binary(s, l, r) if s.as_str() == PLUS => psi(l, ring).add(&psi(r, ring)).expect("same ring"),
        Term::Binary(s, l, r) if s.as_str() == TIMES => psi(l, ring).mul(&psi(r, ring)).expect("same ring"),
        _ => panic!("{t} is not a ring term"),
    }
}

/// `Ψ[t] = Ψ[u]`.
pub fn s_equivalent(t: &Term, u: &Term, ring: &Ring) -> bool {
    psi(t, ring) == psi(u, ring)
}

/// The rule system ET-1…ET10 over a fixed ring.
#[derive(Debug, Clone)]
pub struct EtRules {
    ring: Ring,
    patterns: BTreeMap<EtRule, PatternRule>,
}

impl EtRules {
    pub fn new(ring: &Ring) -> EtRules {
        let sig = Signature::ring();
        let p = |w: &str| parse(w, &sig).expect("rule pattern parses");
        let table = [
            (EtRule::ZeroConst, "0", "c{0}"),
            (EtRule::OneConst, "1", "c{1}"),
            (EtRule::AddZero, "(0+x1)", "x1"),
            (EtRule::MulOne, "(1·x1)", "x1"),
            (EtRule::AddComm, "(x1+x2)", "(x2+x1)"),
            (EtRule::MulComm, "(x1·x2)", "(x2·x1)"),
            (EtRule::AddAssoc, "(x1+(x2+x3))", "((x1+x2)+x3)"),
            (EtRule::MulAssoc, "(x1·(x2·x3))", "((x1·x2)·x3)"),
            (EtRule::Distribute, "(x1·(x2+x3))", "((x1·x2)+(x1·x3))"),
            (EtRule::MulZero, "(0·x1)", "0"),
        ];
        let patterns = table
            .into_iter()
            .map(|(rule, l, r)| (rule, PatternRule::new(p(l), p(r))))
            .collect();
        EtRules { ring: ring.clone(), patterns }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The ring operation of ET1 or ET2.
    fn const_op(&self, rule: EtRule, r: &Scalar, s: &Scalar) -> Scalar {
        match rule {
            EtRule::AddConst => self.ring.add(r, s),
            _ => self.ring.mul(r, s),
        }
    }

    fn ring_value(&self, t: &Term) -> Result<Option<Scalar>, RedexError> {
        match literal_value(t) {
            None => Ok(None),
            Some(v) => v
                .ok()
                .and_then(|v| self.ring.element(v.value()).ok())
                .map(Some)
                .ok_or_else(|| RedexError::BadConstant(t.to_string())),
        }
    }

    fn rewrite_constants(&self, slot: &mut Term, rule: EtRule, dir: Direction, bind: &Binding) -> Result<Binding, RedexError> {
        let op = if rule == EtRule::AddConst { PLUS } else { TIMES };
        match dir {
            Fwd => {
                let Term::Binary(s, l, r) = &*slot else { return Err(RedexError::Mismatch) };
                if s.as_str() != op {
                    return Err(RedexError::Mismatch);
                }
                let (Some(a), Some(b)) = (self.ring_value(l)?, self.ring_value(r)?) else {
                    return Err(RedexError::Mismatch);
                };
                if bind.r.as_ref().is_some_and(|x| *x != a) || bind.s.as_ref().is_some_and(|x| *x != b) {
                    return Err(RedexError::Mismatch);
                }
                *slot = literal(&self.const_op(rule, &a, &b));
                Ok(Binding::default().with_scalars(a, b))
            }
            Rev => {
                let Some(target) = self.ring_value(slot)? else { return Err(RedexError::Mismatch) };
                let r = bind.r.as_ref().ok_or(RedexError::MissingWitness("r"))?;
                let s = bind.s.as_ref().ok_or(RedexError::MissingWitness("s"))?;
                let (r, s) = match (self.ring.element(r.value()), self.ring.element(s.value())) {
                    (Ok(r), Ok(s)) => (r, s),
                    _ => return Err(RedexError::BadConstant(format!("{r}, {s}"))),
                };
                if self.const_op(rule, &r, &s) != target {
                    return Err(RedexError::Mismatch);
                }
                *slot = Term::binary(op, literal(&r), literal(&s));
                Ok(Binding::default().with_scalars(r, s))
            }
        }
    }
}

impl RuleSystem for EtRules {
    type Rule = EtRule;

    fn rewrite(&self, slot: &mut Term, rule: EtRule, dir: Direction, bind: &Binding) -> Result<Binding, RedexError> {
        match rule {
            EtRule::AddConst | EtRule::MulConst => self.rewrite_constants(slot, rule, dir, bind),
            _ => self.patterns[&rule].rewrite(slot, dir, bind),
        }
    }
}

pub type CertStep = Step<EtRule>;
pub type EtCertificate = Certificate<EtRule>;

/// Applies one elementary transformation.
pub fn apply_et(t: &Term, step: &CertStep, ring: &Ring) -> Result<Term, rewrite::RewriteError> {
    rewrite::apply(&EtRules::new(ring), t, step)
}

/// Replays the certificate step by step.
pub fn verify_certificate(cert: &EtCertificate, ring: &Ring) -> Verdict {
    rewrite::verify(&EtRules::new(ring), cert)
}

/// The standard monomial of an exponent vector:
/// `(x_{i1}·(x_{i2}·(…·x_{ik})))` with non-decreasing indices, or `1`.
pub fn standard_monomial(exp: &ExponentVector) -> Term {
    let mut vars: Vec<u32> = Vec::new();
    for (i, &e) in exp.entries().iter().enumerate() {
        vars.extend(core::iter::repeat(i as u32 + 1).take(e as usize));
    }
    let Some(last) = vars.pop() else { return Term::constant(ONE) };
    vars.iter().rev().fold(Term::var(last), |acc, &i| Term::binary(TIMES, Term::var(i), acc))
}

/// The type of a product of variables; `None` if `t` contains anything
/// other than variables and `·`.
fn monomial_type(t: &Term) -> Option<ExponentVector> {
    fn walk(t: &Term, counts: &mut Vec<u32>) -> bool {
        match t {
            Term::Var(v) => {
                let i = v.index() as usize;
                if counts.len() < i {
                    counts.resize(i, 0);
                }
                counts[i - 1] += 1;
                true
            }
            Term::Binary(s, l, r) if s.as_str() == TIMES => walk(l, counts) && walk(r, counts),
            _ => false,
        }
    }
    if t.has_head(ONE) && t.is_atomic() {
        return Some(ExponentVector::empty(Flavor::Unbounded));
    }
    let mut counts = Vec::new();
    walk(t, &mut counts).then(|| ExponentVector::unbounded(counts))
}

/// A standard term `Σ (c_{r_i}·μ_i)`: nonzero coefficients and pairwise
/// distinct monomial types. Summands are kept in graded-lexicographic order
/// of their types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardTerm {
    ring: Ring,
    summands: Vec<(ExponentVector, Scalar)>,
}

impl StandardTerm {
    /// The standard term whose carrier is `p`.
    pub fn from_carrier(p: &StandardPolynomial) -> StandardTerm {
        let summands = p.iter().map(|(e, c)| (e.to_unbounded(), c.clone())).collect();
        StandardTerm { ring: p.ring().clone(), summands }
    }

    /// Recognizes any standard term: every additive arrangement of summands
    /// `(c_r·μ)` where `μ` is a monomial of any bracketing.
    pub fn recognize(t: &Term, ring: &Ring) -> Option<StandardTerm> {
        if t.has_head(ZERO) && t.is_atomic() {
            return Some(StandardTerm { ring: ring.clone(), summands: Vec::new() });
        }
        let mut parts = Vec::new();
        collect_summands(t, &mut parts);
        let mut summands = Vec::new();
        for part in parts {
            let Term::Binary(s, c, mu) = part else { return None };
            if s.as_str() != TIMES {
                return None;
            }
            let r = literal_value(c)?.ok()?;
            if !ring.contains(&r) || r.is_zero() {
                return None;
            }
            summands.push((monomial_type(mu)?, r));
        }
        summands.sort();
        if summands.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(StandardTerm { ring: ring.clone(), summands })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> &[(ExponentVector, Scalar)] {
        &self.summands
    }

    /// `S[t] = {(m̄(i), r_i)}`.
    pub fn carrier(&self) -> StandardPolynomial {
        StandardPolynomial::from_terms(
            &self.ring,
            Flavor::Unbounded,
            self.summands.iter().map(|(e, r)| (e.entries().to_vec(), r.clone())),
        )
        .expect("summands are valid")
    }

    /// The canonical representative: a right-nested sum in graded-lex order
    /// of `(c_r·μ)` with standard monomials `μ`; `0` when empty.
    pub fn to_term(&self) -> Term {
        let mut parts = self
            .summands
            .iter()
            .map(|(e, r)| Term::binary(TIMES, literal(r), standard_monomial(e)));
        let Some(last) = parts.next_back() else { return Term::constant(ZERO) };
        parts.rev().fold(last, |acc, s| Term::binary(PLUS, s, acc))
    }
}

fn collect_summands<'t>(t: &'t Term, out: &mut Vec<&'t Term>) {
    match t {
        Term::Binary(s, l, r) if s.as_str() == PLUS => {
            collect_summands(l, out);
            collect_summands(r, out);
        }
        _ => out.push(t),
    }
}

/// `(dep(v), k)` for the deepest d-subterms `v = (v1·v2)` with an additive
/// `v_i`, and their number `k`; `None` when there is no d-subterm.
pub fn reduction_pair(t: &Term) -> Option<(usize, usize)> {
    fn walk(t: &Term, best: &mut Option<(usize, usize)>) -> usize {
        let d = t.children().map(|c| walk(c, best) + 1).max().unwrap_or(0);
        if is_d_subterm(t) {
            *best = match *best {
                Some((bd, k)) if bd == d => Some((d, k + 1)),
                Some((bd, k)) if bd > d => Some((bd, k)),
                _ => Some((d, 1)),
            };
        }
        d
    }
    let mut best = None;
    walk(t, &mut best);
    best
}

fn is_d_subterm(t: &Term) -> bool {
    match t {
        Term::Binary(s, l, r) if s.as_str() == TIMES => l.has_head(PLUS) || r.has_head(PLUS),
        _ => false,
    }
}

/// Polynomial interpretation `[a] = 2` for atoms, `[a+b] = [a]+[b]+1`,
/// `[a·b] = [a]·[b]`. Distribution strictly decreases it and commutation
/// keeps it, so it bounds the number of distribution steps.
pub fn distribution_weight(t: &Term) -> BigUint {
    rewrite::product_weight(t, TIMES)
}

/// Output of [`normalize_to_standard`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub standard: StandardTerm,
    /// The canonical term of `standard`; equal to `certificate.target`.
    pub term: Term,
    pub certificate: EtCertificate,
    /// Distribution weight before each distribution step and at the end of
    /// that phase; strictly decreasing.
    pub descent: Vec<BigUint>,
    /// The reduction pair before each distribution step and at the end of
    /// that phase.
    pub reduction_pairs: Vec<Option<(usize, usize)>>,
}

fn factor_key(t: &Term) -> (u8, u32) {
    match t {
        Term::Var(v) => (1, v.index()),
        _ => (0, 0),
    }
}

/// Brings a product of variables at `base` to its standard monomial with
/// ET6 and ET8 only.
fn standardize_monomial_at(rec: &mut Recorder<'_, EtRules>, base: &[usize]) {
    flatten_comb(rec, base, TIMES, EtRule::MulAssoc);
    sort_comb(rec, base, TIMES, EtRule::MulAssoc, EtRule::MulComm, factor_key);
}

/// A certificate from a monomial (a product of variables) to the standard
/// monomial of its type, using only ET6 and ET8.
pub fn standardize_monomial(mu: &Term, ring: &Ring) -> EtCertificate {
    assert!(monomial_type(mu).is_some(), "{mu} is not a monomial");
    let rules = EtRules::new(ring);
    let mut rec = Recorder::new(&rules, mu.clone());
    standardize_monomial_at(&mut rec, &[]);
    rec.finish()
}

/// Turns the product summand at `base` into `(c_r·μ)` with `μ` standard.
fn normalize_product(rec: &mut Recorder<'_, EtRules>, base: &[usize]) {
    if let Term::Binary(s, c, mu) = rec.at(base) {
        if s.as_str() == TIMES && is_literal(c) && monomial_type(mu).is_some() {
            if !mu.is_atomic() {
                standardize_monomial_at(rec, &[base, &[2]].concat());
            }
            return;
        }
    }
    // 0 and 1 become literals so that all constants fold with ET2
    let leaves: Vec<Vec<usize>> = rec.at(base)
        .positions()
        .into_iter()
        .filter(|p| {
            let t = rec.at(&[base, p.as_slice()].concat());
            t.is_atomic() && (t.has_head(ZERO) || t.has_head(ONE))
        })
        .map(|p| [base, p.as_slice()].concat())
        .collect();
    for p in leaves {
        let rule = if rec.at(&p).has_head(ZERO) { EtRule::ZeroConst } else { EtRule::OneConst };
        rec.step(rule, &p, Fwd);
    }
    flatten_comb(rec, base, TIMES, EtRule::MulAssoc);
    sort_comb(rec, base, TIMES, EtRule::MulAssoc, EtRule::MulComm, factor_key);
    loop {
        let factors = comb_elements(rec.at(base), TIMES);
        if factors.len() < 2 || !is_literal(factors[0]) || !is_literal(factors[1]) {
            break;
        }
        if factors.len() == 2 {
            rec.step(EtRule::MulConst, base, Fwd);
        } else {
            rec.step(EtRule::MulAssoc, base, Fwd);
            rec.step(EtRule::MulConst, &[base, &[1]].concat(), Fwd);
        }
    }
    let factors = comb_elements(rec.at(base), TIMES);
    let (k, has_const) = (factors.len(), is_literal(factors[0]));
    if has_const && k == 1 {
        rec.step(EtRule::MulOne, base, Rev);
        rec.step(EtRule::MulComm, base, Fwd);
    } else if !has_const {
        rec.step(EtRule::MulOne, base, Rev);
        rec.step(EtRule::OneConst, &[base, &[1]].concat(), Fwd);
    }
}

fn summand_type(t: &Term) -> ExponentVector {
    match t {
        Term::Binary(_, _, mu) => monomial_type(mu).expect("summand is (c·μ)"),
        _ => unreachable!("summand is (c·μ)"),
    }
}

fn summand_coefficient(t: &Term) -> Scalar {
    match t {
        Term::Binary(_, c, _) => literal_value(c).and_then(Result::ok).expect("summand is (c·μ)"),
        _ => unreachable!("summand is (c·μ)"),
    }
}

/// Reduces `t` to its canonical standard term, recording every step.
///
/// Phases: distribute products over sums (ET6, ET9); bring each product to
/// `(c_r·μ)` with a standard monomial `μ` (ET-1, ET0, ET2, ET4, ET6, ET8);
/// reassociate and sort the sum and merge equal types (ET1, ET5, ET6, ET7,
/// ET9); remove zero coefficients (ET-1, ET10, ET3, ET5).
///
/// Panics if `t` is not a ring term with canonical literals (see
/// [`canonicalize_ring_term`]).
pub fn normalize_to_standard(t: &Term, ring: &Ring) -> Normalized {
    let rules = EtRules::new(ring);
    let mut rec = Recorder::new(&rules, t.clone());
    let mut descent = Vec::new();
    let mut reduction_pairs = Vec::new();

    if let Some(st) = StandardTerm::recognize(t, ring) {
        if st.to_term() == *t {
            return Normalized {
                term: t.clone(),
                standard: st,
                certificate: rec.finish(),
                descent: vec![distribution_weight(t)],
                reduction_pairs: vec![reduction_pair(t)],
            };
        }
    }

    loop {
        let weight = distribution_weight(rec.term());
        if let Some(prev) = descent.last() {
            assert!(weight < *prev, "distribution weight must strictly decrease");
        }
        descent.push(weight);
        reduction_pairs.push(reduction_pair(rec.term()));
        let Some(pos) = deepest_d_subterm(rec.term()) else { break };
        if !rec.at(&pos).child(2).is_some_and(|r| r.has_head(PLUS)) {
            rec.step(EtRule::MulComm, &pos, Fwd);
        }
        rec.step(EtRule::Distribute, &pos, Fwd);
    }

    let mut summands = Vec::new();
    summand_positions(rec.term(), &mut Vec::new(), &mut summands);
    for p in &summands {
        normalize_product(&mut rec, p);
    }

    flatten_comb(&mut rec, &[], PLUS, EtRule::AddAssoc);
    sort_comb(&mut rec, &[], PLUS, EtRule::AddAssoc, EtRule::AddComm, summand_type);
    loop {
        let types: Vec<ExponentVector> = comb_elements(rec.term(), PLUS).into_iter().map(summand_type).collect();
        let Some(i) = (0..types.len().saturating_sub(1)).find(|&i| types[i] == types[i + 1]) else {
            break;
        };
        let mut q = spine(&[], i);
        if i + 2 < types.len() {
            rec.step(EtRule::AddAssoc, &q, Fwd);
            q.push(1);
        }
        let q1 = [q.as_slice(), &[1]].concat();
        let q2 = [q.as_slice(), &[2]].concat();
        rec.step(EtRule::MulComm, &q1, Fwd);
        rec.step(EtRule::MulComm, &q2, Fwd);
        rec.step(EtRule::Distribute, &q, Rev);
        rec.step(EtRule::AddConst, &q2, Fwd);
        rec.step(EtRule::MulComm, &q, Fwd);
    }

    loop {
        let parts = comb_elements(rec.term(), PLUS);
        let k = parts.len();
        if parts.len() == 1 && parts[0].is_atomic() {
            break; // the term 0
        }
        let Some(i) = parts.iter().position(|s| summand_coefficient(s).is_zero()) else { break };
        let p = comb_element(&[], i, k);
        rec.step(EtRule::ZeroConst, &[p.as_slice(), &[1]].concat(), Rev);
        rec.step(EtRule::MulZero, &p, Fwd);
        if k == 1 {
            continue;
        }
        if i + 1 < k {
            rec.step(EtRule::AddZero, &spine(&[], i), Fwd);
        } else {
            let parent = spine(&[], i - 1);
            rec.step(EtRule::AddComm, &parent, Fwd);
            rec.step(EtRule::AddZero, &parent, Fwd);
        }
    }

    let certificate = rec.finish();
    let standard = StandardTerm::recognize(&certificate.target, ring).expect("normal form is a standard term");
    debug_assert_eq!(standard.to_term(), certificate.target);
    Normalized { term: certificate.target.clone(), standard, certificate, descent, reduction_pairs }
}

fn deepest_d_subterm(t: &Term) -> Option<Vec<usize>> {
    fn walk(t: &Term, path: &mut Vec<usize>, best: &mut Option<(usize, Vec<usize>)>) -> usize {
        let mut d = 0;
        for i in 1..=t.arity() {
            path.push(i);
            d = d.max(walk(t.child(i).expect("child"), path, best) + 1);
            path.pop();
        }
        if is_d_subterm(t) {
            // strictly greater keeps the leftmost in position order
            let better = match best {
                Some((bd, bp)) => d > *bd || (d == *bd && path.as_slice() < bp.as_slice()),
                None => true,
            };
            if better {
                *best = Some((d, path.clone()));
            }
        }
        d
    }
    let mut best = None;
    walk(t, &mut Vec::new(), &mut best);
    best.map(|(_, p)| p)
}

fn summand_positions(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if t.has_head(PLUS) {
        for i in 1..=2 {
            path.push(i);
            summand_positions(t.child(i).expect("binary"), path, out);
            path.pop();
        }
    } else {
        out.push(path.clone());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the terms are not s-equivalent")]
pub struct NotEquivalent;

/// A certificate `t → u` when `Ψ[t] = Ψ[u]`: the reduction of `t` to its
/// standard term followed by the reversed reduction of `u`. Both
/// reductions end in the same canonical term because it depends only on
/// the carrier.
pub fn f_equivalence_certificate(t: &Term, u: &Term, ring: &Ring) -> Result<EtCertificate, NotEquivalent> {
    if !s_equivalent(t, u, ring) {
        return Err(NotEquivalent);
    }
    let nt = normalize_to_standard(t, ring);
    let nu = normalize_to_standard(u, ring);
    assert_eq!(nt.term, nu.term, "equal carriers give equal canonical terms");
    Ok(nt.certificate.then(nu.certificate.reversed()))
}

/// A certificate between two standard terms with the same carrier; only
/// ET5…ET8 are used.
pub fn standard_bridge(t: &Term, u: &Term, ring: &Ring) -> Option<EtCertificate> {
    let a = StandardTerm::recognize(t, ring)?;
    let b = StandardTerm::recognize(u, ring)?;
    if a != b {
        return None;
    }
    let nt = normalize_to_standard(t, ring);
    let nu = normalize_to_standard(u, ring);
    Some(nt.certificate.then(nu.certificate.reversed()))
}

/// Enumerates every additive n-monomial (each of `x_1 … x_n` exactly once,
/// joined by `+` in any bracketing) and returns how many there are.
pub fn count_additive_monomials(n: u32) -> usize {
    assert!(n >= 1);
    let vars: Vec<u32> = (1..=n).collect();
    let mut all = BTreeSet::new();
    for t in additive_monomials(&vars) {
        all.insert(t.serialize());
    }
    all.len()
}

/// All sums over exactly the given variables.
pub fn additive_monomials(vars: &[u32]) -> Vec<Term> {
    if vars.len() == 1 {
        return vec![Term::var(vars[0])];
    }
    let mut out = Vec::new();
    let n = vars.len();
    for mask in 1..(1u32 << n) - 1 {
        let (left, right): (Vec<u32>, Vec<u32>) = {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for (i, &v) in vars.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    l.push(v)
                } else {
                    r.push(v)
                }
            }
            (l, r)
        };
        let rs = additive_monomials(&right);
        for a in additive_monomials(&left) {
            for b in &rs {
                out.push(Term::binary(PLUS, a.clone(), b.clone()));
            }
        }
    }
    out
}
