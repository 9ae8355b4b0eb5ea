//! Sparse standard polynomials: finite maps from exponent vectors to
//! nonzero coefficients.
//!
//! Two flavors of exponent vector exist. [`Flavor::Unbounded`] vectors are
//! words over ℕ₀ whose last entry is nonzero (the empty vector is the
//! exponent of the constant monomial); they describe polynomials in
//! arbitrarily many variables. [`Flavor::Fixed`] vectors have exactly `n`
//! entries.

use core::cmp::Ordering;
use core::fmt;

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::prelude::*;
use crate::ring::{RAlgebra, Ring, RingSpec, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Unbounded,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("exponent vectors of different flavors: {0:?} and {1:?}")]
    FlavorMismatch(Flavor, Flavor),
    #[error("polynomials over different rings: {0} and {1}")]
    RingMismatch(String, String),
    #[error("exponent vector {entries:?} is not valid for flavor {flavor:?}")]
    InvalidExponent { entries: Vec<u32>, flavor: Flavor },
    #[error("coefficient {0} is not an element of the ring")]
    InvalidCoefficient(String),
}

/// An exponent vector. Ordered graded-lexicographically: by total degree,
/// then lexicographically on the zero-extended entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    entries: Vec<u32>,
    flavor: Flavor,
}

impl ExponentVector {
    pub fn new(entries: Vec<u32>, flavor: Flavor) -> Result<Self, PolyError> {
        let ok = match flavor {
            Flavor::Unbounded => entries.last() != Some(&0),
            Flavor::Fixed(n) => entries.len() == n,
        };
        if ok {
            Ok(ExponentVector { entries, flavor })
        } else {
            Err(PolyError::InvalidExponent { entries, flavor })
        }
    }

    /// Unbounded flavor; trailing zeros are stripped.
    pub fn unbounded(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        ExponentVector { entries, flavor: Flavor::Unbounded }
    }

    /// The exponent of the constant monomial.
    pub fn empty(flavor: Flavor) -> Self {
        let entries = match flavor {
            Flavor::Unbounded => Vec::new(),
            Flavor::Fixed(n) => vec![0; n],
        };
        ExponentVector { entries, flavor }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Exponent of `x_i` (1-based); 0 past the end.
    pub fn exponent(&self, i: usize) -> u32 {
        i.checked_sub(1).and_then(|k| self.entries.get(k)).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u64 {
        self.entries.iter().map(|&e| u64::from(e)).sum()
    }

    /// The same monomial in the unbounded flavor.
    pub fn to_unbounded(&self) -> ExponentVector {
        ExponentVector::unbounded(self.entries.clone())
    }
}

/// Componentwise sum, zero-extending the shorter vector.
pub fn exp_add(k: &ExponentVector, l: &ExponentVector) -> Result<ExponentVector, PolyError> {
    if k.flavor != l.flavor {
        return Err(PolyError::FlavorMismatch(k.flavor, l.flavor));
    }
    let (long, short) = if k.entries.len() >= l.entries.len() { (k, l) } else { (l, k) };
    let mut entries = long.entries.clone();
    for (e, s) in entries.iter_mut().zip(&short.entries) {
        *e += s;
    }
    Ok(ExponentVector { entries, flavor: k.flavor })
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.entries.len().max(other.entries.len());
            (1..=n)
                .map(|i| self.exponent(i).cmp(&other.exponent(i)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// A standard polynomial over `ring`. No stored coefficient is zero, so the
/// map is unique for the polynomial it denotes.
#[derive(Clone, PartialEq, Eq)]
pub struct StandardPolynomial {
    ring: Ring,
    flavor: Flavor,
    terms: BTreeMap<ExponentVector, Scalar>,
}

impl StandardPolynomial {
    pub fn zero(ring: &Ring, flavor: Flavor) -> Self {
        StandardPolynomial { ring: ring.clone(), flavor, terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring, flavor: Flavor) -> Self {
        Self::constant(ring, flavor, &ring.one())
    }

    /// `{(∅, r)}`, or the empty map when `r` is zero. Panics if `r` is not a
    /// canonical element of `ring`.
    pub fn constant(ring: &Ring, flavor: Flavor, r: &Scalar) -> Self {
        assert!(ring.contains(r), "{r} is not an element of {ring}");
        let mut p = Self::zero(ring, flavor);
        if !r.is_zero() {
            p.terms.insert(ExponentVector::empty(flavor), r.clone());
        }
        p
    }

    /// `x_i` in arbitrarily many variables: exponent `(0,…,0,1)` of length `i`.
    pub fn variable(ring: &Ring, i: usize) -> Self {
        assert!(i >= 1, "variable indices start at 1");
        let mut entries = vec![0; i];
        entries[i - 1] = 1;
        Self::monomial(ring, ExponentVector { entries, flavor: Flavor::Unbounded }, ring.one())
    }

    /// `x_i` in `R[x_1, …, x_n]`.
    pub fn variable_fixed(ring: &Ring, n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "variable index out of range");
        let mut entries = vec![0; n];
        entries[i - 1] = 1;
        Self::monomial(ring, ExponentVector { entries, flavor: Flavor::Fixed(n) }, ring.one())
    }

    fn monomial(ring: &Ring, exp: ExponentVector, coef: Scalar) -> Self {
        let flavor = exp.flavor;
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp, coef);
        }
        StandardPolynomial { ring: ring.clone(), flavor, terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Entries with
    /// equal exponents are summed and zero coefficients are dropped.
    pub fn from_terms(
        ring: &Ring,
        flavor: Flavor,
        terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(ring, flavor);
        for (entries, coef) in terms {
            if !ring.contains(&coef) {
                return Err(PolyError::InvalidCoefficient(coef.to_string()));
            }
            let exp = ExponentVector::new(entries, flavor)?;
            p.add_term(exp, coef);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: ExponentVector, coef: Scalar) {
        match self.terms.entry(exp) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                if !coef.is_zero() {
                    v.insert(coef);
                }
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = self.ring.add(o.get(), &coef);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials with nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> Option<&Scalar> {
        self.terms.get(exp)
    }

    /// Terms in graded-lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&ExponentVector, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        if self.flavor != other.flavor {
            return Err(PolyError::FlavorMismatch(self.flavor, other.flavor));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (exp, coef) in &other.terms {
            out.add_term(exp.clone(), coef.clone());
        }
        Ok(out)
    }

    /// Accumulates the products of all support pairs; the result equals the
    /// convolution formula since every other exponent gets an empty sum.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = Self::zero(&self.ring, self.flavor);
        for (k, a) in &self.terms {
            for (l, b) in &other.terms {
                let exp = exp_add(k, l).expect("flavors checked");
                out.add_term(exp, self.ring.mul(a, b));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), self.ring.neg(c)))
            .collect();
        StandardPolynomial { ring: self.ring.clone(), flavor: self.flavor, terms }
    }

    /// Embeds a fixed-width polynomial into arbitrarily many variables.
    pub fn to_unbounded(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.to_unbounded(), c.clone()))
            .collect();
        StandardPolynomial { ring: self.ring.clone(), flavor: Flavor::Unbounded, terms }
    }

    /// Largest index of a variable with a positive exponent.
    pub fn max_var(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.entries.iter().rposition(|&x| x > 0).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0)
    }
}

fn subscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

fn superscript(n: u32) -> String {
    n.to_string()
        .chars()
        .map(|c| match c {
            '1' => '¹',
            '2' => '²',
            '3' => '³',
            d => char::from_u32(0x2070 + d.to_digit(10).unwrap()).unwrap(),
        })
        .collect()
}

/// Human form such as `3 − x₂² + x₁x₃³`; the zero polynomial is `0`.
impl fmt::Display for StandardPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (exp, coef)) in self.terms.iter().enumerate() {
            let negative = coef.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("−")?,
                (0, false) => {}
                (_, true) => f.write_str(" − ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = if negative { self.ring.neg(coef) } else { coef.clone() };
            let vars: String = exp
                .entries
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let pow = if e > 1 { superscript(e) } else { String::new() };
                    format!("x{}{}", subscript(i + 1), pow)
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&vars)?;
            } else if abs.is_integer() {
                write!(f, "{abs}{vars}")?;
            } else {
                write!(f, "({abs}){vars}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for StandardPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (exp, coef)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({exp:?}, {coef})")?;
        }
        write!(f, "}} over {}", self.ring)
    }
}

/// `R[x_1, x_2, …]` as a ring, with a sampler of sparse polynomials.
#[derive(Debug, Clone)]
pub struct PolyRing {
    pub ring: Ring,
    pub max_terms: usize,
    pub max_exponent: u32,
    pub max_vars: usize,
}

impl PolyRing {
    pub fn new(ring: Ring) -> Self {
        PolyRing { ring, max_terms: 8, max_exponent: 5, max_vars: 4 }
    }

    pub fn random_polynomial<G: Rng + ?Sized>(&self, rng: &mut G) -> StandardPolynomial {
        let n = rng.gen_range(0..=self.max_terms);
        let terms = (0..n).map(|_| {
            let vars = rng.gen_range(0..=self.max_vars);
            let exp: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=self.max_exponent)).collect();
            (ExponentVector::unbounded(exp).entries, self.ring.sample_element(rng))
        });
        let terms: Vec<_> = terms.collect();
        StandardPolynomial::from_terms(&self.ring, Flavor::Unbounded, terms)
            .expect("sampled terms are valid")
    }
}

impl RingSpec for PolyRing {
    type Elem = StandardPolynomial;

    fn zero(&self) -> StandardPolynomial {
        StandardPolynomial::zero(&self.ring, Flavor::Unbounded)
    }
    fn one(&self) -> StandardPolynomial {
        StandardPolynomial::one(&self.ring, Flavor::Unbounded)
    }
    fn add(&self, a: &StandardPolynomial, b: &StandardPolynomial) -> StandardPolynomial {
        a.add(b).expect("same ring and flavor")
    }
    fn mul(&self, a: &StandardPolynomial, b: &StandardPolynomial) -> StandardPolynomial {
        a.mul(b).expect("same ring and flavor")
    }
    fn neg(&self, a: &StandardPolynomial) -> StandardPolynomial {
        a.neg()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> StandardPolynomial {
        self.random_polynomial(rng)
    }
}

impl RAlgebra for PolyRing {
    fn coefficient_ring(&self) -> &Ring {
        &self.ring
    }
    fn constant(&self, r: &Scalar) -> StandardPolynomial {
        StandardPolynomial::constant(&self.ring, Flavor::Unbounded, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(ring: &Ring, terms: &[(&[u32], i64)]) -> StandardPolynomial {
        StandardPolynomial::from_terms(
            ring,
            Flavor::Unbounded,
            terms.iter().map(|(e, c)| (e.to_vec(), ring.element(Scalar::from_int(*c).value()).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn exponent_sums() {
        let u = |v: &[u32]| ExponentVector::new(v.to_vec(), Flavor::Unbounded).unwrap();
        assert_eq!(exp_add(&u(&[]), &u(&[0, 2])).unwrap(), u(&[0, 2]));
        assert_eq!(exp_add(&u(&[1, 0, 3]), &u(&[0, 2])).unwrap(), u(&[1, 2, 3]));
        assert_eq!(exp_add(&u(&[1]), &u(&[1])).unwrap(), u(&[2]));
        let fixed = ExponentVector::new(vec![1, 0], Flavor::Fixed(2)).unwrap();
        assert!(matches!(exp_add(&u(&[1]), &fixed), Err(PolyError::FlavorMismatch(..))));
        assert!(ExponentVector::new(vec![1, 0], Flavor::Unbounded).is_err());
    }

    #[test]
    fn graded_lex_order() {
        let u = ExponentVector::unbounded;
        let mut v = vec![u(vec![1, 0, 3]), u(vec![0, 2]), u(vec![]), u(vec![1]), u(vec![0, 1])];
        v.sort();
        assert_eq!(v, vec![u(vec![]), u(vec![0, 1]), u(vec![1]), u(vec![0, 2]), u(vec![1, 0, 3])]);
    }

    #[test]
    fn sum_cancels_shared_key() {
        let z = Ring::Integers;
        let a = p(&z, &[(&[], 3), (&[0, 2], -1), (&[1, 0, 3], 1)]);
        assert_eq!(a.to_string(), "3 − x₂² + x₁x₃³");
        let b = p(&z, &[(&[0, 2], 1)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s, p(&z, &[(&[], 3), (&[1, 0, 3], 1)]));
        assert!(s.coefficient(&ExponentVector::unbounded(vec![0, 2])).is_none());
        assert_eq!(a.add(&StandardPolynomial::zero(&z, Flavor::Unbounded)).unwrap(), a);
        assert_eq!(a.neg().to_string(), "−3 + x₂² − x₁x₃³");
        assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn characteristic_two() {
        let z2 = Ring::modular(2);
        let x1 = StandardPolynomial::variable(&z2, 1);
        assert!(x1.add(&x1).unwrap().is_zero());
        let s = x1.add(&StandardPolynomial::variable(&z2, 2)).unwrap();
        assert_eq!(s.mul(&s).unwrap(), p(&z2, &[(&[2], 1), (&[0, 2], 1)]));
        assert_eq!(s.neg(), s);
    }

    #[test]
    fn constants_and_variables() {
        let z = Ring::Integers;
        assert_eq!(
            StandardPolynomial::constant(&z, Flavor::Unbounded, &Scalar::from_int(2)),
            p(&z, &[(&[], 2)])
        );
        assert!(StandardPolynomial::constant(&z, Flavor::Unbounded, &z.zero()).is_zero());
        assert_eq!(StandardPolynomial::variable(&z, 3), p(&z, &[(&[0, 0, 1], 1)]));
        assert_eq!(StandardPolynomial::variable(&z, 5).to_string(), "x₅");
        assert_eq!(StandardPolynomial::zero(&z, Flavor::Unbounded).to_string(), "0");
    }

    #[test]
    fn ring_mismatch() {
        let a = StandardPolynomial::variable(&Ring::Integers, 1);
        let b = StandardPolynomial::variable(&Ring::modular(2), 1);
        assert!(matches!(a.add(&b), Err(PolyError::RingMismatch(..))));
        assert!(matches!(a.mul(&b), Err(PolyError::RingMismatch(..))));
    }

    #[test]
    fn rational_rendering() {
        let q = Ring::Rationals;
        let a = StandardPolynomial::from_terms(&q, Flavor::Unbounded, [(vec![1], Scalar::ratio(-3, 7))]).unwrap();
        assert_eq!(a.to_string(), "−(3/7)x₁");
        assert_eq!(format!("{a:?}"), "{((1), -3/7)} over Q");
    }
}
