//! Commutative rings with identity: the coefficient rings ℤ, ℤ_m and ℚ, the
//! [`RingSpec`] abstraction used by the property suites, and the axiom
//! checks themselves.

use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::prelude::*;

/// An exact ring element. For ℤ and ℤ_m the value is an integer (a reduced
/// representative in `[0, m)` for ℤ_m); for ℚ it is a rational in lowest
/// terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn from_int(n: i64) -> Scalar {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: BigRational) -> Scalar {
        Scalar(q)
    }

    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar(BigRational::new(num.into(), den.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = RingError;

    /// `"-3"`, `"7"` or `"-3/7"`; the value is reduced to lowest terms.
    fn from_str(s: &str) -> Result<Scalar, RingError> {
        let bad = || RingError::BadScalar(s.into());
        let int = |p: &str| -> Result<BigInt, RingError> {
            let p = p.trim();
            let digits = p.strip_prefix(['-', '+']).unwrap_or(p);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            p.parse::<BigInt>().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Scalar(BigRational::from_integer(int(s)?))),
            Some((n, d)) => {
                let (n, d) = (int(n)?, int(d)?);
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar(BigRational::new(n, d)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown ring {0:?}; expected Z, Zm:<m> or Q")]
    UnknownRing(String),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("malformed ring element {0:?}")]
    BadScalar(String),
    #[error("{value} is not an element of {ring}")]
    NotInRing { value: String, ring: String },
}

/// The concrete coefficient rings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    /// Residues modulo `m >= 2`.
    Modular(BigInt),
    Rationals,
}

impl Ring {
    pub fn modular(m: u64) -> Ring {
        assert!(m >= 2, "modulus must be at least 2");
        Ring::Modular(BigInt::from(m))
    }

    /// `Z`, `Zm:<m>` or `Q`.
    pub fn parse(s: &str) -> Result<Ring, RingError> {
        match s.trim() {
            "Z" => Ok(Ring::Integers),
            "Q" => Ok(Ring::Rationals),
            other => {
                let m = other
                    .strip_prefix("Zm:")
                    .and_then(|m| m.parse::<BigInt>().ok())
                    .ok_or_else(|| RingError::UnknownRing(s.into()))?;
                if m < BigInt::from(2) {
                    return Err(RingError::BadModulus(m));
                }
                Ok(Ring::Modular(m))
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::from_int(0)
    }

    pub fn one(&self) -> Scalar {
        Scalar::from_int(1)
    }

    /// Maps an exact value into the ring: integers only for ℤ, integers and
    /// rationals whose denominator is a unit for ℤ_m (reduced to `[0, m)`),
    /// anything for ℚ.
    pub fn element(&self, q: &BigRational) -> Result<Scalar, RingError> {
        let not_in = || RingError::NotInRing { value: Scalar(q.clone()).to_string(), ring: self.to_string() };
        match self {
            Ring::Rationals => Ok(Scalar(q.clone())),
            Ring::Integers => q.is_integer().then(|| Scalar(q.clone())).ok_or_else(not_in),
            Ring::Modular(m) => {
                let num = q.numer().mod_floor(m);
                let den = q.denom().mod_floor(m);
                let inv = mod_inverse(&den, m).ok_or_else(not_in)?;
                Ok(Scalar(BigRational::from_integer((num * inv).mod_floor(m))))
            }
        }
    }

    /// True when `r` is already a canonical element of this ring.
    pub fn contains(&self, r: &Scalar) -> bool {
        match self {
            Ring::Rationals => true,
            Ring::Integers => r.is_integer(),
            Ring::Modular(m) => {
                r.is_integer() && !r.is_negative() && r.0.numer() < m
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<Scalar, RingError> {
        self.element(&s.parse::<Scalar>()?.0)
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 + &b.0)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 * &b.0)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-&a.0)
    }

    fn reduce(&self, q: BigRational) -> Scalar {
        match self {
            Ring::Modular(m) => Scalar(BigRational::from_integer(q.to_integer().mod_floor(m))),
            _ => Scalar(q),
        }
    }

    /// A random element: all of ℤ_m, small integers for ℤ, small fractions
    /// for ℚ.
    pub fn sample_element<G: Rng + ?Sized>(&self, rng: &mut G) -> Scalar {
        match self {
            Ring::Integers => Scalar::from_int(rng.gen_range(-50..=50)),
            Ring::Rationals => Scalar::ratio(rng.gen_range(-30..=30), rng.gen_range(1..=12)),
            Ring::Modular(m) => {
                let bits = m.bits();
                loop {
                    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
                    rng.fill_bytes(&mut bytes);
                    let candidate = BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes)
                        % (BigInt::one() << bits);
                    if &candidate < m {
                        return Scalar(BigRational::from_integer(candidate));
                    }
                }
            }
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => f.write_str("Z"),
            Ring::Rationals => f.write_str("Q"),
            Ring::Modular(m) => write!(f, "Zm:{m}"),
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Ring {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Ring, RingError> {
        Ring::parse(s)
    }
}

/// A commutative ring with identity given by its operations and a sampler
/// of carrier elements.
pub trait RingSpec {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
}

/// A ring together with a structure map from the coefficient ring: the
/// image of each coefficient `r`, used to evaluate constant symbols `c_r`.
pub trait RAlgebra: RingSpec {
    fn coefficient_ring(&self) -> &Ring;
    /// `r` must be an element of [`RAlgebra::coefficient_ring`].
    fn constant(&self, r: &Scalar) -> Self::Elem;
}

impl RingSpec for Ring {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        Ring::zero(self)
    }
    fn one(&self) -> Scalar {
        Ring::one(self)
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Ring::add(self, a, b)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Ring::mul(self, a, b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        Ring::neg(self, a)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Scalar {
        self.sample_element(rng)
    }
}

impl RAlgebra for Ring {
    fn coefficient_ring(&self) -> &Ring {
        self
    }
    fn constant(&self, r: &Scalar) -> Scalar {
        self.element(&r.0).expect("constant is an element of the ring")
    }
}

/// The eight checked axiom families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    AddAssociative,
    AddCommutative,
    AddIdentity,
    AddInverse,
    MulAssociative,
    MulCommutative,
    MulIdentity,
    Distributive,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::AddAssociative,
        Axiom::AddCommutative,
        Axiom::AddIdentity,
        Axiom::AddInverse,
        Axiom::MulAssociative,
        Axiom::MulCommutative,
        Axiom::MulIdentity,
        Axiom::Distributive,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub axiom: Axiom,
    /// The sampled elements, in `Debug` form.
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    /// Number of checked instances per family.
    pub checked: BTreeMap<Axiom, usize>,
    /// At most one counterexample per family is kept.
    pub counterexamples: Vec<Counterexample>,
    pub zero_is_one: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && !self.zero_is_one
    }

    fn record(&mut self, axiom: Axiom, ok: bool, witness: impl FnOnce() -> String) {
        *self.checked.entry(axiom).or_insert(0) += 1;
        if !ok && !self.counterexamples.iter().any(|c| c.axiom == axiom) {
            self.counterexamples.push(Counterexample { axiom, witness: witness() });
        }
    }
}

/// Checks every axiom family on `samples` random triples; distributivity is
/// checked on three times as many.
pub fn ring_axiom_suite<S: RingSpec>(spec: &S, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport { zero_is_one: spec.zero() == spec.one(), ..Default::default() };
    let (zero, one) = (spec.zero(), spec.one());
    for _ in 0..samples {
        let a = spec.sample(&mut rng);
        let b = spec.sample(&mut rng);
        let c = spec.sample(&mut rng);
        let w = || format!("a={a:?}, b={b:?}, c={c:?}");
        let lhs = spec.add(&a, &spec.add(&b, &c));
        let rhs = spec.add(&spec.add(&a, &b), &c);
        report.record(Axiom::AddAssociative, lhs == rhs, w);
        report.record(Axiom::AddCommutative, spec.add(&a, &b) == spec.add(&b, &a), w);
        report.record(Axiom::AddIdentity, spec.add(&a, &zero) == a, w);
        report.record(Axiom::AddInverse, spec.add(&a, &spec.neg(&a)) == zero, w);
        let lhs = spec.mul(&a, &spec.mul(&b, &c));
        let rhs = spec.mul(&spec.mul(&a, &b), &c);
        report.record(Axiom::MulAssociative, lhs == rhs, w);
        report.record(Axiom::MulCommutative, spec.mul(&a, &b) == spec.mul(&b, &a), w);
        report.record(Axiom::MulIdentity, spec.mul(&a, &one) == a, w);
    }
    for _ in 0..3 * samples {
        let a = spec.sample(&mut rng);
        let b = spec.sample(&mut rng);
        let c = spec.sample(&mut rng);
        let lhs = spec.mul(&a, &spec.add(&b, &c));
        let rhs = spec.add(&spec.mul(&a, &b), &spec.mul(&a, &c));
        report.record(Axiom::Distributive, lhs == rhs, || format!("a={a:?}, b={b:?}, c={c:?}"));
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroLawReport {
    pub checked: usize,
    pub counterexample: Option<String>,
}

/// Checks `r · 0 = 0` on `samples` random elements.
pub fn mul_by_zero_law<S: RingSpec>(spec: &S, samples: usize, seed: u64) -> ZeroLawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = spec.zero();
    let mut counterexample = None;
    for _ in 0..samples {
        let r = spec.sample(&mut rng);
        if counterexample.is_none() && spec.mul(&r, &zero) != zero {
            counterexample = Some(format!("r={r:?}"));
        }
    }
    ZeroLawReport { checked: samples, counterexample }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rings() {
        assert_eq!(Ring::parse("Z").unwrap(), Ring::Integers);
        assert_eq!(Ring::parse("Zm:6").unwrap(), Ring::modular(6));
        assert_eq!(Ring::parse("Q").unwrap().to_string(), "Q");
        assert!(matches!(Ring::parse("Zm:1"), Err(RingError::BadModulus(_))));
        assert!(Ring::parse("R").is_err());
    }

    #[test]
    fn modular_reduction() {
        let z6 = Ring::modular(6);
        assert_eq!(z6.parse_element("8").unwrap(), Scalar::from_int(2));
        assert_eq!(z6.parse_element("-1").unwrap(), Scalar::from_int(5));
        assert_eq!(z6.mul(&Scalar::from_int(4), &z6.zero()), z6.zero());
        assert!(z6.parse_element("1/2").is_err());
        assert_eq!(Ring::modular(7).parse_element("1/2").unwrap(), Scalar::from_int(4));
        let z2 = Ring::modular(2);
        assert!(z2.add(&z2.one(), &z2.one()).is_zero());
    }

    #[test]
    fn integer_literals() {
        assert!(Ring::Integers.parse_element("3/7").is_err());
        assert_eq!(Ring::Integers.parse_element("4/2").unwrap(), Scalar::from_int(2));
        assert_eq!(Ring::Rationals.parse_element("6/-4").unwrap(), Scalar::ratio(-3, 2));
        assert_eq!(Scalar::ratio(-3, 7).to_string(), "-3/7");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("1.5".parse::<Scalar>().is_err());
    }

    #[test]
    fn zero_law_examples() {
        let q = Ring::Rationals;
        assert!(q.mul(&Scalar::ratio(-3, 7), &q.zero()).is_zero());
        assert!(Ring::Integers.mul(&Scalar::from_int(17), &Scalar::from_int(0)).is_zero());
        for ring in [Ring::Integers, Ring::modular(6), Ring::Rationals] {
            assert!(mul_by_zero_law(&ring, 200, 1).counterexample.is_none());
        }
    }

    #[test]
    fn concrete_rings_pass() {
        for ring in [Ring::Integers, Ring::modular(2), Ring::modular(6), Ring::Rationals] {
            let report = ring_axiom_suite(&ring, 300, 7);
            assert!(report.passed(), "{ring}: {report:?}");
            assert_eq!(report.checked[&Axiom::Distributive], 900);
        }
    }
}
