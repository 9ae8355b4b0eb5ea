//! Finite probability spaces, events as bitsets, and independence checks.

use core::fmt;
use core::ops::{BitAnd, BitOr, Not};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::boolean::{bool_eval, to_dnf, verify_bt_certificate, wedge_of_dnfs, BoolEvalError, DnfError, PowerSet};
use crate::prelude::*;
use crate::term::Term;

/// A subset of `{0, …, len-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    len: usize,
    words: Vec<u64>,
}

impl Event {
    pub fn empty(len: usize) -> Event {
        Event { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Event {
        let mut e = Event { len, words: vec![u64::MAX; len.div_ceil(64)] };
        e.mask_tail();
        e
    }

    /// Panics if an index is out of range.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Event {
        let mut e = Event::empty(len);
        for i in indices {
            e.insert(i);
        }
        e
    }

    /// The event `{ω : pred(ω)}`.
    pub fn from_fn(len: usize, mut pred: impl FnMut(usize) -> bool) -> Event {
        Event::from_indices(len, (0..len).filter(|&i| pred(i)))
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    /// Size of the ambient outcome set.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "outcome {i} outside a space of {} outcomes", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.zip(other).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.zip(other).all(|(a, b)| a & b == 0)
    }

    pub fn intersect_with(&mut self, other: &Event) {
        assert_eq!(self.len, other.len, "events over different spaces");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Event) {
        assert_eq!(self.len, other.len, "events over different spaces");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> Event {
        let mut e = Event { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        e.mask_tail();
        e
    }

    fn zip<'a>(&'a self, other: &'a Event) -> impl Iterator<Item = (u64, u64)> + 'a {
        assert_eq!(self.len, other.len, "events over different spaces");
        self.words.iter().copied().zip(other.words.iter().copied())
    }
}

impl BitAnd for &Event {
    type Output = Event;
    fn bitand(self, rhs: &Event) -> Event {
        let mut e = self.clone();
        e.intersect_with(rhs);
        e
    }
}

impl BitOr for &Event {
    type Output = Event;
    fn bitor(self, rhs: &Event) -> Event {
        let mut e = self.clone();
        e.union_with(rhs);
        e
    }
}

impl Not for &Event {
    type Output = Event;
    fn not(self) -> Event {
        self.complement()
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbError {
    #[error("a probability space needs at least one outcome")]
    EmptySpace,
    #[error("weight of outcome {0} is negative")]
    NegativeWeight(usize),
    #[error("weights sum to {0}, not 1")]
    BadTotal(BigRational),
    #[error("event over {found} outcomes used in a space of {expected}")]
    WrongUniverse { expected: usize, found: usize },
    #[error("events {0} and {1} are not disjoint")]
    NotDisjoint(usize, usize),
    #[error("the input tuples are not independent (fails at left {left:?}, right {right:?})")]
    PreconditionViolated { left: Vec<usize>, right: Vec<usize> },
    #[error("{0} events in total; at most {MAX_TUPLE_EVENTS} are checked exhaustively")]
    TooManyEvents(usize),
    #[error("{0} atoms generate too many events to list")]
    TooManyAtoms(usize),
    #[error("an even number of events is needed, got {0}")]
    OddEventCount(usize),
    #[error(transparent)]
    Eval(#[from] BoolEvalError),
    #[error(transparent)]
    Dnf(#[from] DnfError),
}

/// Cap on `k + l` in [`tuples_independent`]; the check visits `2^(k+l)`
/// subset pairs.
pub const MAX_TUPLE_EVENTS: usize = 24;

/// A finite probability space on the outcomes `0, …, n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fps {
    size: usize,
    /// `None` for the uniform space. Otherwise integer numerators over the
    /// common denominator `denom`.
    numerators: Option<Vec<BigUint>>,
    denom: BigUint,
}

impl Fps {
    pub fn uniform(n: usize) -> Result<Fps, ProbError> {
        if n == 0 {
            return Err(ProbError::EmptySpace);
        }
        Ok(Fps { size: n, numerators: None, denom: BigUint::from(n) })
    }

    /// Weights must be non-negative and sum to exactly 1.
    pub fn weighted(weights: &[BigRational]) -> Result<Fps, ProbError> {
        if weights.is_empty() {
            return Err(ProbError::EmptySpace);
        }
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(ProbError::NegativeWeight(i));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(ProbError::BadTotal(total));
        }
        let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let numerators = weights
            .iter()
            .map(|w| (w.numer() * (&denom / w.denom())).to_biguint().expect("non-negative"))
            .collect();
        Ok(Fps { size: weights.len(), numerators: Some(numerators), denom: denom.to_biguint().expect("positive") })
    }

    /// The product space; outcome `(i, j)` is numbered `i·|right| + j`.
    pub fn product(&self, right: &Fps) -> Fps {
        let weights: Vec<BigRational> = (0..self.size)
            .flat_map(|i| (0..right.size).map(move |j| (i, j)))
            .map(|(i, j)| self.weight(i) * right.weight(j))
            .collect();
        Fps::weighted(&weights).expect("product of probability spaces")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_uniform(&self) -> bool {
        self.numerators.is_none()
    }

    pub fn weight(&self, i: usize) -> BigRational {
        assert!(i < self.size, "outcome {i} outside a space of {} outcomes", self.size);
        let num = self.numerators.as_ref().map_or_else(BigUint::one, |n| n[i].clone());
        BigRational::new(num.into(), self.denom.clone().into())
    }

    pub fn weights(&self) -> Vec<BigRational> {
        (0..self.size).map(|i| self.weight(i)).collect()
    }

    pub fn check_event(&self, a: &Event) -> Result<(), ProbError> {
        if a.universe() == self.size {
            Ok(())
        } else {
            Err(ProbError::WrongUniverse { expected: self.size, found: a.universe() })
        }
    }

    /// `Pr(a)`; panics if `a` lives on a different outcome set.
    pub fn pr(&self, a: &Event) -> BigRational {
        self.check_event(a).expect("event of this space");
        let num = match &self.numerators {
            None => BigUint::from(a.count()),
            Some(ns) => a.iter().map(|i| &ns[i]).sum(),
        };
        BigRational::new(num.into(), self.denom.clone().into())
    }

    /// A uniformly random event.
    pub fn random_event(&self, rng: &mut dyn RngCore) -> Event {
        Event::from_fn(self.size, |_| rng.gen_bool(0.5))
    }
}

/// Outcome of [`disjoint_sum_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointSumReport {
    pub pr_union: BigRational,
    pub sum: BigRational,
}

impl DisjointSumReport {
    pub fn holds(&self) -> bool {
        self.pr_union == self.sum
    }
}

/// Checks pairwise disjointness, then compares `Pr(⋁ a_j)` with `Σ Pr(a_j)`.
pub fn disjoint_sum_check(fps: &Fps, events: &[Event]) -> Result<DisjointSumReport, ProbError> {
    for e in events {
        fps.check_event(e)?;
    }
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            if !events[i].is_disjoint(&events[j]) {
                return Err(ProbError::NotDisjoint(i, j));
            }
        }
    }
    let mut union = Event::empty(fps.size());
    for e in events {
        union.union_with(e);
    }
    Ok(DisjointSumReport { pr_union: fps.pr(&union), sum: events.iter().map(|e| fps.pr(e)).sum() })
}

/// Outcome of an independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Number of `(X, Y)` pairs compared.
    pub checked: u64,
    /// First failing pair of index sets.
    pub failure: Option<(Vec<usize>, Vec<usize>)>,
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Meets of every subset of `events`, indexed by bitmask; the empty meet
/// is the whole space.
fn all_meets(size: usize, events: &[Event]) -> Vec<Event> {
    let mut meets = Vec::with_capacity(1 << events.len());
    meets.push(Event::full(size));
    for mask in 1usize..1 << events.len() {
        let low = mask.trailing_zeros() as usize;
        meets.push(&meets[mask & (mask - 1)] & &events[low]);
    }
    meets
}

/// Whether `as_` is independent of `bs`: for every `X ⊆ [k]` and `Y ⊆ [l]`,
/// `Pr(⋀_X a_i ∧ ⋀_Y b_j) = Pr(⋀_X a_i)·Pr(⋀_Y b_j)`.
pub fn tuples_independent(fps: &Fps, as_: &[Event], bs: &[Event]) -> Result<IndependenceReport, ProbError> {
    let total = as_.len() + bs.len();
    if total > MAX_TUPLE_EVENTS {
        return Err(ProbError::TooManyEvents(total));
    }
    for e in as_.iter().chain(bs) {
        fps.check_event(e)?;
    }
    let ma = all_meets(fps.size(), as_);
    let mb = all_meets(fps.size(), bs);
    let pa: Vec<BigRational> = ma.iter().map(|e| fps.pr(e)).collect();
    let pb: Vec<BigRational> = mb.iter().map(|e| fps.pr(e)).collect();
    let mut checked = 0;
    for (x, (ex, px)) in ma.iter().zip(&pa).enumerate() {
        for (y, (ey, py)) in mb.iter().zip(&pb).enumerate() {
            checked += 1;
            if x == 0 || y == 0 {
                continue;
            }
            if fps.pr(&(ex & ey)) != px * py {
                return Ok(IndependenceReport {
                    independent: false,
                    checked,
                    failure: Some((bits(x as u64), bits(y as u64))),
                });
            }
        }
    }
    Ok(IndependenceReport { independent: true, checked, failure: None })
}

/// Outcome of [`complement_closure_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub selections: u64,
    pub exhaustive: bool,
    /// Complement masks on the left and right that broke independence.
    pub failure: Option<(Vec<bool>, Vec<bool>)>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Replaces events by their complements in every way (exhaustive up to
/// `2^10` selections, otherwise `samples` random selections) and re-checks
/// independence.
pub fn complement_closure_check(
    fps: &Fps,
    as_: &[Event],
    bs: &[Event],
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<ClosureReport, ProbError> {
    let base = tuples_independent(fps, as_, bs)?;
    if let Some((left, right)) = base.failure {
        return Err(ProbError::PreconditionViolated { left, right });
    }
    let total = as_.len() + bs.len();
    let exhaustive = total <= 10;
    let masks: Vec<u64> = if exhaustive {
        (0..1u64 << total).collect()
    } else {
        (0..samples).map(|_| rng.gen::<u64>() & ((1u64 << total) - 1)).collect()
    };
    let pick = |events: &[Event], mask: u64| -> Vec<Event> {
        events.iter().enumerate().map(|(i, e)| if mask >> i & 1 == 1 { !e } else { e.clone() }).collect()
    };
    for (n, &mask) in masks.iter().enumerate() {
        let left = pick(as_, mask);
        let right = pick(bs, mask >> as_.len());
        if !tuples_independent(fps, &left, &right)?.independent {
            let flags = |len: usize, shift: usize| (0..len).map(|i| mask >> (i + shift) & 1 == 1).collect();
            return Ok(ClosureReport {
                selections: n as u64 + 1,
                exhaustive,
                failure: Some((flags(as_.len(), 0), flags(bs.len(), as_.len()))),
            });
        }
    }
    Ok(ClosureReport { selections: masks.len() as u64, exhaustive, failure: None })
}

/// Atoms of the partition of the outcomes cut out by `gens`.
pub fn atoms(size: usize, gens: &[Event]) -> Vec<Event> {
    let mut classes: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for w in 0..size {
        classes.entry(gens.iter().map(|g| g.contains(w)).collect()).or_default().push(w);
    }
    classes.into_values().map(|ws| Event::from_indices(size, ws)).collect()
}

/// Largest atom count accepted by [`generated_subalgebra`].
pub const MAX_ATOMS: usize = 16;

/// The Boolean subalgebra of the powerset generated by `gens`: every union
/// of atoms.
pub fn generated_subalgebra(fps: &Fps, gens: &[Event]) -> Result<Vec<Event>, ProbError> {
    for g in gens {
        fps.check_event(g)?;
    }
    let atoms = atoms(fps.size(), gens);
    if atoms.len() > MAX_ATOMS {
        return Err(ProbError::TooManyAtoms(atoms.len()));
    }
    Ok((0u64..1 << atoms.len())
        .map(|mask| {
            let mut e = Event::empty(fps.size());
            for i in bits(mask) {
                e.union_with(&atoms[i]);
            }
            e
        })
        .collect())
}

/// Every event of `⟨as⟩` against every event of `⟨bs⟩`. Meets of
/// subalgebra elements stay in the subalgebra, so this covers all tuples.
/// A failure reports the positions in the two generated lists.
pub fn subalgebras_independent(fps: &Fps, as_: &[Event], bs: &[Event]) -> Result<IndependenceReport, ProbError> {
    let ga = generated_subalgebra(fps, as_)?;
    let gb = generated_subalgebra(fps, bs)?;
    let pb: Vec<BigRational> = gb.iter().map(|e| fps.pr(e)).collect();
    let mut checked = 0;
    for (i, x) in ga.iter().enumerate() {
        let px = fps.pr(x);
        for (j, y) in gb.iter().enumerate() {
            checked += 1;
            if fps.pr(&(x & y)) != &px * &pb[j] {
                return Ok(IndependenceReport { independent: false, checked, failure: Some((vec![i], vec![j])) });
            }
        }
    }
    Ok(IndependenceReport { independent: true, checked, failure: None })
}

/// Outcome of [`bit_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitReport {
    pub pr_a: BigRational,
    pub pr_b: BigRational,
    pub pr_ab: BigRational,
    /// `Pr(a∧b) = Pr(a)·Pr(b)`.
    pub independent: bool,
    /// Both DNF certificates replay.
    pub certificates_valid: bool,
    /// The DNFs of `t` and `u` evaluate to `a` and `b`.
    pub dnf_equal: bool,
    /// The wedge of the DNF of `t` with the shifted DNF of `u` evaluates to
    /// `a∧b`.
    pub wedge_equal: bool,
    /// The monomial events of the wedge are disjoint and their
    /// probabilities add up to `Pr(a∧b)`.
    pub disjoint_sum: bool,
    /// Each wedge monomial `μ∧ν` has `Pr(μ∧ν) = Pr(μ)·Pr(ν)`.
    pub factorization: bool,
    pub monomials: usize,
}

impl BitReport {
    pub fn all_passed(&self) -> bool {
        self.independent
            && self.certificates_valid
            && self.dnf_equal
            && self.wedge_equal
            && self.disjoint_sum
            && self.factorization
    }
}

/// Evaluates `t` on `a_1…a_n` and `u` on `a_{n+1}…a_{2n}` in the powerset
/// algebra and checks `Pr(a∧b) = Pr(a)·Pr(b)`, together with the
/// intermediate identities of the DNF argument.
pub fn bit_check(fps: &Fps, t: &Term, u: &Term, events: &[Event]) -> Result<BitReport, ProbError> {
    if events.len() % 2 == 1 || events.is_empty() {
        return Err(ProbError::OddEventCount(events.len()));
    }
    let n = events.len() / 2;
    let (left, right) = events.split_at(n);
    let pre = tuples_independent(fps, left, right)?;
    if let Some((left, right)) = pre.failure {
        return Err(ProbError::PreconditionViolated { left, right });
    }
    let alg = PowerSet { universe: fps.size() };
    let a = bool_eval(t, &alg, left)?;
    let b = bool_eval(u, &alg, right)?;
    let ab = &a & &b;
    let (pr_a, pr_b, pr_ab) = (fps.pr(&a), fps.pr(&b), fps.pr(&ab));

    let dt = to_dnf(t, n as u32)?;
    let du = to_dnf(u, n as u32)?;
    let certificates_valid =
        verify_bt_certificate(&dt.certificate).is_valid() && verify_bt_certificate(&du.certificate).is_valid();
    let dnf_equal = bool_eval(&dt.dnf.to_term(), &alg, left)? == a && bool_eval(&du.dnf.to_term(), &alg, right)? == b;
    let wedge = wedge_of_dnfs(&dt.dnf, &du.dnf.shift(n as u32))?;
    let wedge_equal = bool_eval(&wedge.to_term(), &alg, events)? == ab;

    let monomials = wedge.monomials();
    let mut parts = Vec::with_capacity(monomials.len());
    let mut factorization = true;
    for m in &monomials {
        let lits = m.literals();
        let (mu, nu) = lits.split_at(n);
        let ev = |ls: &[(u32, bool)]| {
            let mut e = Event::full(fps.size());
            for &(v, neg) in ls {
                let x = &events[v as usize - 1];
                e.intersect_with(&if neg { !x } else { x.clone() });
            }
            e
        };
        let (em, en) = (ev(mu), ev(nu));
        let both = &em & &en;
        factorization &= fps.pr(&both) == fps.pr(&em) * fps.pr(&en);
        parts.push(both);
    }
    let disjoint_sum = match disjoint_sum_check(fps, &parts) {
        Ok(r) => r.holds() && r.sum == pr_ab,
        Err(_) => false,
    };
    Ok(BitReport {
        independent: pr_ab == &pr_a * &pr_b,
        pr_a,
        pr_b,
        pr_ab,
        certificates_valid,
        dnf_equal,
        wedge_equal,
        disjoint_sum,
        factorization,
        monomials: monomials.len(),
    })
}
