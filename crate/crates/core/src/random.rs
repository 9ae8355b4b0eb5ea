//! Seeded generators for terms, rewrite walks and product spaces, used by
//! property sweeps and the self-test.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolean::{BtRule, BtRules};
use crate::prelude::*;
use crate::prob::{Event, Fps};
use crate::rewrite::{self, Binding, Certificate, Direction, RewriteError, RuleSystem, Step};
use crate::ring::{Ring, Scalar};
use crate::ring_terms::{literal, EtCertificate, EtRule, EtRules};
use crate::term::{Signature, Term, ONE, PLUS, TIMES, ZERO};

/// A random term of depth at most `max_depth` over the signature, with
/// variables `x1…x_vars` and the extra atoms `extra` as leaves.
pub fn random_term<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, max_depth: usize, vars: u32, extra: &[Term]) -> Term {
    let mut atoms: Vec<Term> = (1..=vars).map(Term::var).collect();
    atoms.extend(extra.iter().cloned());
    let mut ops = Vec::new();
    for (s, a) in sig.symbols() {
        if a == 0 {
            atoms.push(Term::Const(s.clone()));
        } else {
            ops.push((s.clone(), a));
        }
    }
    assert!(!atoms.is_empty(), "no atoms to build terms from");
    fn go<R: Rng + ?Sized>(rng: &mut R, depth: usize, atoms: &[Term], ops: &[(crate::term::Symbol, usize)]) -> Term {
        // leaves get likelier near the depth bound
        if depth == 0 || ops.is_empty() || rng.gen_range(0..depth + 2) < 2 {
            return atoms.choose(rng).expect("atoms").clone();
        }
        let (s, a) = ops.choose(rng).expect("ops").clone();
        let mut args: Vec<Term> = (0..a).map(|_| go(rng, depth - 1, atoms, ops)).collect();
        match a {
            1 => Term::Unary(s, Box::new(args.pop().expect("one argument"))),
            2 => {
                let r = args.pop().expect("two arguments");
                Term::Binary(s, Box::new(args.pop().expect("two arguments")), Box::new(r))
            }
            _ => Term::Nary(s, args),
        }
    }
    go(rng, max_depth, &atoms, &ops)
}

/// Eight fixed elements of the ring, in canonical form (fewer for `ℤ_m`
/// with `m < 8`).
pub fn ring_constants(ring: &Ring) -> Vec<Scalar> {
    let candidates: Vec<Scalar> = match ring {
        Ring::Rationals => [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-3, 4), (5, 3), (-2, 7)]
            .iter()
            .map(|&(n, d)| Scalar::ratio(n, d))
            .collect(),
        _ => (-3..=4).map(Scalar::from_int).collect(),
    };
    let mut out: Vec<Scalar> = Vec::new();
    for c in candidates {
        let c = ring.element(c.value()).expect("integer or small fraction");
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Upper estimate of the number of summands after full expansion.
pub fn expansion_estimate(t: &Term) -> u64 {
    match t {
        Term::Binary(s, a, b) if s.as_str() == PLUS => expansion_estimate(a).saturating_add(expansion_estimate(b)),
        Term::Binary(s, a, b) if s.as_str() == TIMES => expansion_estimate(a).saturating_mul(expansion_estimate(b)),
        _ => 1,
    }
}

/// Limits for random ring terms.
#[derive(Debug, Clone, Copy)]
pub struct RingTermShape {
    pub max_depth: usize,
    pub vars: u32,
    pub max_expansion: u64,
}

impl Default for RingTermShape {
    fn default() -> Self {
        RingTermShape { max_depth: 6, vars: 6, max_expansion: 64 }
    }
}

/// A random ring term with constants `0`, `1` and `c{r}` for the eight
/// [`ring_constants`]; terms expanding past `max_expansion` are redrawn.
pub fn random_ring_term<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, shape: RingTermShape) -> Term {
    let sig = Signature::ring();
    let extra: Vec<Term> = ring_constants(ring).iter().map(literal).collect();
    loop {
        let t = random_term(rng, &sig, shape.max_depth, shape.vars, &extra);
        if expansion_estimate(&t) <= shape.max_expansion {
            return t;
        }
    }
}

fn small_witness<R: Rng + ?Sized>(rng: &mut R, ring: &Ring) -> Term {
    match rng.gen_range(0..3) {
        0 => Term::var(rng.gen_range(1..=4)),
        1 => literal(ring_constants(ring).choose(rng).expect("constants")),
        _ => Term::constant(ONE),
    }
}

fn try_apply<S: RuleSystem>(sys: &S, t: &Term, mut step: Step<S::Rule>) -> Result<(Step<S::Rule>, Term), RewriteError> {
    let mut u = t.clone();
    step.bind = rewrite::apply_in_place(sys, &mut u, &step)?;
    Ok((step, u))
}

/// Picks a random rule, direction and position and applies it, supplying
/// random witnesses where the target side needs them. Gives up after
/// `tries` failed attempts.
pub fn random_et_step<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, t: &Term, tries: usize) -> Option<(Step<EtRule>, Term)> {
    let sys = EtRules::new(ring);
    let positions = t.positions();
    for _ in 0..tries {
        let rule = *EtRule::ALL.choose(rng).expect("rules");
        let dir = if rng.gen_bool(0.5) { Direction::Fwd } else { Direction::Rev };
        let pos = positions.choose(rng).expect("root").clone();
        let mut step = Step::new(rule, pos.clone(), dir);
        if dir == Direction::Rev && matches!(rule, EtRule::AddConst | EtRule::MulConst) {
            let Some(bind) = split_constant(rng, ring, rule, t.subterm_at(&pos).ok()?) else { continue };
            step = step.with_bind(bind);
        }
        match try_apply(&sys, t, step.clone()) {
            Ok(done) => return Some(done),
            Err(RewriteError::MissingWitness { name, .. }) => {
                let i = rewrite::META_NAMES.iter().position(|&n| n == name).expect("metavariable name");
                let step = step.with_bind(Binding::default().with_term(i, small_witness(rng, ring)));
                if let Ok(done) = try_apply(&sys, t, step) {
                    return Some(done);
                }
            }
            Err(_) => {}
        }
    }
    None
}

/// `r`, `s` with `r ⊕ s` (or `r ⊙ s`) equal to the literal `slot`.
fn split_constant<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, rule: EtRule, slot: &Term) -> Option<Binding> {
    let Term::Const(sym) = slot else { return None };
    let name = sym.as_str();
    let body = name.strip_prefix("c{")?.strip_suffix('}')?;
    let v: Scalar = body.parse().ok()?;
    let v = ring.element(v.value()).ok()?;
    let (r, s) = if rule == EtRule::AddConst {
        let r = ring_constants(ring).choose(rng).expect("constants").clone();
        let s = ring.add(&v, &ring.neg(&r));
        (r, s)
    } else if v.is_zero() {
        (ring.zero(), ring_constants(ring).choose(rng).expect("constants").clone())
    } else if rng.gen_bool(0.5) {
        (v, ring.one())
    } else {
        (ring.one(), v)
    };
    Some(Binding::default().with_scalars(r, s))
}

/// A walk of up to `steps` random elementary transformations, each kept
/// only while the term stays within `max_size` nodes.
pub fn random_et_walk<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, t: &Term, steps: usize, max_size: usize) -> EtCertificate {
    let mut cur = t.clone();
    let mut out = Vec::new();
    for _ in 0..steps {
        let Some((step, next)) = random_et_step(rng, ring, &cur, 40) else { break };
        if next.size() > max_size {
            continue;
        }
        out.push(step);
        cur = next;
    }
    Certificate { source: t.clone(), target: cur, steps: out }
}

/// A random Boolean term over `x1…x_vars`.
pub fn random_bool_term<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, vars: u32) -> Term {
    random_term(rng, &Signature::boolean(), max_depth, vars, &[])
}

/// One random applicable Boolean transformation, as for [`random_et_step`].
pub fn random_bt_step<R: Rng + ?Sized>(rng: &mut R, t: &Term, vars: u32, tries: usize) -> Option<(Step<BtRule>, Term)> {
    let sys = BtRules::new();
    let positions = t.positions();
    for _ in 0..tries {
        let rule = *BtRule::ALL.choose(rng).expect("rules");
        let dir = if rng.gen_bool(0.5) { Direction::Fwd } else { Direction::Rev };
        let pos = positions.choose(rng).expect("root").clone();
        let step = Step::new(rule, pos, dir);
        match try_apply(&sys, t, step.clone()) {
            Ok(done) => return Some(done),
            Err(RewriteError::MissingWitness { name, .. }) => {
                let i = rewrite::META_NAMES.iter().position(|&n| n == name).expect("metavariable name");
                let w = random_bool_term(rng, 1, vars.max(1));
                let step = step.with_bind(Binding::default().with_term(i, w));
                if let Ok(done) = try_apply(&sys, t, step) {
                    return Some(done);
                }
            }
            Err(_) => {}
        }
    }
    None
}

/// Every term with at most `max_size` nodes built from `atoms` and the
/// unary and binary symbols of `sig`, smallest first.
pub fn enumerate_terms(sig: &Signature, atoms: &[Term], max_size: usize) -> Vec<Term> {
    let unary: Vec<_> = sig.symbols().filter(|&(_, a)| a == 1).map(|(s, _)| s.clone()).collect();
    let binary: Vec<_> = sig.symbols().filter(|&(_, a)| a == 2).map(|(s, _)| s.clone()).collect();
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(), atoms.to_vec()];
    for n in 2..=max_size {
        let mut level = Vec::new();
        for s in &unary {
            for t in &by_size[n - 1] {
                level.push(Term::Unary(s.clone(), Box::new(t.clone())));
            }
        }
        for s in &binary {
            for i in 1..n - 1 {
                for a in &by_size[i] {
                    for b in &by_size[n - 1 - i] {
                        level.push(Term::Binary(s.clone(), Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

/// The atoms `x1…x_vars`, `0`, `1` of the Boolean signature.
pub fn bool_atoms(vars: u32) -> Vec<Term> {
    let mut atoms: Vec<Term> = (1..=vars).map(Term::var).collect();
    atoms.push(Term::constant(ZERO));
    atoms.push(Term::constant(ONE));
    atoms
}

/// A product space `M₁ × M₂` with random positive weights and `n` events
/// on each factor. `left` events only look at the first coordinate and
/// `right` events only at the second, so the tuples are independent.
#[derive(Debug, Clone)]
pub struct ProductInstance {
    pub fps: Fps,
    pub left: Vec<Event>,
    pub right: Vec<Event>,
}

impl ProductInstance {
    /// `left` followed by `right`.
    pub fn events(&self) -> Vec<Event> {
        self.left.iter().chain(&self.right).cloned().collect()
    }
}

fn random_factor<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Fps {
    let raw: Vec<i64> = (0..size).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let weights: Vec<BigRational> = raw.iter().map(|&w| BigRational::new(w.into(), total.into())).collect();
    Fps::weighted(&weights).expect("positive weights summing to 1")
}

/// A random product space with at most `max_outcomes` outcomes (at least 4).
pub fn random_product_space<R: Rng + ?Sized>(rng: &mut R, n: usize, max_outcomes: usize) -> ProductInstance {
    assert!(max_outcomes >= 4, "each factor needs two outcomes");
    let a = rng.gen_range(2..=max_outcomes / 2);
    let b = rng.gen_range(2..=max_outcomes / a);
    let (l, r) = (random_factor(rng, a), random_factor(rng, b));
    let fps = l.product(&r);
    let size = a * b;
    let left = (0..n)
        .map(|_| {
            let s: Vec<bool> = (0..a).map(|_| rng.gen_bool(0.5)).collect();
            Event::from_fn(size, |w| s[w / b])
        })
        .collect();
    let right = (0..n)
        .map(|_| {
            let s: Vec<bool> = (0..b).map(|_| rng.gen_bool(0.5)).collect();
            Event::from_fn(size, |w| s[w % b])
        })
        .collect();
    ProductInstance { fps, left, right }
}
