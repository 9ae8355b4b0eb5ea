//! Replayable rewrite steps and certificates, shared by the ring rules
//! (ET-1…ET10) and the Boolean rules (BT1…BT19).
//!
//! A rule relates a pattern `v` to a pattern `v'`; the metavariables `u`,
//! `u'`, `u''` are written as the variables `x1`, `x2`, `x3` inside
//! patterns. A [`Step`] applies one rule at one position in one direction.
//! Metavariables that occur on only one side cannot be recovered from the
//! subject when that side is the target, so such values travel in the
//! step's [`Binding`]. Every recorded step carries them, which makes each
//! certificate reversible.

use core::fmt;
use core::mem;

use num_bigint::BigUint;
use thiserror::Error;

use crate::prelude::*;
use crate::ring::Scalar;
use crate::term::{Position, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `v` to `v'`.
    Fwd,
    /// `v'` to `v`.
    Rev,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Fwd => Direction::Rev,
            Direction::Rev => Direction::Fwd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Fwd => "fwd",
            Direction::Rev => "rev",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s {
            "fwd" => Some(Direction::Fwd),
            "rev" => Some(Direction::Rev),
            _ => None,
        }
    }
}

/// Names of the metavariables as they appear in certificates.
pub const META_NAMES: [&str; 3] = ["u", "u'", "u''"];

/// Values of metavariables and of the ring parameters `r`, `s`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding {
    pub terms: [Option<Term>; 3],
    pub r: Option<Scalar>,
    pub s: Option<Scalar>,
}

impl Binding {
    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(Option::is_none) && self.r.is_none() && self.s.is_none()
    }

    /// Binds the metavariable `u`, `u'` or `u''` (index 0, 1 or 2).
    pub fn with_term(mut self, index: usize, t: Term) -> Binding {
        self.terms[index] = Some(t);
        self
    }

    pub fn with_scalars(mut self, r: Scalar, s: Scalar) -> Binding {
        self.r = Some(r);
        self.s = Some(s);
        self
    }
}

/// One elementary transformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step<K> {
    pub rule: K,
    pub pos: Position,
    pub dir: Direction,
    pub bind: Binding,
}

impl<K> Step<K> {
    pub fn new(rule: K, pos: impl Into<Position>, dir: Direction) -> Step<K> {
        Step { rule, pos: pos.into(), dir, bind: Binding::default() }
    }

    pub fn with_bind(mut self, bind: Binding) -> Step<K> {
        self.bind = bind;
        self
    }
}

/// A chain `source = t_0 ∼ t_1 ∼ … ∼ t_k = target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate<K> {
    pub source: Term,
    pub target: Term,
    pub steps: Vec<Step<K>>,
}

impl<K: Clone> Certificate<K> {
    /// The chain read backwards. Requires every lossy step to carry its
    /// binding, which recorded certificates always do.
    pub fn reversed(&self) -> Certificate<K> {
        Certificate {
            source: self.target.clone(),
            target: self.source.clone(),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step { dir: s.dir.flip(), ..s.clone() })
                .collect(),
        }
    }

    /// `self` followed by `next`; `self.target` must equal `next.source` for
    /// the result to verify.
    pub fn then(mut self, next: Certificate<K>) -> Certificate<K> {
        self.target = next.target;
        self.steps.extend(next.steps);
        self
    }
}

/// Why a rule did not apply to a subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RedexError {
    Mismatch,
    MissingWitness(&'static str),
    /// A constant literal that is not an element of the ring.
    BadConstant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("position {0} does not address a subterm")]
    InvalidPosition(Position),
    #[error("{rule} ({dir}) does not match at {pos}")]
    RedexMismatch { rule: String, dir: &'static str, pos: Position },
    #[error("{rule} ({dir}) at {pos} needs a value for {name}")]
    MissingWitness { rule: String, dir: &'static str, pos: Position, name: &'static str },
    #[error("constant {constant} at {pos} is not a ring element")]
    BadConstant { constant: String, pos: Position },
}

/// Result of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    StepFailed { index: usize, error: RewriteError },
    /// Every step applied but the final term differs from the target.
    TargetMismatch { reached: Term },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// A family of rewrite rules.
pub trait RuleSystem {
    type Rule: Copy + Eq + fmt::Debug + fmt::Display;

    /// Rewrites `slot` in place and returns the binding a recorder should
    /// store for the step. On error `slot` is left untouched.
    fn rewrite(
        &self,
        slot: &mut Term,
        rule: Self::Rule,
        dir: Direction,
        bind: &Binding,
    ) -> Result<Binding, RedexError>;
}

/// Applies `step` to `t` in place and returns the recorded binding.
pub fn apply_in_place<S: RuleSystem>(
    sys: &S,
    t: &mut Term,
    step: &Step<S::Rule>,
) -> Result<Binding, RewriteError> {
    let slot = t
        .subterm_at_mut(&step.pos)
        .map_err(|_| RewriteError::InvalidPosition(step.pos.clone()))?;
    sys.rewrite(slot, step.rule, step.dir, &step.bind).map_err(|e| match e {
        RedexError::Mismatch => RewriteError::RedexMismatch {
            rule: step.rule.to_string(),
            dir: step.dir.name(),
            pos: step.pos.clone(),
        },
        RedexError::MissingWitness(name) => RewriteError::MissingWitness {
            rule: step.rule.to_string(),
            dir: step.dir.name(),
            pos: step.pos.clone(),
            name,
        },
        RedexError::BadConstant(constant) => {
            RewriteError::BadConstant { constant, pos: step.pos.clone() }
        }
    })
}

/// The term obtained by applying `step` to `t`.
pub fn apply<S: RuleSystem>(sys: &S, t: &Term, step: &Step<S::Rule>) -> Result<Term, RewriteError> {
    let mut out = t.clone();
    apply_in_place(sys, &mut out, step)?;
    Ok(out)
}

/// Replays the certificate from its source.
pub fn verify<S: RuleSystem>(sys: &S, cert: &Certificate<S::Rule>) -> Verdict {
    let mut t = cert.source.clone();
    for (index, step) in cert.steps.iter().enumerate() {
        if let Err(error) = apply_in_place(sys, &mut t, step) {
            return Verdict::StepFailed { index, error };
        }
    }
    if t == cert.target {
        Verdict::Valid
    } else {
        Verdict::TargetMismatch { reached: t }
    }
}

/// Applies steps to a working term and records them.
pub struct Recorder<'a, S: RuleSystem> {
    sys: &'a S,
    source: Term,
    term: Term,
    steps: Vec<Step<S::Rule>>,
}

impl<'a, S: RuleSystem> Recorder<'a, S> {
    pub fn new(sys: &'a S, term: Term) -> Self {
        Recorder { sys, source: term.clone(), term, steps: Vec::new() }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies a step that the caller knows to be valid; panics otherwise.
    pub fn step(&mut self, rule: S::Rule, pos: &[usize], dir: Direction) {
        self.step_with(rule, pos, dir, Binding::default());
    }

    pub fn step_with(&mut self, rule: S::Rule, pos: &[usize], dir: Direction, bind: Binding) {
        let mut step = Step::new(rule, pos, dir).with_bind(bind);
        match apply_in_place(self.sys, &mut self.term, &step) {
            Ok(recorded) => step.bind = recorded,
            Err(e) => panic!("internal rewrite failed: {e} on {}", self.term),
        }
        self.steps.push(step);
    }

    /// Subterm of the working term at `pos`; panics on a bad position.
    pub fn at(&self, pos: &[usize]) -> &Term {
        self.term.subterm_at(&pos.into()).expect("valid position")
    }

    pub fn finish(self) -> Certificate<S::Rule> {
        Certificate { source: self.source, target: self.term, steps: self.steps }
    }
}

/// Polynomial interpretation with `[a] = 2` on atoms, `[f(a)] = [a] + 1`,
/// product for the binary symbol `mul` and `[a]+[b]+1` for every other
/// binary symbol. Distributing `mul` over another binary symbol strictly
/// lowers it; commutation and association keep it.
pub fn product_weight(t: &Term, mul: &str) -> BigUint {
    match t {
        Term::Const(_) | Term::Var(_) => BigUint::from(2u32),
        Term::Unary(_, a) => product_weight(a, mul) + 1u32,
        Term::Binary(s, a, b) if s.as_str() == mul => product_weight(a, mul) * product_weight(b, mul),
        Term::Binary(_, a, b) => product_weight(a, mul) + product_weight(b, mul) + 1u32,
        Term::Nary(_, args) => args.iter().map(|a| product_weight(a, mul)).sum::<BigUint>() + 1u32,
    }
}

pub(crate) fn spine(base: &[usize], i: usize) -> Vec<usize> {
    let mut p = base.to_vec();
    p.extend(core::iter::repeat(2).take(i));
    p
}

pub(crate) fn comb_element(base: &[usize], i: usize, k: usize) -> Vec<usize> {
    let mut p = spine(base, i);
    if i + 1 < k {
        p.push(1);
    }
    p
}

/// Elements of the right comb `(a1 op (a2 op (… op ak)))`.
pub(crate) fn comb_elements<'t>(t: &'t Term, op: &str) -> Vec<&'t Term> {
    let mut out = Vec::new();
    let mut cur = t;
    while let Term::Binary(s, l, r) = cur {
        if s.as_str() != op {
            break;
        }
        out.push(&**l);
        cur = r;
    }
    out.push(cur);
    out
}

/// Reassociates the `op`-tree at `base` into a right comb. `assoc` must be
/// `(x1 op (x2 op x3)) → ((x1 op x2) op x3)`.
pub(crate) fn flatten_comb<S: RuleSystem>(rec: &mut Recorder<'_, S>, base: &[usize], op: &str, assoc: S::Rule) {
    let mut q = base.to_vec();
    loop {
        let t = rec.at(&q);
        if !t.has_head(op) {
            break;
        }
        if t.child(1).is_some_and(|l| l.has_head(op)) {
            rec.step(assoc, &q, Direction::Rev);
        } else {
            q.push(2);
        }
    }
}

/// Bubble-sorts the right comb at `base` by `key` using adjacent swaps.
pub(crate) fn sort_comb<S: RuleSystem, K: Ord>(
    rec: &mut Recorder<'_, S>,
    base: &[usize],
    op: &str,
    assoc: S::Rule,
    comm: S::Rule,
    key: impl Fn(&Term) -> K,
) {
    let mut keys: Vec<K> = comb_elements(rec.at(base), op).into_iter().map(key).collect();
    let k = keys.len();
    loop {
        let mut swapped = false;
        for i in 0..k.saturating_sub(1) {
            if keys[i] > keys[i + 1] {
                let q = spine(base, i);
                if i + 2 == k {
                    rec.step(comm, &q, Direction::Fwd);
                } else {
                    rec.step(assoc, &q, Direction::Fwd);
                    rec.step(comm, &[q.as_slice(), &[1]].concat(), Direction::Fwd);
                    rec.step(assoc, &q, Direction::Rev);
                }
                keys.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

/// A rule given by two patterns over the metavariables `x1`, `x2`, `x3`.
#[derive(Debug, Clone)]
pub struct PatternRule {
    lhs: Term,
    rhs: Term,
    /// Metavariables occurring on exactly one side.
    lossy: [bool; 3],
}

fn meta_index(v: Var) -> usize {
    let i = v.index() as usize;
    assert!((1..=3).contains(&i), "pattern metavariables are x1, x2, x3");
    i - 1
}

fn meta_counts(p: &Term, out: &mut [usize; 3]) {
    match p {
        Term::Var(v) => out[meta_index(*v)] += 1,
        _ => p.children().for_each(|c| meta_counts(c, out)),
    }
}

fn match_pattern<'t>(p: &Term, t: &'t Term, b: &mut [Option<&'t Term>; 3]) -> bool {
    match (p, t) {
        (Term::Var(v), _) => {
            let slot = &mut b[meta_index(*v)];
            match slot {
                Some(bound) => *bound == t,
                None => {
                    *slot = Some(t);
                    true
                }
            }
        }
        (Term::Const(a), Term::Const(b2)) => a == b2,
        (Term::Unary(s, a), Term::Unary(s2, a2)) => s == s2 && match_pattern(a, a2, b),
        (Term::Binary(s, l, r), Term::Binary(s2, l2, r2)) => {
            s == s2 && match_pattern(l, l2, b) && match_pattern(r, r2, b)
        }
        _ => false,
    }
}

/// Moves the subterms matched by metavariables out of `t`, which must match `p`.
fn extract(p: &Term, t: Term, out: &mut [Option<Term>; 3]) {
    match (p, t) {
        (Term::Var(v), t) => {
            let slot = &mut out[meta_index(*v)];
            if slot.is_none() {
                *slot = Some(t);
            }
        }
        (Term::Unary(_, a), Term::Unary(_, a2)) => extract(a, *a2, out),
        (Term::Binary(_, l, r), Term::Binary(_, l2, r2)) => {
            extract(l, *l2, out);
            extract(r, *r2, out);
        }
        _ => {}
    }
}

/// Instantiates `p`, moving each value into its last use.
fn build(p: &Term, vals: &mut [Option<Term>; 3], remaining: &mut [usize; 3]) -> Term {
    match p {
        Term::Var(v) => {
            let i = meta_index(*v);
            remaining[i] -= 1;
            if remaining[i] == 0 {
                vals[i].take().expect("metavariable bound")
            } else {
                vals[i].clone().expect("metavariable bound")
            }
        }
        Term::Const(_) => p.clone(),
        Term::Unary(s, a) => Term::Unary(s.clone(), Box::new(build(a, vals, remaining))),
        Term::Binary(s, l, r) => {
            let l = build(l, vals, remaining);
            let r = build(r, vals, remaining);
            Term::Binary(s.clone(), Box::new(l), Box::new(r))
        }
        Term::Nary(..) => unreachable!("patterns are at most binary"),
    }
}

impl PatternRule {
    pub fn new(lhs: Term, rhs: Term) -> PatternRule {
        let (mut l, mut r) = ([0; 3], [0; 3]);
        meta_counts(&lhs, &mut l);
        meta_counts(&rhs, &mut r);
        let lossy = [0, 1, 2].map(|i| (l[i] > 0) != (r[i] > 0));
        PatternRule { lhs, rhs, lossy }
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    /// True when `t` matches the source pattern of direction `dir`.
    pub fn matches(&self, t: &Term, dir: Direction) -> bool {
        let (from, _) = self.sides(dir);
        match_pattern(from, t, &mut [None, None, None])
    }

    fn sides(&self, dir: Direction) -> (&Term, &Term) {
        match dir {
            Direction::Fwd => (&self.lhs, &self.rhs),
            Direction::Rev => (&self.rhs, &self.lhs),
        }
    }

    pub fn rewrite(&self, slot: &mut Term, dir: Direction, bind: &Binding) -> Result<Binding, RedexError> {
        let (from, to) = self.sides(dir);
        let mut matched = [None, None, None];
        if !match_pattern(from, slot, &mut matched) {
            return Err(RedexError::Mismatch);
        }
        let mut need = [0usize; 3];
        meta_counts(to, &mut need);
        for i in 0..3 {
            match (&matched[i], &bind.terms[i]) {
                (Some(m), Some(given)) if *m != given => return Err(RedexError::Mismatch),
                (None, None) if need[i] > 0 => return Err(RedexError::MissingWitness(META_NAMES[i])),
                _ => {}
            }
        }
        let old = mem::replace(slot, Term::var(1));
        let mut vals: [Option<Term>; 3] = [None, None, None];
        extract(from, old, &mut vals);
        let mut recorded = Binding::default();
        for i in 0..3 {
            if !self.lossy[i] {
                continue;
            }
            if need[i] == 0 {
                // consumed by this step
                recorded.terms[i] = vals[i].take();
            } else {
                recorded.terms[i] = bind.terms[i].clone();
                vals[i] = bind.terms[i].clone();
            }
        }
        *slot = build(to, &mut vals, &mut need);
        Ok(recorded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse, Signature};

    fn b(w: &str) -> Term {
        parse(w, &Signature::boolean()).unwrap()
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    struct Toy;

    impl fmt::Display for Toy {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("T")
        }
    }

    /// `(0∧u) ↔ 0`
    struct Absorb(PatternRule);

    impl RuleSystem for Absorb {
        type Rule = Toy;
        fn rewrite(&self, slot: &mut Term, _: Toy, dir: Direction, bind: &Binding) -> Result<Binding, RedexError> {
            self.0.rewrite(slot, dir, bind)
        }
    }

    fn absorb() -> Absorb {
        Absorb(PatternRule::new(b("(0∧x1)"), b("0")))
    }

    #[test]
    fn lossy_steps_record_and_reverse() {
        let sys = absorb();
        let mut rec = Recorder::new(&sys, b("(x2∨(0∧¬(x3)))"));
        rec.step(Toy, &[2], Direction::Fwd);
        let cert = rec.finish();
        assert_eq!(cert.target, b("(x2∨0)"));
        assert_eq!(cert.steps[0].bind.terms[0], Some(b("¬(x3)")));
        assert!(verify(&sys, &cert).is_valid());
        assert!(verify(&sys, &cert.reversed()).is_valid());
    }

    #[test]
    fn failures_are_reported() {
        let sys = absorb();
        let t = b("(x2∨0)");
        let bare = Step::new(Toy, vec![2], Direction::Rev);
        assert!(matches!(apply(&sys, &t, &bare), Err(RewriteError::MissingWitness { name: "u", .. })));
        let off = Step::new(Toy, vec![1], Direction::Fwd);
        assert!(matches!(apply(&sys, &t, &off), Err(RewriteError::RedexMismatch { .. })));
        let gone = Step::new(Toy, vec![3], Direction::Fwd);
        assert!(matches!(apply(&sys, &t, &gone), Err(RewriteError::InvalidPosition(_))));
        let wrong = Step::new(Toy, vec![], Direction::Fwd)
            .with_bind(Binding::default().with_term(0, b("x1")));
        assert!(matches!(apply(&sys, &b("(0∧x2)"), &wrong), Err(RewriteError::RedexMismatch { .. })));
        let cert = Certificate { source: t.clone(), target: b("x2"), steps: vec![] };
        assert_eq!(verify(&sys, &cert), Verdict::TargetMismatch { reached: t });
    }

    #[test]
    fn nonlinear_patterns() {
        let rule = PatternRule::new(b("(x1∨x1)"), b("x1"));
        assert!(rule.matches(&b("(¬(x1)∨¬(x1))"), Direction::Fwd));
        assert!(!rule.matches(&b("(x1∨x2)"), Direction::Fwd));
        let mut t = b("x4");
        rule.rewrite(&mut t, Direction::Rev, &Binding::default()).unwrap();
        assert_eq!(t, b("(x4∨x4)"));
    }
}
