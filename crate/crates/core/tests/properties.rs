use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use termcalc_core::boolean::{
    bool_eval, to_dnf, truth_table, verify_bt_certificate, wedge_of_dnfs, BooleanAlgebra, DnfTerm, PowerSet, TwoElement,
};
use termcalc_core::prob::{tuples_independent, Event, Fps};
use termcalc_core::random::{random_bool_term, random_bt_step, random_et_walk, random_ring_term, random_term, RingTermShape};
use termcalc_core::ring::Ring;
use termcalc_core::ring_terms::{psi, verify_certificate};
use termcalc_core::term::{parse, Signature, Term};
use termcalc_core::BigRational;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ring_strategy() -> impl Strategy<Value = Ring> {
    prop_oneof![Just(Ring::Integers), Just(Ring::modular(2)), Just(Ring::modular(6)), Just(Ring::Rationals)]
}

const SMALL: RingTermShape = RingTermShape { max_depth: 4, vars: 4, max_expansion: 32 };

fn event(len: usize, mask: u64) -> Event {
    Event::from_fn(len, |i| i < 64 && mask >> i & 1 == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bt_steps_preserve_truth_tables(seed: u64, n in 1u32..=4) {
        let mut r = rng(seed);
        let t = random_bool_term(&mut r, 4, n);
        if let Some((step, u)) = random_bt_step(&mut r, &t, n, 40) {
            prop_assert_eq!(truth_table(&t, n).unwrap(), truth_table(&u, n).unwrap(), "{} at {}", step.rule, step.pos);
        }
    }

    #[test]
    fn dnf_is_unique_and_idempotent(seed: u64, n in 1u32..=4) {
        let mut r = rng(seed);
        let t = random_bool_term(&mut r, 4, n);
        let out = to_dnf(&t, n).unwrap();
        prop_assert!(verify_bt_certificate(&out.certificate).is_valid());
        prop_assert_eq!(truth_table(&out.certificate.target, n).unwrap(), truth_table(&t, n).unwrap());
        // the DNF depends only on the truth table
        let table = truth_table(&t, n).unwrap();
        let types = table.iter().map(|a| (0..n).map(|i| a >> i & 1 == 0).collect::<Vec<bool>>());
        prop_assert_eq!(&out.dnf, &DnfTerm::standard(n, types).unwrap());
        let again = to_dnf(&out.certificate.target, n).unwrap();
        prop_assert!(again.certificate.steps.is_empty());
        prop_assert_eq!(again.dnf, out.dnf);
    }

    #[test]
    fn disjunction_and_conjunction_match_the_dnf_algebra(seed: u64, n in 1u32..=3) {
        let mut r = rng(seed);
        let t = random_bool_term(&mut r, 3, n);
        let u = random_bool_term(&mut r, 3, n);
        let (dt, du) = (to_dnf(&t, n).unwrap().dnf, to_dnf(&u, n).unwrap().dnf);
        let or = to_dnf(&Term::binary("∨", t.clone(), u.clone()), n).unwrap().dnf;
        let union: Vec<Vec<bool>> = dt.types().union(du.types()).cloned().collect();
        prop_assert_eq!(or, DnfTerm::standard(n, union).unwrap());
        let and = to_dnf(&Term::binary("∧", t, u), n).unwrap().dnf;
        prop_assert_eq!(and, wedge_of_dnfs(&dt, &du).unwrap());
    }

    #[test]
    fn modularity(weights in prop::collection::vec(1u32..20, 1..12), a: u64, b: u64) {
        let ws: Vec<BigRational> = weights.iter().map(|&w| BigRational::from_integer(w.into())).collect();
        let total: BigRational = ws.iter().sum();
        let ws: Vec<BigRational> = ws.into_iter().map(|w| w / &total).collect();
        let fps = Fps::weighted(&ws).unwrap();
        let (a, b) = (event(fps.size(), a), event(fps.size(), b));
        prop_assert_eq!(fps.pr(&(&a | &b)) + fps.pr(&(&a & &b)), fps.pr(&a) + fps.pr(&b));
        prop_assert_eq!(fps.pr(&!&a) + fps.pr(&a), BigRational::from_integer(1.into()));
    }

    #[test]
    fn independence_is_symmetric(size in 1usize..12, masks in prop::collection::vec(any::<u64>(), 2..5), split in 1usize..4) {
        let fps = Fps::uniform(size).unwrap();
        let events: Vec<Event> = masks.iter().map(|&m| event(size, m)).collect();
        let split = split.min(events.len() - 1);
        let (xs, ys) = events.split_at(split);
        let ab = tuples_independent(&fps, xs, ys).unwrap().independent;
        let ba = tuples_independent(&fps, ys, xs).unwrap().independent;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn parser_round_trip(seed: u64, which in 0usize..2) {
        let mut r = rng(seed);
        let sig = if which == 0 { Signature::ring() } else { Signature::boolean() };
        let t = random_term(&mut r, &sig, 5, 9, &[]);
        let word = t.serialize();
        prop_assert_eq!(parse(&word, &sig).unwrap(), t);
    }

    #[test]
    fn psi_is_a_homomorphism(seed: u64, ring in ring_strategy()) {
        let mut r = rng(seed);
        let t = random_ring_term(&mut r, &ring, SMALL);
        let u = random_ring_term(&mut r, &ring, SMALL);
        let (pt, pu) = (psi(&t, &ring), psi(&u, &ring));
        prop_assert_eq!(psi(&Term::binary("+", t.clone(), u.clone()), &ring), pt.add(&pu).unwrap());
        prop_assert_eq!(psi(&Term::binary("·", t, u), &ring), pt.mul(&pu).unwrap());
    }

    #[test]
    fn reversed_certificates_verify(seed: u64, ring in ring_strategy(), steps in 1usize..10) {
        let mut r = rng(seed);
        let t = random_ring_term(&mut r, &ring, SMALL);
        let walk = random_et_walk(&mut r, &ring, &t, steps, 80);
        prop_assert!(verify_certificate(&walk, &ring).is_valid());
        let back = walk.reversed();
        prop_assert_eq!(&back.target, &t);
        prop_assert!(verify_certificate(&back, &ring).is_valid());
        prop_assert_eq!(psi(&walk.target, &ring), psi(&t, &ring));
    }

    #[test]
    fn two_element_evaluation_matches_truth_table(seed: u64, n in 1u32..=4, assignment in 0u32..16) {
        let mut r = rng(seed);
        let t = random_bool_term(&mut r, 4, n);
        let a = assignment % (1 << n);
        let args: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
        let v = bool_eval(&t, &TwoElement, &args).unwrap();
        prop_assert_eq!(v, truth_table(&t, n).unwrap().contains(a as usize));
    }

    #[test]
    fn power_set_axioms(size in 1usize..=64, a: u64, b: u64, c: u64) {
        let alg = PowerSet { universe: size };
        let (a, b, c) = (event(size, a), event(size, b), event(size, c));
        check_axioms(&alg, &a, &b, &c)?;
    }
}

#[test]
fn two_element_axioms() {
    for a in [false, true] {
        for b in [false, true] {
            for c in [false, true] {
                check_axioms(&TwoElement, &a, &b, &c).unwrap();
            }
        }
    }
}

fn check_axioms<B: BooleanAlgebra>(alg: &B, a: &B::Elem, b: &B::Elem, c: &B::Elem) -> Result<(), TestCaseError>
where
    B::Elem: PartialEq + std::fmt::Debug,
{
    let (j, m) = (|x: &B::Elem, y: &B::Elem| alg.join(x, y), |x: &B::Elem, y: &B::Elem| alg.meet(x, y));
    prop_assert_eq!(j(a, b), j(b, a));
    prop_assert_eq!(m(a, b), m(b, a));
    prop_assert_eq!(j(a, &j(b, c)), j(&j(a, b), c));
    prop_assert_eq!(m(a, &m(b, c)), m(&m(a, b), c));
    prop_assert_eq!(j(a, &m(a, b)), a.clone());
    prop_assert_eq!(m(a, &j(a, b)), a.clone());
    prop_assert_eq!(m(a, &j(b, c)), j(&m(a, b), &m(a, c)));
    prop_assert_eq!(j(a, &m(b, c)), m(&j(a, b), &j(a, c)));
    prop_assert_eq!(j(a, &alg.complement(a)), alg.one());
    prop_assert_eq!(m(a, &alg.complement(a)), alg.zero());
    prop_assert_eq!(j(a, &alg.zero()), a.clone());
    prop_assert_eq!(m(a, &alg.one()), a.clone());
    Ok(())
}
