//! Smaller versions of the invariant sweeps, seeded by `--seed`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use termcalc_core::boolean::{to_dnf, truth_table, verify_bt_certificate};
use termcalc_core::lll::{verify_lll_hypothesis, Hypergraph, LllOptions};
use termcalc_core::poly::PolyRing;
use termcalc_core::prob::bit_check;
use termcalc_core::random::{
    random_bool_term, random_bt_step, random_et_walk, random_product_space, random_ring_term, random_term,
    RingTermShape,
};
use termcalc_core::ring::{ring_axiom_suite, Ring};
use termcalc_core::ring_terms::{f_equivalence_certificate, psi, s_equivalent, verify_certificate};
use termcalc_core::term::{parse, Signature};

use crate::Report;

type Check = fn(&mut ChaCha8Rng) -> Result<String, String>;

fn rings() -> [Ring; 3] {
    [Ring::Integers, Ring::modular(2), Ring::modular(6)]
}

fn ring_axioms(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for ring in rings() {
        let r = ring_axiom_suite(&PolyRing::new(ring.clone()), 200, rng.gen());
        if !r.passed() {
            return Err(format!("over {ring}: {:?}", r.counterexamples));
        }
    }
    Ok("200 triples per ring".into())
}

fn equivalence(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let shape = RingTermShape { max_depth: 4, vars: 4, max_expansion: 32 };
    let mut certified = 0;
    for ring in rings() {
        for i in 0..300 {
            let t = random_ring_term(rng, &ring, shape);
            let u = if i % 2 == 0 { random_et_walk(rng, &ring, &t, 6, 60).target } else { random_ring_term(rng, &ring, shape) };
            let cert = f_equivalence_certificate(&t, &u, &ring);
            if s_equivalent(&t, &u, &ring) != cert.is_ok() {
                return Err(format!("over {ring}: {t} and {u}"));
            }
            if let Ok(c) = cert {
                if !verify_certificate(&c, &ring).is_valid() {
                    return Err(format!("over {ring}: certificate for {t} ≈ {u}"));
                }
                certified += 1;
            }
        }
    }
    Ok(format!("900 pairs, {certified} certificates replayed"))
}

fn dnf(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..300 {
        let n = rng.gen_range(1..=4);
        let t = random_bool_term(rng, 4, n);
        let out = to_dnf(&t, n).map_err(|e| e.to_string())?;
        let same = truth_table(&out.certificate.target, n) == truth_table(&t, n);
        if !same || !verify_bt_certificate(&out.certificate).is_valid() {
            return Err(format!("{t}"));
        }
        if let Some((step, u)) = random_bt_step(rng, &t, n, 20) {
            if truth_table(&u, n) != truth_table(&t, n) {
                return Err(format!("{} at {} on {t}", step.rule, step.pos));
            }
        }
    }
    Ok("300 terms".into())
}

fn independence(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let inst = random_product_space(rng, n, 16);
        let (t, u) = (random_bool_term(rng, 3, n as u32), random_bool_term(rng, 3, n as u32));
        let r = bit_check(&inst.fps, &t, &u, &inst.events()).map_err(|e| e.to_string())?;
        if !r.all_passed() {
            return Err(format!("{t}, {u}"));
        }
    }
    Ok("50 product spaces".into())
}

fn coloring(_: &mut ChaCha8Rng) -> Result<String, String> {
    let h = Hypergraph::new(7, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]]).map_err(|e| e.to_string())?;
    let r = verify_lll_hypothesis(&h, &LllOptions::default()).map_err(|e| e.to_string())?;
    let found = r.search.as_ref().is_some_and(|s| s.found.is_some());
    if r.hypothesis_verified() && r.condition_holds && found {
        Ok("k = 4, d = 1 instance coloured".into())
    } else {
        Err(format!("{r:?}"))
    }
}

fn parser(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for sig in [Signature::ring(), Signature::boolean()] {
        for _ in 0..1000 {
            let t = random_term(rng, &sig, 5, 9, &[]);
            if parse(&t.serialize(), &sig).as_ref() != Ok(&t) {
                return Err(t.serialize());
            }
        }
    }
    Ok("2000 terms".into())
}

fn homomorphism(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let shape = RingTermShape { max_depth: 3, vars: 3, max_expansion: 16 };
    for ring in rings() {
        for _ in 0..200 {
            let (t, u) = (random_ring_term(rng, &ring, shape), random_ring_term(rng, &ring, shape));
            let sum = termcalc_core::term::Term::binary("+", t.clone(), u.clone());
            if psi(&sum, &ring) != psi(&t, &ring).add(&psi(&u, &ring)).map_err(|e| e.to_string())? {
                return Err(format!("over {ring}: {t}, {u}"));
            }
        }
    }
    Ok("600 sums".into())
}

pub fn run(seed: u64) -> Report {
    let checks: [(&str, Check); 7] = [
        ("ring axioms of the polynomial ring", ring_axioms),
        ("s-equivalence matches certificates", equivalence),
        ("Ψ respects sums", homomorphism),
        ("DNF and rule soundness", dnf),
        ("Boolean independence", independence),
        ("hypergraph colouring", coloring),
        ("parser round trip", parser),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let mut results = Vec::new();
    let mut all = true;
    for (name, check) in checks {
        let r = check(&mut rng);
        all &= r.is_ok();
        let (tag, detail) = match &r {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        lines.push(format!("{tag} {name}: {detail}"));
        results.push(json!({"check": name, "passed": r.is_ok(), "detail": detail}));
    }
    Report { verdict: all, text: lines.join("\n"), json: json!({"seed": seed, "passed": all, "checks": results}) }
}
