//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use termcalc_core::boolean::{to_dnf, verify_bt_certificate, BtRule, BtRules};
use termcalc_core::lll::{
    event_monochromatic, lll_condition, search_coloring, verify_block_independence, verify_lll_hypothesis, is_proper,
    ColoringSpace, Hypergraph, LllOptions, SearchMode,
};
use termcalc_core::poly::{ExponentVector, Flavor, PolyRing, StandardPolynomial};
use termcalc_core::prob::{bit_check, complement_closure_check, tuples_independent};
use termcalc_core::random::{
    bool_atoms, enumerate_terms, random_bool_term, random_et_step, random_et_walk, random_product_space,
    random_ring_term, random_term, ring_constants, RingTermShape,
};
use termcalc_core::rewrite::{Binding, Certificate, Direction, RedexError, RuleSystem, Step, META_NAMES};
use termcalc_core::ring::{ring_axiom_suite, Ring, Scalar};
use termcalc_core::ring_terms::{
    count_additive_monomials, f_equivalence_certificate, literal, normalize_to_standard, parse_ring_term, psi,
    s_equivalent, verify_certificate, EtRule,
};
use termcalc_core::term::{parse, tokenize, Signature, Term};
use termcalc_core::BigRational;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

/// Fails the outcome when it took longer than `limit`.
fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            out.ok = false;
            out.detail = format!("{} (took {:.1?}, limit {:?})", out.detail, took, limit);
        }
    }
    (out, took)
}

fn rt(w: &str, ring: &Ring) -> Term {
    parse_ring_term(w, ring).unwrap()
}

fn poly(ring: &Ring, terms: &[(&[u32], i64)]) -> StandardPolynomial {
    let terms: Vec<_> = terms.iter().map(|(e, c)| (e.to_vec(), Scalar::from_int(*c))).collect();
    StandardPolynomial::from_terms(ring, Flavor::Unbounded, terms).unwrap()
}

fn c1_psi_examples() -> Outcome {
    let z = Ring::Integers;
    let z2 = Ring::modular(2);
    let cases: Vec<(&str, Ring, StandardPolynomial)> = vec![
        ("(x1+x2)", z.clone(), poly(&z, &[(&[1], 1), (&[0, 1], 1)])),
        ("(x2·(x1+x5))", z.clone(), poly(&z, &[(&[1, 1], 1), (&[0, 1, 0, 0, 1], 1)])),
        ("((1+c{1})·c{1})", z.clone(), poly(&z, &[(&[], 2)])),
        ("((1+c{1})·c{1})", z2.clone(), StandardPolynomial::zero(&z2, Flavor::Unbounded)),
    ];
    let mut slowest = Duration::ZERO;
    for (w, ring, want) in cases {
        let t = rt(w, &ring);
        let start = Instant::now();
        let got = psi(&t, &ring);
        slowest = slowest.max(start.elapsed());
        if got != want {
            return fail(format!("Ψ[{w}] over {ring} = {got}, expected {want}"));
        }
    }
    // {(∅,2)}: the only exponent vector is the empty one
    let two = psi(&rt("((1+c{1})·c{1})", &z), &z);
    if two.support().collect::<Vec<_>>() != [&ExponentVector::empty(Flavor::Unbounded)] {
        return fail("Ψ[((1+c{1})·c{1})] does not have support {∅}");
    }
    if slowest > Duration::from_millis(1) {
        return fail(format!("slowest evaluation {slowest:?} exceeds 1 ms"));
    }
    pass(format!("4 values exact, slowest {slowest:?}"))
}

fn c2_worked_chain() -> Outcome {
    let z = Ring::Integers;
    let chain = Certificate {
        source: rt("((x7+c{1})·x3)", &z),
        target: rt("((x3·x7)+x3)", &z),
        steps: [(6, vec![]), (9, vec![]), (6, vec![2]), (0, vec![2, 1]), (4, vec![2])]
            .into_iter()
            .map(|(n, pos)| {
                let dir = if n == 0 { Direction::Rev } else { Direction::Fwd };
                Step::new(EtRule::from_number(n).unwrap(), pos, dir)
            })
            .collect(),
    };
    let v = verify_certificate(&chain, &z);
    if v.is_valid() {
        pass("rules 6,9,6,0,4 replay to ((x3·x7)+x3)")
    } else {
        fail(format!("{v:?}"))
    }
}

/// A leaf of `t` replaced by a random atom.
fn mutate(rng: &mut ChaCha8Rng, ring: &Ring, t: &Term) -> Term {
    let leaves: Vec<_> = t.positions().into_iter().filter(|p| t.subterm_at(p).unwrap().is_atomic()).collect();
    let p = leaves.choose(rng).unwrap();
    let atom = if rng.gen_bool(0.5) {
        Term::var(rng.gen_range(1..=6))
    } else {
        literal(ring_constants(ring).choose(rng).unwrap())
    };
    t.replace_at(p, atom).unwrap()
}

fn c3_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let shape = RingTermShape::default();
    let mut report = Vec::new();
    for ring in [Ring::Integers, Ring::modular(2), Ring::modular(6)] {
        let (mut equivalent, mut certified) = (0, 0);
        for i in 0..5000 {
            let t = random_ring_term(&mut rng, &ring, shape);
            let u = match i % 3 {
                0 => random_et_walk(&mut rng, &ring, &t, 8, 80).target,
                1 => random_ring_term(&mut rng, &ring, shape),
                _ => {
                    let w = random_et_walk(&mut rng, &ring, &t, 4, 80).target;
                    mutate(&mut rng, &ring, &w)
                }
            };
            let s_eq = s_equivalent(&t, &u, &ring);
            let cert = f_equivalence_certificate(&t, &u, &ring);
            if s_eq != cert.is_ok() {
                return fail(format!("over {ring}: s-equivalence {s_eq} disagrees on {t} and {u}"));
            }
            if let Ok(c) = cert {
                equivalent += 1;
                if c.source != t || c.target != u || !verify_certificate(&c, &ring).is_valid() {
                    return fail(format!("over {ring}: certificate for {t} ≈ {u} does not verify"));
                }
                certified += 1;
            }
        }
        let mut applied = 0;
        while applied < 5000 {
            let t = random_ring_term(&mut rng, &ring, shape);
            let Some((step, u)) = random_et_step(&mut rng, &ring, &t, 60) else { continue };
            applied += 1;
            if psi(&t, &ring) != psi(&u, &ring) {
                return fail(format!("over {ring}: {} ({}) at {} changes Ψ of {t}", step.rule, step.dir.name(), step.pos));
            }
        }
        report.push(format!("{ring}: {equivalent}/5000 equivalent, {certified} certified, 5000 ET steps sound"));
    }
    pass(report.join("; "))
}

fn c4_ring_axioms() -> Outcome {
    let mut parts = Vec::new();
    for ring in [Ring::Integers, Ring::modular(6), Ring::Rationals] {
        let r = ring_axiom_suite(&PolyRing::new(ring.clone()), 2000, 4);
        if !r.passed() {
            return fail(format!("over {ring}: {:?}", r.counterexamples));
        }
        parts.push(format!("{ring}: {} families", r.checked.len()));
        if r.checked.len() != 8 {
            return fail(format!("over {ring}: only {} families checked", r.checked.len()));
        }
    }
    pass(format!("2000 triples (6000 for distributivity) each; {}", parts.join(", ")))
}

fn c5_carrier_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for ring in [Ring::Integers, Ring::modular(2), Ring::modular(6), Ring::Rationals] {
        for _ in 0..2000 {
            let t = random_ring_term(&mut rng, &ring, RingTermShape::default());
            let n = normalize_to_standard(&t, &ring);
            if psi(&t, &ring) != n.standard.carrier() {
                return fail(format!("over {ring}: Ψ[{t}] differs from the carrier of its standard term"));
            }
        }
    }
    pass("2000 terms over each of Z, Zm:2, Zm:6, Q")
}

/// Non-constant terms with `Ψ = ∅`.
fn zero_instances(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Ring, Term)> {
    let mut out = Vec::new();
    let shape = RingTermShape { max_depth: 3, vars: 4, max_expansion: 16 };
    while out.len() < count {
        let ring = [Ring::Integers, Ring::modular(2), Ring::modular(6), Ring::Rationals][out.len() % 4].clone();
        let p = random_ring_term(rng, &ring, shape);
        let minus_one = literal(&ring.neg(&ring.one()));
        let t = match rng.gen_range(0..4) {
            0 => Term::binary("+", p.clone(), Term::binary("·", minus_one, p)),
            1 => Term::binary("·", Term::constant("0"), p),
            2 => Term::binary("·", p, Term::binary("+", Term::var(1), Term::binary("·", minus_one, Term::var(1)))),
            _ => match &ring {
                Ring::Modular(m) => Term::binary("·", literal(&Scalar::from_int(i64::try_from(m.clone()).unwrap())), p),
                _ => Term::binary("·", literal(&ring.zero()), p),
            },
        };
        let t = termcalc_core::ring_terms::canonicalize_ring_term(&t, &ring).unwrap();
        if t.variables().is_empty() || !psi(&t, &ring).is_zero() {
            continue;
        }
        out.push((ring, t));
    }
    out
}

fn c6_et10_necessity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let instances = zero_instances(&mut rng, 240);
    for (ring, t) in &instances {
        let zero = Term::constant("0");
        let cert = match f_equivalence_certificate(t, &zero, ring) {
            Ok(c) => c,
            Err(_) => return fail(format!("no certificate for {t} ≈ 0 over {ring}")),
        };
        if !verify_certificate(&cert, ring).is_valid() {
            return fail(format!("certificate for {t} ≈ 0 over {ring} does not verify"));
        }
        if !cert.steps.iter().any(|s| s.rule == EtRule::MulZero) {
            return fail(format!("certificate for {t} ≈ 0 over {ring} has no ET10 step"));
        }
    }
    pass(format!("{} instances, each certificate uses ET10", instances.len()))
}

fn c7_additive_monomials() -> Outcome {
    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    let mut got = Vec::new();
    for n in 1..=5u64 {
        let fact: u64 = (1..=n).product();
        let formula = binom(2 * n - 2, n - 1) * fact / n;
        let count = count_additive_monomials(n as u32) as u64;
        if count != formula {
            return fail(format!("n={n}: enumerated {count}, formula {formula}"));
        }
        got.push(count.to_string());
    }
    if got != ["1", "2", "12", "120", "1680"] {
        return fail(format!("counts {got:?}"));
    }
    pass(format!("counts {}", got.join(", ")))
}

/// Truth-table oracle: direct recursion over the term.
fn oracle(t: &Term, a: u32) -> bool {
    match t {
        Term::Var(v) => a >> (v.index() - 1) & 1 == 1,
        Term::Const(s) => s.as_str() == "1",
        Term::Unary(_, x) => !oracle(x, a),
        Term::Binary(s, x, y) if s.as_str() == "∨" => oracle(x, a) || oracle(y, a),
        Term::Binary(_, x, y) => oracle(x, a) && oracle(y, a),
        Term::Nary(..) => unreachable!("no k-ary Boolean symbols"),
    }
}

fn table(t: &Term, n: u32) -> Vec<bool> {
    (0..1u32 << n).map(|a| oracle(t, a)).collect()
}

fn check_dnf(t: &Term, n: u32) -> Result<(), String> {
    let out = to_dnf(t, n).map_err(|e| format!("{t}: {e}"))?;
    let target = &out.certificate.target;
    if table(target, n) != table(t, n) {
        return Err(format!("{t} (n={n}): DNF {target} has a different truth table"));
    }
    if !verify_bt_certificate(&out.certificate).is_valid() {
        return Err(format!("{t} (n={n}): certificate does not verify"));
    }
    let again = to_dnf(target, n).map_err(|e| e.to_string())?;
    if !again.certificate.steps.is_empty() || again.dnf != out.dnf {
        return Err(format!("{t} (n={n}): not idempotent on {target}"));
    }
    Ok(())
}

fn c8_dnf() -> Outcome {
    let all = enumerate_terms(&Signature::boolean(), &bool_atoms(3), 7);
    for t in &all {
        if let Err(e) = check_dnf(t, 3) {
            return fail(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut larger = 0;
    let mut monomials = 0;
    while larger < 2000 {
        let n = rng.gen_range(1..=8);
        let t = random_bool_term(&mut rng, 5, n);
        if t.size() <= 7 {
            continue;
        }
        larger += 1;
        if let Err(e) = check_dnf(&t, n) {
            return fail(e);
        }
        monomials += to_dnf(&t, n).unwrap().dnf.len();
    }
    pass(format!("{} exhaustive terms (n=3), {larger} random larger terms ({monomials} monomials)", all.len()))
}

fn c9_bt_soundness() -> Outcome {
    let sys = BtRules::new();
    let all = enumerate_terms(&Signature::boolean(), &bool_atoms(3), 7);
    let witnesses = [Term::var(1), Term::unary("¬", Term::var(3))];
    let mut applied = 0u64;
    for t in &all {
        let before = table(t, 3);
        for p in t.positions() {
            let sub = t.subterm_at(&p).unwrap();
            for rule in BtRule::ALL {
                for dir in [Direction::Fwd, Direction::Rev] {
                    if !sys.pattern(rule).matches(sub, dir) {
                        continue;
                    }
                    for w in &witnesses {
                        // supply a witness only for the metavariables the step asks for
                        let mut bind = Binding::default();
                        let mut slot = sub.clone();
                        let res = loop {
                            match sys.rewrite(&mut slot, rule, dir, &bind) {
                                Err(RedexError::MissingWitness(name)) => {
                                    let i = META_NAMES.iter().position(|m| *m == name).unwrap();
                                    bind = bind.with_term(i, w.clone());
                                }
                                other => break other,
                            }
                        };
                        if res.is_err() {
                            return fail(format!("{rule} ({}) matches {sub} but does not apply", dir.name()));
                        }
                        let after = t.replace_at(&p, slot).unwrap();
                        applied += 1;
                        if table(&after, 3) != before {
                            return fail(format!("{rule} ({}) at {p} changes the truth table of {t}", dir.name()));
                        }
                        if bind.is_empty() {
                            break;
                        }
                    }
                }
            }
        }
    }
    pass(format!("{applied} rule applications over {} terms", all.len()))
}

fn c10_bit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut monomials = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=3);
        let inst = random_product_space(&mut rng, n, 16);
        let pre = tuples_independent(&inst.fps, &inst.left, &inst.right).unwrap();
        if !pre.independent {
            return fail("generator tuples of a product space are not independent");
        }
        let t = random_bool_term(&mut rng, 4, n as u32);
        let u = random_bool_term(&mut rng, 4, n as u32);
        let r = match bit_check(&inst.fps, &t, &u, &inst.events()) {
            Ok(r) => r,
            Err(e) => return fail(format!("{t}, {u}: {e}")),
        };
        if !r.all_passed() {
            return fail(format!("{t}, {u}: {r:?}"));
        }
        monomials += r.monomials;
    }
    pass(format!("500 spaces, Pr(a∧b) = Pr(a)·Pr(b) and all pipeline checks hold ({monomials} wedge monomials)"))
}

fn c11_complements() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    let mut selections = 0;
    for i in 0..120 {
        let n = 1 + i % 3;
        let inst = random_product_space(&mut rng, n, 16);
        let r = match complement_closure_check(&inst.fps, &inst.left, &inst.right, 0, &mut rng) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        if !r.exhaustive || r.selections != 1 << (2 * n) {
            return fail(format!("n={n}: {} selections, exhaustive {}", r.selections, r.exhaustive));
        }
        if !r.holds() {
            return fail(format!("complement pattern {:?} breaks independence", r.failure));
        }
        selections += r.selections;
    }
    pass(format!("120 spaces, {selections} complement patterns, all independent"))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn c12_lll() -> Outcome {
    let h = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
    let space = ColoringSpace::of(&h).unwrap();
    let af = event_monochromatic(&space, &h, 0).unwrap();
    let ag = event_monochromatic(&space, &h, 1).unwrap();
    if space.fps().pr(&af) != q(1, 4) || space.fps().pr(&(&af & &ag)) != q(1, 16) {
        return fail("triangle probabilities differ from 1/4 and 1/16");
    }
    let report = verify_lll_hypothesis(&h, &LllOptions::default()).unwrap();
    if !report.hypothesis_verified() {
        return fail(format!("{report:?}"));
    }
    let vs: Vec<usize> = (0..6).collect();
    let small: Vec<Vec<usize>> = (0u32..64)
        .filter(|m| m.count_ones() <= 2)
        .map(|m| vs.iter().copied().filter(|v| m >> v & 1 == 1).collect())
        .collect();
    let mut pairs = 0;
    for x in &small {
        for y in &small {
            if x.iter().any(|v| y.contains(v)) {
                continue;
            }
            let r = verify_block_independence(&space, x, y).unwrap();
            if !r.holds() {
                return fail(format!("B_X, B_Y dependent for X={x:?}, Y={y:?}"));
            }
            pairs += 1;
        }
    }
    let h4 = Hypergraph::new(7, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]]).unwrap();
    if (h4.k(), h4.d()) != (4, 1) || !lll_condition(4, 1) {
        return fail("k=4, d=1 instance does not satisfy e(d+1) ≤ 2^(k-1)");
    }
    let s = search_coloring(&h4, &LllOptions::default()).unwrap();
    match s.found {
        Some(c) if s.mode == SearchMode::Exhaustive && is_proper(&h4, &c) => {}
        _ => return fail("no proper colouring found for the k=4, d=1 instance"),
    }
    pass(format!("Pr(A_f)=1/4, Pr(A_f∧A_f')=1/16, {pairs} block pairs independent, k=4 d=1 coloured"))
}

/// Length of the word form from the four formation rules.
fn formula_len(t: &Term) -> usize {
    match t {
        Term::Const(_) | Term::Var(_) => 1,
        Term::Unary(_, a) => formula_len(a) + 3,
        Term::Binary(_, a, b) => formula_len(a) + formula_len(b) + 3,
        Term::Nary(_, args) => args.iter().map(formula_len).sum::<usize>() + args.len() + 2,
    }
}

fn c13_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0013);
    let custom = Signature::new()
        .with_symbol("f", 3)
        .and_then(|s| s.with_symbol("g", 4))
        .and_then(|s| s.with_symbol("h", 1))
        .and_then(|s| s.with_symbol("⊕", 2))
        .and_then(|s| s.with_symbol("ab", 0))
        .and_then(|s| s.with_symbol("a", 0))
        .unwrap();
    let ring_atoms: Vec<Term> = ring_constants(&Ring::Rationals).iter().map(literal).collect();
    let sigs = [("ring", Signature::ring(), ring_atoms), ("boolean", Signature::boolean(), vec![]), ("k-ary", custom, vec![])];
    for (name, sig, extra) in &sigs {
        for _ in 0..10_000 {
            let vars = rng.gen_range(1..=9);
            let t = random_term(&mut rng, sig, 6, vars, extra);
            let word = t.serialize();
            match parse(&word, sig) {
                Ok(back) if back == t => {}
                other => return fail(format!("{name}: {word} reads back as {other:?}")),
            }
            let letters = tokenize(&word, sig).unwrap().len();
            if letters != formula_len(&t) || t.word_len() != letters {
                return fail(format!("{name}: {word} has {letters} letters, formula gives {}", formula_len(&t)));
            }
        }
    }
    pass("10000 terms each over the ring, Boolean and k-ary signatures")
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<u64>, fn() -> Outcome)> = vec![
        ("worked Ψ examples", None, c1_psi_examples),
        ("worked f-equivalence chain", None, c2_worked_chain),
        ("s-equivalence agrees with certified f-equivalence", Some(60), c3_equivalence),
        ("ring axioms of R[x1,x2,…]", Some(30), c4_ring_axioms),
        ("carrier law", None, c5_carrier_law),
        ("ET10 necessity", None, c6_et10_necessity),
        ("additive monomial counts", None, c7_additive_monomials),
        ("DNF correctness", Some(60), c8_dnf),
        ("BT soundness", None, c9_bt_soundness),
        ("independence of term images", None, c10_bit),
        ("complementation keeps independence", None, c11_complements),
        ("hypergraph colouring verification", Some(30), c12_lll),
        ("parser round trip and length formulas", None, c13_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (out, took) = timed(limit.map(Duration::from_secs), f);
        let verdict = if out.ok { "PASS" } else { "FAIL" };
        if !out.ok {
            failed += 1;
        }
        println!("{verdict} {:>2} {name}: {} [{:.2?}]", i + 1, out.detail, took);
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
