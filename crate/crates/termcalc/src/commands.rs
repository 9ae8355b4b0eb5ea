use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::json;

use termcalc_core::boolean::{bool_eval, parse_bool_term, to_dnf, verify_bt_certificate, BtRule, TwoElement};
use termcalc_core::lll::{verify_lll_hypothesis, Hypergraph, LllOptions, SearchMode};
use termcalc_core::prob::{bit_check, tuples_independent, Event};
use termcalc_core::rewrite::{Certificate, Verdict};
use termcalc_core::ring::Ring;
use termcalc_core::ring_terms::{f_equivalence_certificate, normalize_to_standard, parse_ring_term, psi, verify_certificate, EtRule};
use termcalc_core::term::Term;

use crate::json::{CertificateJson, HypergraphJson, PolynomialJson, SpaceJson};
use crate::{BoolCmd, Cli, Command, Global, ProbCmd, Report, RingCmd};

pub fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Ring(cmd) => ring(cmd, g),
        Command::Bool(cmd) => boolean(cmd),
        Command::Prob(cmd) => prob(cmd),
        Command::Lll { hypergraph, exhaustive } => lll(hypergraph, *exhaustive, g.seed),
        Command::Selftest => Ok(crate::selftest::run(g.seed)),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_certificate<K: Display>(path: &Path, cert: &Certificate<K>) -> Result<()> {
    let text = serde_json::to_string_pretty(&CertificateJson::from_certificate(cert))?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn ring_of(g: &Global) -> Result<Ring> {
    Ring::parse(&g.ring).map_err(|e| anyhow!("{e}"))
}

fn ring_term(w: &str, ring: &Ring) -> Result<Term> {
    parse_ring_term(w, ring).with_context(|| format!("reading ring term {w:?}"))
}

fn bool_term(w: &str) -> Result<Term> {
    parse_bool_term(w).with_context(|| format!("reading Boolean term {w:?}"))
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::Valid => "valid".into(),
        Verdict::StepFailed { index, error } => format!("step {} fails: {error}", index + 1),
        Verdict::TargetMismatch { reached } => format!("the steps end at {reached}, not at the target"),
    }
}

fn ring(cmd: &RingCmd, g: &Global) -> Result<Report> {
    let r = ring_of(g)?;
    match cmd {
        RingCmd::Psi { term } => {
            let t = ring_term(term, &r)?;
            let p = psi(&t, &r);
            Ok(Report {
                verdict: true,
                text: format!("{t} ≐ {p}"),
                json: json!({"ring": r.to_string(), "term": t.to_string(), "psi": PolynomialJson::from_polynomial(&p)}),
            })
        }
        RingCmd::Equiv { t, u, certificate } => {
            let (t, u) = (ring_term(t, &r)?, ring_term(u, &r)?);
            let (pt, pu) = (psi(&t, &r), psi(&u, &r));
            match f_equivalence_certificate(&t, &u, &r) {
                Ok(cert) => {
                    if let Some(path) = certificate {
                        write_certificate(path, &cert)?;
                    }
                    Ok(Report {
                        verdict: true,
                        text: format!("equivalent over {r}: both ≐ {pt}\ncertificate: {} steps", cert.steps.len()),
                        json: json!({
                            "equivalent": true,
                            "ring": r.to_string(),
                            "psi": PolynomialJson::from_polynomial(&pt),
                            "steps": cert.steps.len(),
                        }),
                    })
                }
                Err(_) => Ok(Report {
                    verdict: false,
                    text: format!("not equivalent over {r}\n{t} ≐ {pt}\n{u} ≐ {pu}"),
                    json: json!({
                        "equivalent": false,
                        "ring": r.to_string(),
                        "psi_left": PolynomialJson::from_polynomial(&pt),
                        "psi_right": PolynomialJson::from_polynomial(&pu),
                    }),
                }),
            }
        }
        RingCmd::Normalize { term, certificate } => {
            let t = ring_term(term, &r)?;
            let n = normalize_to_standard(&t, &r);
            if let Some(path) = certificate {
                write_certificate(path, &n.certificate)?;
            }
            let carrier = n.standard.carrier();
            Ok(Report {
                verdict: true,
                text: format!("{}\n≐ {carrier}\n{} steps", n.term, n.certificate.steps.len()),
                json: json!({
                    "ring": r.to_string(),
                    "standard": n.term.to_string(),
                    "psi": PolynomialJson::from_polynomial(&carrier),
                    "steps": n.certificate.steps.len(),
                }),
            })
        }
        RingCmd::CertVerify { file } => {
            let cj: CertificateJson = read_json(file)?;
            let cert: Certificate<EtRule> = cj.to_certificate(|w| ring_term(w, &r), Some(&r))?;
            let v = verify_certificate(&cert, &r);
            Ok(verdict_report(&v, cert.steps.len()))
        }
    }
}

fn verdict_report(v: &Verdict, steps: usize) -> Report {
    Report {
        verdict: v.is_valid(),
        text: format!("certificate {} ({steps} steps)", describe(v)),
        json: json!({"valid": v.is_valid(), "steps": steps, "detail": describe(v)}),
    }
}

fn boolean(cmd: &BoolCmd) -> Result<Report> {
    match cmd {
        BoolCmd::Dnf { term, width, certificate } => {
            let t = bool_term(term)?;
            let n = width.unwrap_or_else(|| t.max_var().max(1));
            let out = to_dnf(&t, n)?;
            if let Some(path) = certificate {
                write_certificate(path, &out.certificate)?;
            }
            let types: Vec<String> =
                out.dnf.types().iter().map(|ty| ty.iter().map(|&neg| if neg { '1' } else { '0' }).collect()).collect();
            Ok(Report {
                verdict: true,
                text: format!("{}\n{} monomials, {} steps", out.certificate.target, out.dnf.len(), out.certificate.steps.len()),
                json: json!({
                    "dnf": out.certificate.target.to_string(),
                    "width": n,
                    "support": out.dnf.support(),
                    "types": types,
                    "steps": out.certificate.steps.len(),
                }),
            })
        }
        BoolCmd::Eval { term, assign } => {
            let t = bool_term(term)?;
            let args = assign
                .split(',')
                .map(|s| match s.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => bail!("assignment entries must be 0 or 1, got {other:?}"),
                })
                .collect::<Result<Vec<bool>>>()?;
            let v = bool_eval(&t, &TwoElement, &args)?;
            Ok(Report { verdict: true, text: u8::from(v).to_string(), json: json!({"value": u8::from(v)}) })
        }
        BoolCmd::CertVerify { file } => {
            let cj: CertificateJson = read_json(file)?;
            let cert: Certificate<BtRule> = cj.to_certificate(bool_term, None)?;
            Ok(verdict_report(&verify_bt_certificate(&cert), cert.steps.len()))
        }
    }
}

fn rational(q: &termcalc_core::BigRational) -> String {
    q.to_string()
}

fn prob(cmd: &ProbCmd) -> Result<Report> {
    match cmd {
        ProbCmd::Indep { space, left, right } => {
            let s = read_json::<SpaceJson>(space)?.load()?;
            let (a, b) = (s.pick(left)?, s.pick(right)?);
            let r = tuples_independent(&s.fps, &a, &b)?;
            let text = match &r.failure {
                None => format!("independent ({} subset pairs checked)", r.checked),
                Some((x, y)) => format!("not independent: fails for left {x:?}, right {y:?} (0-based indices)"),
            };
            Ok(Report {
                verdict: r.independent,
                text,
                json: json!({"independent": r.independent, "checked": r.checked, "failure": r.failure}),
            })
        }
        ProbCmd::Bit { t, u, space, left, right } => {
            let s = read_json::<SpaceJson>(space)?.load()?;
            let (a, b) = (s.pick(left)?, s.pick(right)?);
            if a.len() != b.len() {
                bail!("left has {} events and right has {}; they must match", a.len(), b.len());
            }
            let events: Vec<Event> = a.into_iter().chain(b).collect();
            let (t, u) = (bool_term(t)?, bool_term(u)?);
            let r = bit_check(&s.fps, &t, &u, &events)?;
            let ok = r.all_passed();
            Ok(Report {
                verdict: ok,
                text: format!(
                    "Pr(a) = {}, Pr(b) = {}, Pr(a∧b) = {}\nproduct rule {}; proof checks {}",
                    r.pr_a,
                    r.pr_b,
                    r.pr_ab,
                    if r.independent { "holds" } else { "FAILS" },
                    if ok { "pass" } else { "FAIL" }
                ),
                json: json!({
                    "pr_a": rational(&r.pr_a),
                    "pr_b": rational(&r.pr_b),
                    "pr_ab": rational(&r.pr_ab),
                    "independent": r.independent,
                    "certificates_valid": r.certificates_valid,
                    "dnf_equal": r.dnf_equal,
                    "wedge_equal": r.wedge_equal,
                    "all_passed": ok,
                }),
            })
        }
    }
}

fn lll(path: &Path, exhaustive: bool, seed: u64) -> Result<Report> {
    let hj: HypergraphJson = read_json(path)?;
    let h = Hypergraph::new(hj.vertices, hj.edges)?;
    let opts = LllOptions { exhaustive, seed, ..LllOptions::default() };
    let r = verify_lll_hypothesis(&h, &opts)?;
    let hypothesis = r.hypothesis_verified();
    let found = r.search.as_ref().and_then(|s| s.found.clone());
    // a search that ran must have succeeded; no search means nothing was claimed
    let verdict = hypothesis && (r.search.is_none() || found.is_some());
    let mut text = format!(
        "k = {}, d = {}\nedge probabilities 2^(1-k): {}\n{} disjoint edge pairs checked, hypothesis {}\ne(d+1) ≤ 2^(k-1): {}",
        r.k,
        r.d,
        r.edge_probabilities_exact,
        r.pairs.len(),
        if hypothesis { "verified" } else { "FAILS" },
        r.condition_holds
    );
    match &r.search {
        None => text.push_str("\nno colouring search (condition fails; pass --exhaustive to search anyway)"),
        Some(s) => {
            let how = match s.mode {
                SearchMode::Exhaustive => "exhaustive".to_string(),
                SearchMode::Sampled { tries } => format!("{tries} random colourings"),
            };
            match &found {
                Some(c) => text.push_str(&format!(
                    "\nproper colouring ({how}): {}",
                    c.iter().map(ToString::to_string).collect::<Vec<_>>().join("")
                )),
                None => text.push_str(&format!("\nno proper colouring found ({how})")),
            }
        }
    }
    let pairs: Vec<_> = r
        .pairs
        .iter()
        .map(|p| {
            json!({"f": p.f, "g": p.g, "pr_f": rational(&p.pr_f), "pr_g": rational(&p.pr_g), "pr_fg": rational(&p.pr_fg),
                   "bit_passed": p.bit_passed, "blocks_independent": p.blocks_independent})
        })
        .collect();
    let search = r.search.as_ref().map(|s| {
        json!({
            "mode": match s.mode { SearchMode::Exhaustive => "exhaustive", SearchMode::Sampled { .. } => "sampled" },
            "coloring": s.found.as_ref().map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>()),
        })
    });
    Ok(Report {
        verdict,
        text,
        json: json!({
            "k": r.k, "d": r.d,
            "edge_probabilities_exact": r.edge_probabilities_exact,
            "hypothesis_verified": hypothesis,
            "condition_holds": r.condition_holds,
            "pairs": pairs,
            "search": search,
        }),
    })
}
