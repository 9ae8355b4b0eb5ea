//! File formats: certificates, probability spaces, hypergraphs and
//! polynomials.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use termcalc_core::poly::{Flavor, StandardPolynomial};
use termcalc_core::prob::{Event, Fps};
use termcalc_core::rewrite::{Binding, Certificate, Direction, Step};
use termcalc_core::ring::Ring;
use termcalc_core::term::Term;
use termcalc_core::BigRational;

#[derive(Debug, Serialize, Deserialize)]
pub struct StepJson {
    pub rule: String,
    pub pos: Vec<usize>,
    pub dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, rename = "u'", skip_serializing_if = "Option::is_none")]
    pub u1: Option<String>,
    #[serde(default, rename = "u''", skip_serializing_if = "Option::is_none")]
    pub u2: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub source: String,
    pub target: String,
    pub steps: Vec<StepJson>,
}

impl CertificateJson {
    pub fn from_certificate<K: Display>(cert: &Certificate<K>) -> CertificateJson {
        let steps = cert
            .steps
            .iter()
            .map(|st| {
                let [u, u1, u2] = st.bind.terms.clone().map(|t| t.map(|t| t.to_string()));
                StepJson {
                    rule: st.rule.to_string(),
                    pos: st.pos.as_slice().to_vec(),
                    dir: st.dir.name().to_string(),
                    r: st.bind.r.as_ref().map(ToString::to_string),
                    s: st.bind.s.as_ref().map(ToString::to_string),
                    u,
                    u1,
                    u2,
                }
            })
            .collect();
        CertificateJson { source: cert.source.to_string(), target: cert.target.to_string(), steps }
    }

    /// Reads the terms with `read` and rule names with `K::from_str`.
    pub fn to_certificate<K>(&self, read: impl Fn(&str) -> Result<Term>, ring: Option<&Ring>) -> Result<Certificate<K>>
    where
        K: FromStr,
        K::Err: Display,
    {
        let mut steps = Vec::with_capacity(self.steps.len());
        for (i, s) in self.steps.iter().enumerate() {
            let ctx = || format!("step {}", i + 1);
            let rule = K::from_str(&s.rule).map_err(|e| anyhow!("{e}")).with_context(ctx)?;
            let dir = Direction::parse(&s.dir).ok_or_else(|| anyhow!("direction {:?} is not fwd or rev", s.dir)).with_context(ctx)?;
            if s.pos.contains(&0) {
                return Err(anyhow!("positions are 1-based")).with_context(ctx);
            }
            let mut bind = Binding::default();
            for (k, w) in [&s.u, &s.u1, &s.u2].into_iter().enumerate() {
                if let Some(w) = w {
                    bind.terms[k] = Some(read(w).with_context(ctx)?);
                }
            }
            for (slot, w) in [(&mut bind.r, &s.r), (&mut bind.s, &s.s)] {
                if let Some(w) = w {
                    let ring = ring.ok_or_else(|| anyhow!("scalar parameters need a ring")).with_context(ctx)?;
                    *slot = Some(ring.parse_element(w).map_err(|e| anyhow!("{e}")).with_context(ctx)?);
                }
            }
            steps.push(Step { rule, pos: s.pos.clone().into(), dir, bind });
        }
        Ok(Certificate {
            source: read(&self.source).context("source")?,
            target: read(&self.target).context("target")?,
            steps,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolynomialJson {
    /// `"inf"` or `"fixed"`.
    pub flavor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    pub terms: Vec<TermJson>,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &StandardPolynomial) -> PolynomialJson {
        let (flavor, width) = match p.flavor() {
            Flavor::Unbounded => ("inf", None),
            Flavor::Fixed(n) => ("fixed", Some(n)),
        };
        PolynomialJson {
            flavor: flavor.into(),
            width,
            terms: p.iter().map(|(e, c)| TermJson { exp: e.entries().to_vec(), coef: c.to_string() }).collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceJson {
    pub outcomes: Vec<String>,
    /// Omitted for the uniform distribution.
    #[serde(default)]
    pub weights: Option<Vec<String>>,
    #[serde(default)]
    pub events: BTreeMap<String, Vec<usize>>,
}

pub struct Space {
    pub fps: Fps,
    pub events: BTreeMap<String, Event>,
}

impl SpaceJson {
    pub fn load(&self) -> Result<Space> {
        let n = self.outcomes.len();
        let fps = match &self.weights {
            None => Fps::uniform(n)?,
            Some(ws) => {
                if ws.len() != n {
                    bail!("{} weights for {n} outcomes", ws.len());
                }
                let ws = ws
                    .iter()
                    .map(|w| w.trim().parse::<BigRational>().map_err(|_| anyhow!("weight {w:?} is not a rational")))
                    .collect::<Result<Vec<_>>>()?;
                Fps::weighted(&ws)?
            }
        };
        let mut events = BTreeMap::new();
        for (name, idx) in &self.events {
            if let Some(&i) = idx.iter().find(|&&i| i >= n) {
                bail!("event {name:?} names outcome {i}, outside 0..{n}");
            }
            events.insert(name.clone(), Event::from_indices(n, idx.iter().copied()));
        }
        Ok(Space { fps, events })
    }
}

impl Space {
    /// Events named in a comma-separated list.
    pub fn pick(&self, names: &str) -> Result<Vec<Event>> {
        names
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.events.get(s).cloned().ok_or_else(|| anyhow!("no event named {s:?} in the space")))
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use termcalc_core::ring_terms::{parse_ring_term, psi, EtRule};

    #[test]
    fn step_fields() {
        let text = r#"{"source":"x1","target":"x1","steps":[{"rule":"ET1","pos":[1],"dir":"rev","r":"2","s":"3","u''":"x2"}]}"#;
        let c: CertificateJson = serde_json::from_str(text).unwrap();
        let ring = Ring::Integers;
        let cert: Certificate<EtRule> = c.to_certificate(|w| Ok(parse_ring_term(w, &ring)?), Some(&ring)).unwrap();
        assert_eq!(cert.steps[0].dir, Direction::Rev);
        assert!(cert.steps[0].bind.r.is_some());
        assert_eq!(cert.steps[0].bind.terms[2], Some(Term::var(2)));
        let back = serde_json::to_string(&CertificateJson::from_certificate(&cert)).unwrap();
        assert!(back.contains(r#""u''":"x2""#));
    }

    #[test]
    fn zero_position_rejected() {
        let text = r#"{"source":"x1","target":"x1","steps":[{"rule":"ET5","pos":[0],"dir":"fwd"}]}"#;
        let c: CertificateJson = serde_json::from_str(text).unwrap();
        let ring = Ring::Integers;
        assert!(c.to_certificate::<EtRule>(|w| Ok(parse_ring_term(w, &ring)?), Some(&ring)).is_err());
    }

    #[test]
    fn polynomial_format() {
        let ring = Ring::Rationals;
        let p = psi(&parse_ring_term("((x1·(x3·(x3·x3)))+c{1/2})", &ring).unwrap(), &ring);
        let text = serde_json::to_string(&PolynomialJson::from_polynomial(&p)).unwrap();
        assert_eq!(text, r#"{"flavor":"inf","terms":[{"exp":[],"coef":"1/2"},{"exp":[1,0,3],"coef":"1"}]}"#);
    }

    #[test]
    fn space_loading() {
        let j: SpaceJson = serde_json::from_str(r#"{"outcomes":["a","b","c","d"],"weights":["1/8","3/8","1/4","1/4"],"events":{"e":[0,1]}}"#).unwrap();
        let s = j.load().unwrap();
        assert_eq!(s.fps.pr(&s.events["e"]), BigRational::new(1.into(), 2.into()));
        assert!(s.pick("e,f").is_err());
    }
}
