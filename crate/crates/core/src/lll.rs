//! Two-colourings of a hypergraph: the events `A_{v,c}` and `A_f`, the
//! independence hypothesis of the local lemma, and a desk-scale search for
//! a colouring with no monochromatic edge.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::prelude::*;
use crate::prob::{bit_check, tuples_independent, Event, Fps, IndependenceReport, ProbError, MAX_TUPLE_EVENTS};
use crate::term::{Term, AND, NOT, OR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LllError {
    #[error("a hypergraph needs at least one vertex")]
    NoVertices,
    #[error("edge {0} is empty")]
    EmptyEdge(usize),
    #[error("edge {edge} names vertex {vertex}, outside 0..{vertices}")]
    VertexOutOfRange { edge: usize, vertex: usize, vertices: usize },
    #[error("vertex {0} is not part of the colouring space")]
    UnknownVertex(usize),
    #[error("no edge with index {0}")]
    UnknownEdge(usize),
    #[error("vertex sets overlap in vertex {0}")]
    VerticesOverlap(usize),
    #[error("{0} vertices are too many for exhaustive colouring")]
    TooManyVertices(usize),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Largest vertex count searched or enumerated exhaustively.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 20;

/// `H = (V, E)` with `V = {0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Each edge is sorted and deduplicated.
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Hypergraph, LllError> {
        if vertices == 0 {
            return Err(LllError::NoVertices);
        }
        let mut clean = Vec::with_capacity(edges.len());
        for (i, e) in edges.into_iter().enumerate() {
            let set: BTreeSet<usize> = e.into_iter().collect();
            if set.is_empty() {
                return Err(LllError::EmptyEdge(i));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= vertices) {
                return Err(LllError::VertexOutOfRange { edge: i, vertex: v, vertices });
            }
            clean.push(set.into_iter().collect());
        }
        Ok(Hypergraph { vertices, edges: clean })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Result<&[usize], LllError> {
        self.edges.get(i).map(Vec::as_slice).ok_or(LllError::UnknownEdge(i))
    }

    fn meets(&self, i: usize, j: usize) -> bool {
        self.edges[i].iter().any(|v| self.edges[j].binary_search(v).is_ok())
    }

    /// Smallest edge size (0 without edges).
    pub fn k(&self) -> usize {
        self.edges.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Largest number of other edges meeting one edge.
    pub fn d(&self) -> usize {
        (0..self.edges.len())
            .map(|i| (0..self.edges.len()).filter(|&j| j != i && self.meets(i, j)).count())
            .max()
            .unwrap_or(0)
    }

    /// Indices of the edges disjoint from edge `i`.
    pub fn disjoint_from(&self, i: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&j| j != i && !self.meets(i, j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Red, Color::Blue];
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "r",
            Color::Blue => "b",
        })
    }
}

/// All colourings `χ` of a vertex list, uniformly weighted. Colouring
/// number `w` gives `vertices[i]` blue iff bit `i` of `w` is set.
#[derive(Debug, Clone)]
pub struct ColoringSpace {
    vertices: Vec<usize>,
    fps: Fps,
}

impl ColoringSpace {
    pub fn new(vertices: &[usize]) -> Result<ColoringSpace, LllError> {
        let set: BTreeSet<usize> = vertices.iter().copied().collect();
        if set.len() > MAX_EXHAUSTIVE_VERTICES {
            return Err(LllError::TooManyVertices(set.len()));
        }
        let vertices: Vec<usize> = set.into_iter().collect();
        let fps = Fps::uniform(1 << vertices.len())?;
        Ok(ColoringSpace { vertices, fps })
    }

    /// The space over every vertex of `h`.
    pub fn of(h: &Hypergraph) -> Result<ColoringSpace, LllError> {
        ColoringSpace::new(&(0..h.vertices()).collect::<Vec<_>>())
    }

    pub fn fps(&self) -> &Fps {
        &self.fps
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    fn slot(&self, v: usize) -> Result<usize, LllError> {
        self.vertices.binary_search(&v).map_err(|_| LllError::UnknownVertex(v))
    }

    /// The colour colouring `w` gives to vertex `v`.
    pub fn color_of(&self, w: usize, v: usize) -> Result<Color, LllError> {
        Ok(if w >> self.slot(v)? & 1 == 1 { Color::Blue } else { Color::Red })
    }
}

/// `A_{v,c} = {χ : χ(v) = c}`.
pub fn event_vertex_color(space: &ColoringSpace, v: usize, c: Color) -> Result<Event, LllError> {
    let i = space.slot(v)?;
    let blue = c == Color::Blue;
    Ok(Event::from_fn(space.fps.size(), |w| (w >> i & 1 == 1) == blue))
}

/// `A_f`: the colourings constant on the vertex set `f`.
pub fn event_constant_on(space: &ColoringSpace, f: &[usize]) -> Result<Event, LllError> {
    let mut red = Event::full(space.fps.size());
    let mut blue = red.clone();
    for &v in f {
        red.intersect_with(&event_vertex_color(space, v, Color::Red)?);
        blue.intersect_with(&event_vertex_color(space, v, Color::Blue)?);
    }
    Ok(&red | &blue)
}

/// `A_f` for edge number `f` of `h`.
pub fn event_monochromatic(space: &ColoringSpace, h: &Hypergraph, f: usize) -> Result<Event, LllError> {
    event_constant_on(space, h.edge(f)?)
}

/// `B_X = (A_{v,r}, A_{v,b})` for `v ∈ X` in order.
pub fn block_events(space: &ColoringSpace, x: &[usize]) -> Result<Vec<Event>, LllError> {
    let mut out = Vec::with_capacity(2 * x.len());
    for &v in x {
        for c in Color::ALL {
            out.push(event_vertex_color(space, v, c)?);
        }
    }
    Ok(out)
}

/// Outcome of [`verify_block_independence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub independence: IndependenceReport,
    /// Pairs `(U, W)` for which `|N_{U∪W}| = |N_U|·|N_W|` was counted.
    pub counts_checked: u64,
    /// First `(U, W)`, as masks over `B_X` and `B_Y`, where the count failed.
    pub count_failure: Option<(u64, u64)>,
}

impl BlockReport {
    pub fn holds(&self) -> bool {
        self.independence.independent && self.count_failure.is_none()
    }
}

/// Largest `|X| + |Y|` for which the counting identity is enumerated.
pub const MAX_COUNTED_VERTICES: usize = 6;

/// Number of maps `χ : X → C` with `χ(v) = c` whenever bit `2i + [c = b]`
/// of `u` is set (`v` the `i`-th vertex of `X`).
fn consistent_maps(len: usize, u: u64) -> u64 {
    (0u64..1 << len)
        .filter(|chi| {
            (0..len).all(|i| {
                let blue = chi >> i & 1 == 1;
                let wants_red = u >> (2 * i) & 1 == 1;
                let wants_blue = u >> (2 * i + 1) & 1 == 1;
                !(wants_red && blue) && !(wants_blue && !blue)
            })
        })
        .count() as u64
}

/// Checks that `B_X` is independent of `B_Y` for disjoint `X`, `Y`, and
/// counts `|N_{U∪W}| = |N_U|·|N_W|` for every `U ⊆ X×C`, `W ⊆ Y×C` when
/// `|X| + |Y|` is small.
pub fn verify_block_independence(space: &ColoringSpace, x: &[usize], y: &[usize]) -> Result<BlockReport, LllError> {
    if let Some(&v) = x.iter().find(|v| y.contains(v)) {
        return Err(LllError::VerticesOverlap(v));
    }
    let bx = block_events(space, x)?;
    let by = block_events(space, y)?;
    let independence = tuples_independent(&space.fps, &bx, &by)?;
    let mut counts_checked = 0;
    let mut count_failure = None;
    if x.len() + y.len() <= MAX_COUNTED_VERTICES {
        let nu: Vec<u64> = (0..1u64 << bx.len()).map(|u| consistent_maps(x.len(), u)).collect();
        let nw: Vec<u64> = (0..1u64 << by.len()).map(|w| consistent_maps(y.len(), w)).collect();
        'all: for (u, cu) in nu.iter().enumerate() {
            for (w, cw) in nw.iter().enumerate() {
                counts_checked += 1;
                // X∪Y lists X first, so U∪W is `u` followed by `w`
                let joint = consistent_maps(x.len() + y.len(), u as u64 | (w as u64) << bx.len());
                if joint != cu * cw {
                    count_failure = Some((u as u64, w as u64));
                    break 'all;
                }
            }
        }
    }
    Ok(BlockReport { independence, counts_checked, count_failure })
}

/// Interval `lo < e < hi` from the series `Σ 1/i!` with `n` terms past 1;
/// the tail after the last term is below `1/(n!·n)`.
pub fn euler_bounds(n: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::one();
    let mut fact = BigInt::one();
    for i in 1..=n {
        fact *= BigInt::from(i);
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    let tail = BigRational::new(BigInt::one(), fact * BigInt::from(n));
    (sum.clone(), sum + tail)
}

/// Decides `e·(d+1) ≤ 2^{k−1}` exactly by tightening rational bounds on
/// `e`. `e·(d+1)` is irrational, so the loop ends.
pub fn lll_condition(k: usize, d: usize) -> bool {
    if k == 0 {
        return false;
    }
    let rhs = BigRational::from_integer(BigInt::from(BigUint::one() << (k - 1)));
    let m = BigRational::from_integer(BigInt::from(d + 1));
    let mut n = 4;
    loop {
        let (lo, hi) = euler_bounds(n);
        if &hi * &m <= rhs {
            return true;
        }
        if &lo * &m > rhs {
            return false;
        }
        n *= 2;
    }
}

/// The term `(x1∧(…∧xm)) ∨ (¬(x1)∧(…∧¬(xm)))`: with `x_i = A_{v_i,r}` it
/// evaluates to `A_f`.
pub fn monochromatic_term(m: usize) -> Term {
    assert!(m >= 1, "an edge has at least one vertex");
    let chain = |neg: bool| {
        let lit = |i: usize| {
            let x = Term::var(i as u32);
            if neg {
                Term::unary(NOT, x)
            } else {
                x
            }
        };
        (1..m).rev().fold(lit(m), |acc, i| Term::binary(AND, lit(i), acc))
    };
    Term::binary(OR, chain(false), chain(true))
}

/// Result for one ordered pair of disjoint edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub f: usize,
    pub g: usize,
    pub pr_f: BigRational,
    pub pr_g: BigRational,
    pub pr_fg: BigRational,
    /// [`bit_check`] with the `A_f` and `A_g` terms over the red events
    /// passed every stage; `None` when the edges are too large for it.
    pub bit_passed: Option<bool>,
    /// `B_f` independent of `B_g`; `None` when too large.
    pub blocks_independent: Option<bool>,
}

/// A pair of meeting edges whose events turned out dependent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceWitness {
    pub f: usize,
    pub g: usize,
    pub pr_fg: BigRational,
    pub product: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// Random colourings; absence of a hit proves nothing.
    Sampled { tries: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringSearch {
    pub mode: SearchMode,
    /// A colouring non-constant on every edge, indexed by vertex.
    pub found: Option<Vec<Color>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LllOptions {
    /// Search for a colouring even when the condition fails; refuse to
    /// sample.
    pub exhaustive: bool,
    pub samples: u64,
    pub seed: u64,
}

impl Default for LllOptions {
    fn default() -> Self {
        LllOptions { exhaustive: false, samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LllReport {
    pub k: usize,
    pub d: usize,
    /// `Pr(A_f) = 2^{1−|f|}` for every edge.
    pub edge_probabilities_exact: bool,
    pub pairs: Vec<PairReport>,
    pub witnesses: Vec<DependenceWitness>,
    pub condition_holds: bool,
    pub search: Option<ColoringSearch>,
}

impl LllReport {
    /// Every checked pair of disjoint edges is independent.
    pub fn hypothesis_verified(&self) -> bool {
        self.edge_probabilities_exact
            && self.pairs.iter().all(|p| {
                p.pr_fg == &p.pr_f * &p.pr_g && p.bit_passed != Some(false) && p.blocks_independent != Some(false)
            })
    }
}

fn pow2_inv(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(BigUint::one() << e))
}

/// For each edge `f` and each edge `g` disjoint from it, checks on the
/// colourings of `f ∪ g` that `A_f` is independent of `A_g`; reports the
/// local lemma condition and, when it holds, looks for a colouring.
pub fn verify_lll_hypothesis(h: &Hypergraph, opts: &LllOptions) -> Result<LllReport, LllError> {
    let k = h.k();
    let d = h.d();
    let mut edge_probabilities_exact = true;
    for f in h.edges() {
        let space = ColoringSpace::new(f)?;
        edge_probabilities_exact &= space.fps.pr(&event_constant_on(&space, f)?) == pow2_inv(f.len() - 1);
    }
    let mut pairs = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..h.edges().len() {
        let disjoint = h.disjoint_from(i);
        for j in 0..h.edges().len() {
            if j == i {
                continue;
            }
            let (f, g) = (&h.edges()[i], &h.edges()[j]);
            let both: Vec<usize> = f.iter().chain(g).copied().collect();
            let space = ColoringSpace::new(&both)?;
            let af = event_constant_on(&space, f)?;
            let ag = event_constant_on(&space, g)?;
            let (pr_f, pr_g) = (space.fps.pr(&af), space.fps.pr(&ag));
            let pr_fg = space.fps.pr(&(&af & &ag));
            if !disjoint.contains(&j) {
                if pr_fg != &pr_f * &pr_g {
                    witnesses.push(DependenceWitness { f: i, g: j, product: &pr_f * &pr_g, pr_fg });
                }
                continue;
            }
            let n = f.len().max(g.len());
            let bit_passed = if 2 * n <= MAX_TUPLE_EVENTS {
                let reds = |e: &[usize]| -> Result<Vec<Event>, LllError> {
                    let mut out: Vec<Event> =
                        e.iter().map(|&v| event_vertex_color(&space, v, Color::Red)).collect::<Result<_, _>>()?;
                    out.resize(n, Event::full(space.fps.size()));
                    Ok(out)
                };
                let mut events = reds(f)?;
                events.extend(reds(g)?);
                let r = bit_check(&space.fps, &monochromatic_term(f.len()), &monochromatic_term(g.len()), &events)?;
                Some(r.all_passed() && r.pr_a == pr_f && r.pr_b == pr_g)
            } else {
                None
            };
            let blocks_independent = if 2 * (f.len() + g.len()) <= MAX_TUPLE_EVENTS {
                Some(verify_block_independence(&space, f, g)?.holds())
            } else {
                None
            };
            pairs.push(PairReport { f: i, g: j, pr_f, pr_g, pr_fg, bit_passed, blocks_independent });
        }
    }
    let condition_holds = lll_condition(k, d);
    let search = if condition_holds || opts.exhaustive { Some(search_coloring(h, opts)?) } else { None };
    Ok(LllReport { k, d, edge_probabilities_exact, pairs, witnesses, condition_holds, search })
}

fn proper(h: &Hypergraph, w: u64) -> bool {
    h.edges().iter().all(|f| {
        let first = w >> f[0] & 1;
        f.iter().any(|&v| w >> v & 1 != first)
    })
}

fn decode(n: usize, w: u64) -> Vec<Color> {
    (0..n).map(|v| if w >> v & 1 == 1 { Color::Blue } else { Color::Red }).collect()
}

/// Looks for a colouring non-constant on every edge: every colouring when
/// `|V| ≤ 20`, otherwise random ones.
pub fn search_coloring(h: &Hypergraph, opts: &LllOptions) -> Result<ColoringSearch, LllError> {
    let n = h.vertices();
    if n <= MAX_EXHAUSTIVE_VERTICES {
        let found = (0u64..1 << n).find(|&w| proper(h, w)).map(|w| decode(n, w));
        return Ok(ColoringSearch { mode: SearchMode::Exhaustive, found });
    }
    if opts.exhaustive || n > 64 {
        return Err(LllError::TooManyVertices(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut tries = 0;
    let mut found = None;
    while tries < opts.samples {
        tries += 1;
        let w = rng.gen::<u64>() & mask;
        if proper(h, w) {
            found = Some(decode(n, w));
            break;
        }
    }
    Ok(ColoringSearch { mode: SearchMode::Sampled { tries }, found })
}

/// Whether `coloring` is constant on no edge.
pub fn is_proper(h: &Hypergraph, coloring: &[Color]) -> bool {
    h.edges().iter().all(|f| f.iter().any(|&v| coloring[v] != coloring[f[0]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn vertex_events() {
        let space = ColoringSpace::new(&[0, 1, 2]).unwrap();
        for v in 0..3 {
            let r = event_vertex_color(&space, v, Color::Red).unwrap();
            let b = event_vertex_color(&space, v, Color::Blue).unwrap();
            assert_eq!(space.fps().pr(&r), q(1, 2));
            assert!((&r & &b).is_empty());
            assert!((&r | &b).is_full());
        }
        assert_eq!(event_vertex_color(&space, 7, Color::Red), Err(LllError::UnknownVertex(7)));
    }

    #[test]
    fn monochromatic_probabilities() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![3]]).unwrap();
        let space = ColoringSpace::of(&h).unwrap();
        assert_eq!(space.fps().pr(&event_monochromatic(&space, &h, 0).unwrap()), q(1, 4));
        assert_eq!(space.fps().pr(&event_monochromatic(&space, &h, 1).unwrap()), q(1, 1));
        assert_eq!(event_monochromatic(&space, &h, 2), Err(LllError::UnknownEdge(2)));
    }

    #[test]
    fn blocks() {
        let space = ColoringSpace::new(&[0, 1, 2, 3]).unwrap();
        let r = verify_block_independence(&space, &[0], &[1]).unwrap();
        assert!(r.holds());
        assert_eq!(r.independence.checked, 16);
        assert_eq!(r.counts_checked, 16);
        assert!(verify_block_independence(&space, &[0, 1], &[2, 3]).unwrap().holds());
        assert!(verify_block_independence(&space, &[], &[2]).unwrap().holds());
        assert_eq!(verify_block_independence(&space, &[0, 1], &[1]), Err(LllError::VerticesOverlap(1)));
    }

    #[test]
    fn counting_helper() {
        assert_eq!(consistent_maps(2, 0), 4);
        assert_eq!(consistent_maps(2, 0b01), 2);
        assert_eq!(consistent_maps(2, 0b11), 0);
        assert_eq!(consistent_maps(2, 0b1001), 1);
    }

    #[test]
    fn triangles() {
        let h = Hypergraph::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let r = verify_lll_hypothesis(&h, &LllOptions::default()).unwrap();
        assert!(r.hypothesis_verified());
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.pairs[0].pr_fg, q(1, 16));
        assert_eq!(r.pairs[0].bit_passed, Some(true));
        assert_eq!(r.pairs[0].blocks_independent, Some(true));
    }

    #[test]
    fn meeting_edges_are_skipped_with_witness() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let r = verify_lll_hypothesis(&h, &LllOptions::default()).unwrap();
        assert!(r.pairs.is_empty());
        // sharing one vertex: Pr = 2/32 = 1/16 = (1/4)², so no witness
        assert!(r.witnesses.is_empty());
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let r = verify_lll_hypothesis(&h, &LllOptions::default()).unwrap();
        assert_eq!(r.witnesses.len(), 2);
        assert_eq!(r.witnesses[0].pr_fg, q(1, 8));
    }

    #[test]
    fn condition_and_search() {
        assert!(lll_condition(4, 1));
        assert!(!lll_condition(3, 1));
        assert!(lll_condition(3, 0));
        assert!(!lll_condition(2, 0));
        let h = Hypergraph::new(7, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]]).unwrap();
        let r = verify_lll_hypothesis(&h, &LllOptions::default()).unwrap();
        assert_eq!((r.k, r.d), (4, 1));
        assert!(r.condition_holds);
        let s = r.search.unwrap();
        assert_eq!(s.mode, SearchMode::Exhaustive);
        assert!(is_proper(&h, &s.found.unwrap()));
    }

    #[test]
    fn e_bounds_bracket_e() {
        let (lo, hi) = euler_bounds(12);
        assert!(lo < q(2_718_281_829, 1_000_000_000) && hi > q(2_718_281_828, 1_000_000_000));
    }
}
