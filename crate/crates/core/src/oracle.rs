//! Independent verification paths: brute-force broken-circuit checking
//! built directly from the definitions, and finite-field point counting
//! with exact interpolation of the characteristic polynomial.
//!
//! Nothing here shares code with the corner recursion or the closed
//! forms; speed is not this module's job.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{CircleStep, GainGraph, GainedEdge, Vertex};
use crate::height::EdgeOrder;
use crate::nbc::EdgeCountProfile;
use crate::poly::IntPolynomial;
use crate::unionfind::UnionFind;

/// Default cap on `n` for exhaustive forest enumeration.
pub const DEFAULT_MAX_N: usize = 6;

/// Cap on `q^n` work for finite-field point counting.
pub const POINT_COUNT_GUARD: u128 = 10_000_000;

/// A circle of gain zero, in canonical traversal form: starting at its
/// smallest vertex, directed toward the smaller of the two neighbors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BalancedCircle {
    steps: Vec<CircleStep>,
}

impl BalancedCircle {
    pub fn steps(&self) -> &[CircleStep] {
        &self.steps
    }

    pub fn edges(&self) -> Vec<GainedEdge> {
        let mut out: Vec<GainedEdge> = self.steps.iter().map(|s| s.edge).collect();
        out.sort();
        out
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.steps.iter().map(CircleStep::start).collect()
    }
}

struct PairMap {
    gains: BTreeMap<(Vertex, Vertex), Vec<i64>>,
}

impl PairMap {
    fn new(graph: &GainGraph) -> Self {
        let mut gains: BTreeMap<(Vertex, Vertex), Vec<i64>> = BTreeMap::new();
        for e in graph.edges() {
            gains.entry((e.lo, e.hi)).or_default().push(e.gain);
        }
        PairMap { gains }
    }

    fn between(&self, u: Vertex, v: Vertex) -> &[i64] {
        let key = if u < v { (u, v) } else { (v, u) };
        self.gains.get(&key).map_or(&[], Vec::as_slice)
    }
}

fn step(u: Vertex, v: Vertex, gain: i64) -> CircleStep {
    if u < v {
        CircleStep { edge: GainedEdge { lo: u, hi: v, gain }, forward: true }
    } else {
        CircleStep { edge: GainedEdge { lo: v, hi: u, gain: -gain }, forward: false }
    }
}

/// Every balanced circle of the graph, once each in canonical form.
pub fn enumerate_balanced_circles(graph: &GainGraph) -> Vec<BalancedCircle> {
    let pairs = PairMap::new(graph);
    let mut out = Vec::new();

    // digons: two parallel edges; gain g1 - g2, balanced only if equal,
    // which the no-duplicate invariant excludes, but check anyway
    for (&(u, v), gains) in &pairs.gains {
        for i in 0..gains.len() {
            for j in 0..gains.len() {
                if i != j && gains[i] == gains[j] && i < j {
                    out.push(BalancedCircle {
                        steps: vec![step(u, v, gains[i]), step(v, u, -gains[j])],
                    });
                }
            }
        }
    }

    // longer circles: vertex paths starting at the smallest vertex of the
    // circle, second vertex smaller than the last (direction canonical),
    // with every gain choice per consecutive pair
    fn extend(
        pairs: &PairMap,
        start: Vertex,
        n: usize,
        path: &mut Vec<Vertex>,
        steps: &mut Vec<CircleStep>,
        total: i64,
        out: &mut Vec<BalancedCircle>,
    ) {
        let last = *path.last().expect("nonempty");
        // close the circle
        if path.len() >= 3 && path[1] < last {
            for &g in pairs.between(last, start) {
                let gain_from_last = if last < start { g } else { -g };
                if total + gain_from_last == 0 {
                    let mut circle = steps.clone();
                    circle.push(step(last, start, gain_from_last));
                    out.push(BalancedCircle { steps: circle });
                }
            }
        }
        for next in (start + 1)..=n {
            if path.contains(&next) {
                continue;
            }
            for &g in pairs.between(last, next) {
                let gain_from_last = if last < next { g } else { -g };
                path.push(next);
                steps.push(step(last, next, gain_from_last));
                extend(pairs, start, n, path, steps, total + gain_from_last, out);
                steps.pop();
                path.pop();
            }
        }
    }

    for start in 1..=graph.n() {
        let mut path = vec![start];
        let mut steps = Vec::new();
        extend(&pairs, start, graph.n(), &mut path, &mut steps, 0, &mut out);
    }
    out
}

fn check_forest(edges: &[GainedEdge], graph: &GainGraph) -> Result<()> {
    let mut uf = UnionFind::new(graph.n());
    let mut seen = BTreeSet::new();
    for e in edges {
        if !graph.contains_edge(e) {
            return Err(Error::NotAForest(format!("edge {} is not in the graph", e)));
        }
        if !seen.insert(*e) {
            return Err(Error::NotAForest(format!("edge {} repeats", e)));
        }
        if !uf.union(e.lo, e.hi) {
            return Err(Error::NotAForest(format!("edge {} closes a cycle", e)));
        }
    }
    Ok(())
}

/// True iff no balanced circle minus its order-smallest edge is contained
/// in `forest`. Checks the forest property first.
pub fn is_nbc_bruteforce(
    forest: &[GainedEdge],
    graph: &GainGraph,
    order: &EdgeOrder,
) -> Result<bool> {
    check_forest(forest, graph)?;
    let set: BTreeSet<GainedEdge> = forest.iter().copied().collect();
    for circle in enumerate_balanced_circles(graph) {
        let edges = circle.edges();
        let min = *order.min_edge(&edges)?;
        if edges.iter().all(|e| *e == min || set.contains(e)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive count of NBC spanning forests and their per-edge-count
/// profile. The result is independent of the supplied order.
pub fn count_nbc_bruteforce(
    graph: &GainGraph,
    order: &EdgeOrder,
    max_n: usize,
) -> Result<(BigUint, EdgeCountProfile)> {
    if graph.n() > max_n {
        return Err(Error::GuardViolation(format!(
            "n={} exceeds the brute-force bound {}",
            graph.n(),
            max_n
        )));
    }
    let edges = graph.edges();
    if edges.len() > 128 {
        return Err(Error::GuardViolation(format!(
            "{} edges exceed the brute-force mask width",
            edges.len()
        )));
    }
    let index: BTreeMap<GainedEdge, usize> =
        edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut broken: Vec<u128> = Vec::new();
    for circle in enumerate_balanced_circles(graph) {
        let circle_edges = circle.edges();
        let min = *order.min_edge(&circle_edges)?;
        let mut mask = 0u128;
        for e in &circle_edges {
            if *e != min {
                mask |= 1 << index[e];
            }
        }
        broken.push(mask);
    }
    broken.sort_unstable();
    broken.dedup();

    fn rec(
        edges: &[GainedEdge],
        idx: usize,
        mask: u128,
        size: usize,
        uf: &UnionFind,
        broken: &[u128],
        counts: &mut BTreeMap<usize, BigUint>,
    ) {
        if idx == edges.len() {
            if broken.iter().all(|&bc| bc & !mask != 0) {
                *counts.entry(size).or_insert_with(BigUint::zero) += BigUint::one();
            }
            return;
        }
        rec(edges, idx + 1, mask, size, uf, broken, counts);
        let e = edges[idx];
        let mut uf2 = uf.clone();
        if uf2.union(e.lo, e.hi) {
            rec(edges, idx + 1, mask | (1 << idx), size + 1, &uf2, broken, counts);
        }
    }

    let mut counts = BTreeMap::new();
    let uf = UnionFind::new(graph.n());
    rec(edges, 0, 0, 0, &uf, &broken, &mut counts);
    let total = counts.values().sum();
    Ok((total, EdgeCountProfile { n: graph.n(), counts }))
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_floor(graph: &GainGraph) -> u64 {
    // conservative sufficiency bound: all hyperplane intersection data
    // live among integers of magnitude at most n * max|gain|
    graph.n() as u64 * graph.max_abs_gain() + 1
}

/// The `count` smallest admissible primes (strictly above
/// `n * max|gain| + 1`); used to pick interpolation points.
pub fn admissible_primes(graph: &GainGraph, count: usize) -> Vec<u64> {
    let floor = prime_floor(graph);
    let mut out = Vec::with_capacity(count);
    let mut q = floor + 1;
    while out.len() < count {
        if is_prime(q) {
            out.push(q);
        }
        q += 1;
    }
    out
}

/// Number of points of `(Z/q)^n` lying on none of the hyperplanes
/// `x_hi - x_lo = gain (mod q)`.
pub fn finite_field_count(graph: &GainGraph, q: u64) -> Result<BigUint> {
    let floor = prime_floor(graph);
    if !is_prime(q) || q <= floor {
        return Err(Error::BadPrime(q, floor));
    }
    let n = graph.n();
    let mut work = 1u128;
    for _ in 0..n {
        work = work.saturating_mul(q as u128);
        if work > POINT_COUNT_GUARD {
            return Err(Error::GuardViolation(format!(
                "q^n = {}^{} exceeds the point-counting budget",
                q, n
            )));
        }
    }
    // residues each edge forbids, reduced mod q
    let constraints: Vec<(usize, usize, u64)> = graph
        .edges()
        .iter()
        .map(|e| {
            (e.lo - 1, e.hi - 1, e.gain.rem_euclid(q as i64) as u64)
        })
        .collect();
    let mut x = vec![0u64; n];
    let mut count: u64 = 0;
    loop {
        if constraints
            .iter()
            .all(|&(lo, hi, g)| (x[hi] + q - x[lo]) % q != g)
        {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(BigUint::from(count));
            }
            if x[i] + 1 < q {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Exact Lagrange interpolation of the degree-at-most-`n` polynomial
/// through `(q, point count)` for the given primes. Extra points beyond
/// `n+1` are used as consistency checks; a non-integral result or an
/// inconsistent point fails loudly.
pub fn charpoly_interpolated(graph: &GainGraph, primes: &[u64]) -> Result<IntPolynomial> {
    let n = graph.n();
    if primes.len() < n + 1 {
        return Err(Error::NotEnoughPoints { needed: n + 1, got: primes.len() });
    }
    let points: Vec<(BigInt, BigInt)> = primes
        .iter()
        .map(|&q| Ok((BigInt::from(q), BigInt::from(finite_field_count(graph, q)?))))
        .collect::<Result<Vec<_>>>()?;

    // Lagrange over the first n+1 points, with rational coefficients
    let base = &points[..n + 1];
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for (i, (xi, yi)) in base.iter().enumerate() {
        // numerator polynomial prod_{j != i} (x - x_j) and its scale
        let mut num = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in base.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); num.len() + 1];
            for (k, c) in num.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * BigRational::from(xj.clone());
            }
            num = next;
            denom *= BigRational::from(xi.clone()) - BigRational::from(xj.clone());
        }
        let scale = BigRational::from(yi.clone()) / denom;
        for (k, c) in num.iter().enumerate() {
            coeffs[k] += c * &scale;
        }
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if !c.is_integer() {
            return Err(Error::InterpolationFailure(format!(
                "non-integral coefficient {}",
                c
            )));
        }
        out.push(c.to_integer());
    }
    let poly = IntPolynomial::new(out);
    for (x, y) in &points[n + 1..] {
        if &poly.eval(x) != y {
            return Err(Error::InterpolationFailure(format!(
                "point count at q={} disagrees with the interpolant",
                x
            )));
        }
    }
    Ok(poly)
}

/// Region count from the characteristic polynomial:
/// `(-1)^n * chi(-1)`.
pub fn regions_from_charpoly(chi: &IntPolynomial, n: usize) -> Result<BigUint> {
    if chi.degree() != Some(n) {
        return Err(Error::DegreeMismatch {
            expected: n,
            got: chi
                .degree()
                .map_or_else(|| "none (zero polynomial)".into(), |d| d.to_string()),
        });
    }
    let mut v = chi.eval(&BigInt::from(-1));
    if n % 2 == 1 {
        v = -v;
    }
    if v.is_negative() {
        return Err(Error::Internal(format!(
            "negative region count {} from the evaluation",
            v
        )));
    }
    v.try_into()
        .map_err(|_| Error::Internal("region count conversion".into()))
}
