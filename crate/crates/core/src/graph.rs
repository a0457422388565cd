//! Integral gain graphs and their `[a,b]`-expansions.
//!
//! An edge carries an integer gain that negates under orientation reversal;
//! we store every edge once, in the canonical `lo < hi` orientation. The
//! expansion `K_n^{ab}` puts every gain in `[a,b]` on every pair `i < j`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Vertices are 1-based labels in `[n]`.
pub type Vertex = usize;

/// A gain-labelled edge in canonical orientation (`lo < hi`).
///
/// Read from `lo` to `hi` the gain is `gain`; the reversed view has gain
/// `-gain` and is the same edge. Corresponds to the hyperplane
/// `x_hi - x_lo = gain`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GainedEdge {
    pub lo: Vertex,
    pub hi: Vertex,
    pub gain: i64,
}

impl GainedEdge {
    /// Builds an edge, canonicalizing the orientation. Loops are rejected.
    pub fn new(u: Vertex, v: Vertex, gain: i64) -> Result<Self> {
        if u == v {
            return Err(Error::BadEdge(
                format!("{}({},{})", gain, u, v),
                "loops are not allowed".into(),
            ));
        }
        if u == 0 || v == 0 {
            return Err(Error::BadEdge(
                format!("{}({},{})", gain, u, v),
                "vertices are 1-based".into(),
            ));
        }
        Ok(if u < v {
            GainedEdge { lo: u, hi: v, gain }
        } else {
            GainedEdge { lo: v, hi: u, gain: -gain }
        })
    }

    /// The other endpoint, or `None` if `v` is not incident.
    pub fn other(&self, v: Vertex) -> Option<Vertex> {
        if v == self.lo {
            Some(self.hi)
        } else if v == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }

    pub fn incident(&self, v: Vertex) -> bool {
        v == self.lo || v == self.hi
    }

    /// Gain seen when traversing from `from` to the other endpoint.
    pub fn gain_from(&self, from: Vertex) -> Result<i64> {
        if from == self.lo {
            Ok(self.gain)
        } else if from == self.hi {
            Ok(-self.gain)
        } else {
            Err(Error::BadEdge(
                self.to_string(),
                format!("vertex {} is not an endpoint", from),
            ))
        }
    }

    /// Parses the `g(i,j)` notation, e.g. `-1(2,5)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("missing '(' in edge '{}'", s)))?;
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("missing ')' in edge '{}'", s)));
        }
        let gain: i64 = s[..open]
            .parse()
            .map_err(|_| Error::Parse(format!("bad gain in edge '{}'", s)))?;
        let inner = &s[open + 1..s.len() - 1];
        let mut parts = inner.split(',');
        let i: Vertex = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad endpoints in edge '{}'", s)))?;
        let j: Vertex = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad endpoints in edge '{}'", s)))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("bad endpoints in edge '{}'", s)));
        }
        GainedEdge::new(i, j, gain)
    }
}

impl fmt::Display for GainedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.gain, self.lo, self.hi)
    }
}

/// A finite integral gain graph on vertices `1..=n`.
///
/// The edge multiset holds no duplicate `(lo, hi, gain)` triple; parallel
/// edges are allowed with distinct gains. Edges are kept sorted by
/// `(lo, hi, gain)` so every iteration over the graph is deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GainGraph {
    n: usize,
    edges: Vec<GainedEdge>,
}

impl GainGraph {
    pub fn new(n: usize, mut edges: Vec<GainedEdge>) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadVertexCount(n));
        }
        for e in &edges {
            if e.hi > n {
                return Err(Error::BadEdge(
                    e.to_string(),
                    format!("endpoint exceeds n={}", n),
                ));
            }
        }
        edges.sort();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].to_string()));
            }
        }
        Ok(GainGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[GainedEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, e: &GainedEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Largest absolute gain present (0 for an edgeless graph).
    pub fn max_abs_gain(&self) -> u64 {
        self.edges
            .iter()
            .map(|e| e.gain.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Serializes to the line-based text format: a `n=<int>` header
    /// followed by one `g(i,j)` edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for e in &self.edges {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'n=<int>' header, got '{}'", header)))?;
        let edges = lines.map(GainedEdge::parse).collect::<Result<Vec<_>>>()?;
        GainGraph::new(n, edges)
    }
}

/// Parameters of an `[a,b]`-expansion `K_n^{ab}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExpansionParams {
    pub n: usize,
    pub a: i64,
    pub b: i64,
}

impl ExpansionParams {
    pub fn new(n: usize, a: i64, b: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadVertexCount(n));
        }
        if a > b {
            return Err(Error::EmptyGainInterval { a, b });
        }
        Ok(ExpansionParams { n, a, b })
    }
}

/// The four named gain graphs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Preset {
    /// `B_n = K_n^{00}`
    Braid,
    /// `L_n = K_n^{11}`
    Linial,
    /// `S_n = K_n^{01}`
    Shi,
    /// `C_n = K_n^{-11}`
    Catalan,
}

impl Preset {
    pub fn gain_bounds(self) -> (i64, i64) {
        match self {
            Preset::Braid => (0, 0),
            Preset::Linial => (1, 1),
            Preset::Shi => (0, 1),
            Preset::Catalan => (-1, 1),
        }
    }

    pub fn params(self, n: usize) -> Result<ExpansionParams> {
        let (a, b) = self.gain_bounds();
        ExpansionParams::new(n, a, b)
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        match name {
            "braid" => Some(Preset::Braid),
            "linial" => Some(Preset::Linial),
            "shi" => Some(Preset::Shi),
            "catalan" => Some(Preset::Catalan),
            _ => None,
        }
    }
}

/// Builds `K_n^{ab}`: for every pair `i < j` and every `g` in `[a,b]`,
/// the edge `g(i,j)`.
pub fn build_expansion(params: ExpansionParams) -> Result<GainGraph> {
    let ExpansionParams { n, a, b } = params;
    let mut edges = Vec::with_capacity((b - a + 1) as usize * n * (n - 1) / 2);
    for i in 1..=n {
        for j in (i + 1)..=n {
            for g in a..=b {
                edges.push(GainedEdge { lo: i, hi: j, gain: g });
            }
        }
    }
    GainGraph::new(n, edges)
}

/// One step of a circle traversal: an edge crossed forward (`lo` to `hi`)
/// or backward.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CircleStep {
    pub edge: GainedEdge,
    pub forward: bool,
}

impl CircleStep {
    pub fn start(&self) -> Vertex {
        if self.forward {
            self.edge.lo
        } else {
            self.edge.hi
        }
    }

    pub fn end(&self) -> Vertex {
        if self.forward {
            self.edge.hi
        } else {
            self.edge.lo
        }
    }

    /// Signed gain contribution in traversal direction.
    pub fn signed_gain(&self) -> i64 {
        if self.forward {
            self.edge.gain
        } else {
            -self.edge.gain
        }
    }
}

fn check_circle(steps: &[CircleStep], graph: &GainGraph) -> Result<()> {
    if steps.len() < 2 {
        return Err(Error::NotACircle("a circle has at least 2 edges".into()));
    }
    let mut seen_edges = BTreeSet::new();
    let mut seen_vertices = BTreeSet::new();
    for (k, step) in steps.iter().enumerate() {
        if !graph.contains_edge(&step.edge) {
            return Err(Error::NotACircle(format!(
                "edge {} is not in the graph",
                step.edge
            )));
        }
        if !seen_edges.insert(step.edge) {
            return Err(Error::NotACircle(format!("edge {} repeats", step.edge)));
        }
        if !seen_vertices.insert(step.start()) {
            return Err(Error::NotACircle(format!(
                "vertex {} repeats",
                step.start()
            )));
        }
        let next = &steps[(k + 1) % steps.len()];
        if step.end() != next.start() {
            return Err(Error::NotACircle(format!(
                "step {} ends at {} but the next starts at {}",
                k,
                step.end(),
                next.start()
            )));
        }
    }
    Ok(())
}

/// Total gain of a circle in traversal direction. Only zero vs. nonzero is
/// independent of the direction; use [`is_balanced_circle`] for the stable
/// predicate.
pub fn circle_gain(steps: &[CircleStep], graph: &GainGraph) -> Result<i64> {
    check_circle(steps, graph)?;
    Ok(steps.iter().map(CircleStep::signed_gain).sum())
}

/// Whether the circle has gain zero.
pub fn is_balanced_circle(steps: &[CircleStep], graph: &GainGraph) -> Result<bool> {
    Ok(circle_gain(steps, graph)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize, a: i64, b: i64) -> GainGraph {
        build_expansion(ExpansionParams::new(n, a, b).unwrap()).unwrap()
    }

    #[test]
    fn expansion_edge_counts() {
        assert_eq!(k(4, 0, 1).edge_count(), 12);
        assert_eq!(k(1, 0, 0).edge_count(), 0);
        let g = k(3, -1, 1);
        assert_eq!(g.edge_count(), 9);
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            for gain in [-1, 0, 1] {
                assert!(g.contains_edge(&GainedEdge { lo: i, hi: j, gain }));
            }
        }
    }

    #[test]
    fn expansion_rejects_bad_params() {
        assert!(ExpansionParams::new(3, 1, 0).is_err());
        assert!(ExpansionParams::new(0, 0, 0).is_err());
    }

    #[test]
    fn edge_canonicalization() {
        let e = GainedEdge::new(5, 2, 3).unwrap();
        assert_eq!(e, GainedEdge { lo: 2, hi: 5, gain: -3 });
        assert!(GainedEdge::new(3, 3, 0).is_err());
    }

    fn triangle_steps(g12: i64, g23: i64, g13: i64) -> Vec<CircleStep> {
        // traverse 1 -> 2 -> 3 -> 1
        vec![
            CircleStep { edge: GainedEdge { lo: 1, hi: 2, gain: g12 }, forward: true },
            CircleStep { edge: GainedEdge { lo: 2, hi: 3, gain: g23 }, forward: true },
            CircleStep { edge: GainedEdge { lo: 1, hi: 3, gain: g13 }, forward: false },
        ]
    }

    #[test]
    fn circle_gains() {
        let g = k(3, -1, 1);
        assert_eq!(circle_gain(&triangle_steps(0, 0, 0), &g).unwrap(), 0);
        assert_eq!(circle_gain(&triangle_steps(1, 1, 1), &g).unwrap(), 1);
        assert_eq!(circle_gain(&triangle_steps(1, 0, 1), &g).unwrap(), 0);
        assert!(is_balanced_circle(&triangle_steps(1, 0, 1), &g).unwrap());
        assert!(!is_balanced_circle(&triangle_steps(1, 1, 1), &g).unwrap());
    }

    #[test]
    fn circle_rejects_non_circles() {
        let g = k(3, -1, 1);
        // open walk 1 -> 2 -> 3
        let steps = vec![
            CircleStep { edge: GainedEdge { lo: 1, hi: 2, gain: 0 }, forward: true },
            CircleStep { edge: GainedEdge { lo: 2, hi: 3, gain: 0 }, forward: true },
        ];
        assert!(circle_gain(&steps, &g).is_err());
        // single edge
        let steps = vec![CircleStep { edge: GainedEdge { lo: 1, hi: 2, gain: 0 }, forward: true }];
        assert!(circle_gain(&steps, &g).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let g = k(3, -1, 1);
        let text = g.to_text();
        assert!(text.starts_with("n=3\n"));
        assert!(text.contains("-1(1,2)\n"));
        let back = GainGraph::from_text(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn text_format_rejects_garbage() {
        assert!(GainGraph::from_text("").is_err());
        assert!(GainGraph::from_text("n=two\n").is_err());
        assert!(GainGraph::from_text("n=2\n1(1,2\n").is_err());
        assert!(GainGraph::from_text("n=2\n1(1,3)\n").is_err());
        // duplicate edge
        assert!(GainGraph::from_text("n=2\n1(1,2)\n1(1,2)\n").is_err());
    }
}
