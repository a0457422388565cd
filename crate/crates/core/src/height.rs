//! Height functions, coherence, corners and the derived orders.
//!
//! A height function maps a vertex support into the naturals and attains 0.
//! It selects the coherent edges of a gain graph (gain = height gap) and
//! induces a total order: vertices by decreasing height then increasing
//! label, edges lexicographically over their sorted endpoint pairs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{GainGraph, GainedEdge, Vertex};
use crate::unionfind::UnionFind;

/// A normalized height function on a nonempty vertex support.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct HeightFunction {
    heights: BTreeMap<Vertex, u64>,
}

impl HeightFunction {
    /// Requires a nonempty mapping attaining 0.
    pub fn new(heights: BTreeMap<Vertex, u64>) -> Result<Self> {
        if heights.is_empty() {
            return Err(Error::EmptySupport);
        }
        if heights.values().all(|&h| h != 0) {
            return Err(Error::HeightNotNormalized);
        }
        Ok(HeightFunction { heights })
    }

    /// Builds from a full array over `[n]`, index = vertex - 1.
    pub fn from_full_array(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().enumerate().map(|(i, &h)| (i + 1, h)).collect())
    }

    /// The full array over `[n]`; fails if the support is not exactly `[n]`.
    pub fn to_full_array(&self, n: usize) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(n);
        for v in 1..=n {
            out.push(self.get(v)?);
        }
        if self.heights.len() != n {
            return Err(Error::Internal(format!(
                "support has {} vertices, expected {}",
                self.heights.len(),
                n
            )));
        }
        Ok(out)
    }

    pub fn get(&self, v: Vertex) -> Result<u64> {
        self.heights.get(&v).copied().ok_or(Error::HeightUndefined(v))
    }

    pub fn get_opt(&self, v: Vertex) -> Option<u64> {
        self.heights.get(&v).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.heights.keys().copied()
    }

    pub fn support_set(&self) -> BTreeSet<Vertex> {
        self.heights.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// The smallest vertex among those of greatest height.
    pub fn corner(&self) -> Vertex {
        let max = *self.heights.values().max().expect("nonempty support");
        *self
            .heights
            .iter()
            .find(|(_, &h)| h == max)
            .expect("max is attained")
            .0
    }

    /// Restriction to a subset of the support, re-normalized so the
    /// minimum height is 0.
    pub fn restrict_normalized(&self, subset: &BTreeSet<Vertex>) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut heights = BTreeMap::new();
        for &v in subset {
            heights.insert(v, self.get(v)?);
        }
        let min = *heights.values().min().expect("nonempty");
        for h in heights.values_mut() {
            *h -= min;
        }
        Ok(HeightFunction { heights })
    }

    /// Whether the edge's gain equals its height gap.
    pub fn is_coherent(&self, e: &GainedEdge) -> Result<bool> {
        let hlo = self.get(e.lo)? as i128;
        let hhi = self.get(e.hi)? as i128;
        Ok(hhi - hlo == e.gain as i128)
    }
}

/// Vertex order induced by a height function: `u` before `v` iff
/// `h(u) > h(v)`, or equal heights and `u < v`.
pub fn compare_vertices(h: &HeightFunction, u: Vertex, v: Vertex) -> Result<Ordering> {
    let (hu, hv) = (h.get(u)?, h.get(v)?);
    Ok(hv.cmp(&hu).then(u.cmp(&v)))
}

fn sorted_endpoints(h: &HeightFunction, e: &GainedEdge) -> Result<(Vertex, Vertex)> {
    Ok(match compare_vertices(h, e.lo, e.hi)? {
        Ordering::Greater => (e.hi, e.lo),
        _ => (e.lo, e.hi),
    })
}

/// Lexicographic extension of the vertex order to edges. Among coherent
/// edges this is a strict total order; for arbitrary edge pairs ties on
/// both endpoints are broken by gain.
pub fn compare_edges(h: &HeightFunction, e1: &GainedEdge, e2: &GainedEdge) -> Result<Ordering> {
    let (a1, b1) = sorted_endpoints(h, e1)?;
    let (a2, b2) = sorted_endpoints(h, e2)?;
    Ok(compare_vertices(h, a1, a2)?
        .then(compare_vertices(h, b1, b2)?)
        .then(e1.gain.cmp(&e2.gain)))
}

/// A total order on gain-labelled edges.
#[derive(Clone, Debug)]
pub enum EdgeOrder {
    /// Canonical `(lo, hi, gain)` order.
    CanonicalKey,
    /// Reverse of the canonical order.
    ReverseKey,
    /// The order induced by a height function.
    ByHeight(HeightFunction),
    /// Explicit ranking; edges not listed sort after all listed ones, by key.
    Explicit(Vec<GainedEdge>),
}

impl EdgeOrder {
    pub fn cmp_edges(&self, e1: &GainedEdge, e2: &GainedEdge) -> Result<Ordering> {
        match self {
            EdgeOrder::CanonicalKey => Ok(e1.cmp(e2)),
            EdgeOrder::ReverseKey => Ok(e2.cmp(e1)),
            EdgeOrder::ByHeight(h) => compare_edges(h, e1, e2),
            EdgeOrder::Explicit(list) => {
                let rank = |e: &GainedEdge| list.iter().position(|x| x == e);
                Ok(match (rank(e1), rank(e2)) {
                    (Some(r1), Some(r2)) => r1.cmp(&r2),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => e1.cmp(e2),
                })
            }
        }
    }

    /// The smallest edge of a nonempty set.
    pub fn min_edge<'a>(&self, edges: &'a [GainedEdge]) -> Result<&'a GainedEdge> {
        let mut best = edges
            .first()
            .ok_or_else(|| Error::Internal("min_edge of empty set".into()))?;
        for e in &edges[1..] {
            if self.cmp_edges(e, best)? == Ordering::Less {
                best = e;
            }
        }
        Ok(best)
    }
}

/// The subgraph `Φ[h]` selected by `h`: same vertex set, exactly the
/// coherent edges. `h` must be defined on all of `[n]`.
pub fn coherent_subgraph(graph: &GainGraph, h: &HeightFunction) -> Result<GainGraph> {
    let mut edges = Vec::new();
    for e in graph.edges() {
        if h.is_coherent(e)? {
            edges.push(*e);
        }
    }
    GainGraph::new(graph.n(), edges)
}

/// Coherent edges of the graph with both endpoints inside `support`.
pub fn coherent_edges_within(
    graph: &GainGraph,
    h: &HeightFunction,
    support: &BTreeSet<Vertex>,
) -> Result<Vec<GainedEdge>> {
    let mut edges = Vec::new();
    for e in graph.edges() {
        if support.contains(&e.lo) && support.contains(&e.hi) && h.is_coherent(e)? {
            edges.push(*e);
        }
    }
    Ok(edges)
}

/// The unique height function with `h(hi) - h(lo) = gain` on every edge of
/// a tree, normalized so the minimum height is 0. The support is the set
/// of endpoints; the input must be a tree on it.
pub fn height_of_balanced_tree(edges: &[GainedEdge]) -> Result<HeightFunction> {
    let mut support = BTreeSet::new();
    for e in edges {
        support.insert(e.lo);
        support.insert(e.hi);
    }
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if edges.len() != support.len() - 1 {
        return Err(Error::NotATree(format!(
            "{} edges on {} vertices",
            edges.len(),
            support.len()
        )));
    }
    // BFS from the smallest vertex; connectivity plus the edge count above
    // certify the tree property.
    let root = *support.iter().next().expect("nonempty");
    let mut rel: BTreeMap<Vertex, i64> = BTreeMap::new();
    rel.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let hv = rel[&v];
        for e in edges {
            if let Some(w) = e.other(v) {
                if !rel.contains_key(&w) {
                    rel.insert(w, hv + e.gain_from(v)?);
                    queue.push_back(w);
                }
            }
        }
    }
    if rel.len() != support.len() {
        return Err(Error::NotATree("edge set is disconnected".into()));
    }
    let min = *rel.values().min().expect("nonempty");
    HeightFunction::new(rel.into_iter().map(|(v, h)| (v, (h - min) as u64)).collect())
}

fn connected_within(
    edges: &[GainedEdge],
    support: &BTreeSet<Vertex>,
    max_vertex: usize,
) -> bool {
    let mut uf = UnionFind::new(max_vertex);
    for e in edges {
        uf.union(e.lo, e.hi);
    }
    let mut it = support.iter();
    let first = match it.next() {
        Some(&v) => v,
        None => return false,
    };
    it.all(|&v| uf.same(first, v))
}

/// All height functions `h` on `support` (minimum 0, maximum at most
/// `(|support|-1) * max|gain|`) whose selected subgraph restricted to the
/// support is connected. The bound suffices: a connected coherent subgraph
/// is spanned by a tree of at most `|support|-1` edges, each changing the
/// height by at most the largest absolute gain.
pub fn enumerate_height_functions(
    graph: &GainGraph,
    support: &BTreeSet<Vertex>,
) -> Result<Vec<HeightFunction>> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let verts: Vec<Vertex> = support.iter().copied().collect();
    let bound = (verts.len() as u64 - 1) * graph.max_abs_gain();
    let mut out = Vec::new();
    let mut values = vec![0u64; verts.len()];
    loop {
        if values.contains(&0) {
            let h = HeightFunction::new(
                verts.iter().copied().zip(values.iter().copied()).collect(),
            )?;
            let coherent = coherent_edges_within(graph, &h, support)?;
            if connected_within(&coherent, support, graph.n()) {
                out.push(h);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == values.len() {
                return Ok(out);
            }
            if values[i] < bound {
                values[i] += 1;
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}
