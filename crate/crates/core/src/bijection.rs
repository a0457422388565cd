//! The bijection between NBC trees of `K_n^{ab}` (for `a+b` in `{0,1}`)
//! and weighted rooted labelled trees, its forest extension, and the
//! braid/Shi specializations.
//!
//! Encoding roots the tree at its corner; an edge to a child with
//! canonical gain `g` gets weight `g` if `g > 0` and `1 - g` otherwise.
//! Decoding rebuilds heights top-down and must find the root back as the
//! corner.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{GainedEdge, Vertex};
use crate::height::{compare_vertices, HeightFunction};
use crate::nbc::{set_partitions, NbcForest, NbcTree};
use crate::unionfind::UnionFind;

/// Weight bounds of a rooted labelled tree: parent<child edges take
/// weights in `[1,alpha]`, parent>child edges in `[1,beta]`. For the
/// gain bounds `(a,b)` the matching parameters are `alpha = 1-a`,
/// `beta = b`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ABParams {
    pub alpha: u64,
    pub beta: u64,
}

impl ABParams {
    pub fn new(alpha: u64, beta: u64) -> Self {
        ABParams { alpha, beta }
    }

    /// Requires `a + b` in `{0, 1}`.
    pub fn from_gain_bounds(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::EmptyGainInterval { a, b });
        }
        if a + b != 0 && a + b != 1 {
            return Err(Error::UnsupportedGainSum { a, b });
        }
        Ok(ABParams { alpha: (1 - a) as u64, beta: b as u64 })
    }
}

/// A rooted labelled tree with positive integer edge weights, stored as a
/// child -> (parent, weight) map.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ABTree {
    root: Vertex,
    links: BTreeMap<Vertex, (Vertex, u64)>,
}

impl ABTree {
    pub fn new(root: Vertex, links: BTreeMap<Vertex, (Vertex, u64)>) -> Result<Self> {
        if links.contains_key(&root) {
            return Err(Error::BadWeightedTree(format!(
                "root {} has a parent",
                root
            )));
        }
        let mut support: BTreeSet<Vertex> = links.keys().copied().collect();
        support.insert(root);
        // every parent chain must reach the root without revisiting
        for &child in links.keys() {
            let mut seen = BTreeSet::from([child]);
            let mut v = child;
            while v != root {
                let &(p, _) = links.get(&v).ok_or_else(|| {
                    Error::BadWeightedTree(format!("parent {} is outside the tree", v))
                })?;
                if !support.contains(&p) {
                    return Err(Error::BadWeightedTree(format!(
                        "parent {} is outside the tree",
                        p
                    )));
                }
                if !seen.insert(p) {
                    return Err(Error::BadWeightedTree("parent cycle".into()));
                }
                v = p;
            }
        }
        Ok(ABTree { root, links })
    }

    pub fn singleton(root: Vertex) -> Self {
        ABTree { root, links: BTreeMap::new() }
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Edges as `(parent, child, weight)`, sorted by child.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, u64)> + '_ {
        self.links.iter().map(|(&c, &(p, w))| (p, c, w))
    }

    pub fn support(&self) -> BTreeSet<Vertex> {
        let mut s: BTreeSet<Vertex> = self.links.keys().copied().collect();
        s.insert(self.root);
        s
    }

    pub fn children(&self, v: Vertex) -> Vec<(Vertex, u64)> {
        self.links
            .iter()
            .filter(|(_, &(p, _))| p == v)
            .map(|(&c, &(_, w))| (c, w))
            .collect()
    }
}

/// A list of weighted rooted trees whose supports partition `[n]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ABForest {
    trees: Vec<ABTree>,
}

impl ABForest {
    pub fn new(mut trees: Vec<ABTree>) -> Result<Self> {
        trees.sort_by_key(|t| *t.support().iter().next().expect("nonempty"));
        let mut seen = BTreeSet::new();
        for t in &trees {
            for v in t.support() {
                if !seen.insert(v) {
                    return Err(Error::BadWeightedTree(format!(
                        "tree supports overlap at vertex {}",
                        v
                    )));
                }
            }
        }
        let n = *seen.iter().last().ok_or(Error::EmptySupport)?;
        if seen.len() != n || !seen.contains(&1) {
            return Err(Error::BadWeightedTree(
                "tree supports do not cover [n]".into(),
            ));
        }
        Ok(ABForest { trees })
    }

    pub fn trees(&self) -> &[ABTree] {
        &self.trees
    }

    pub fn n(&self) -> usize {
        self.trees.iter().map(|t| t.support().len()).sum()
    }
}

/// A single weight-interval violation found by [`validate_ab_tree`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WeightViolation {
    pub parent: Vertex,
    pub child: Vertex,
    pub weight: u64,
    pub bound: u64,
}

/// Diagnostics for the interval constraints; an empty list means valid.
pub fn validate_ab_tree(t: &ABTree, params: ABParams) -> Vec<WeightViolation> {
    let mut out = Vec::new();
    for (parent, child, weight) in t.edges() {
        let bound = if parent < child { params.alpha } else { params.beta };
        if weight < 1 || weight > bound {
            out.push(WeightViolation { parent, child, weight, bound });
        }
    }
    out
}

/// Whether the coherent edge between `u` and `v` exists in `K_n^{ab}[h]`,
/// i.e. the canonical height gap lies in `[a,b]`.
fn expansion_adjacent(h: &HeightFunction, u: Vertex, v: Vertex, a: i64, b: i64) -> Result<bool> {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let gap = h.get(hi)? as i128 - h.get(lo)? as i128;
    Ok(gap >= a as i128 && gap <= b as i128)
}

/// Certifies the corner-recursion characterization of NBC trees of
/// `K_n^{ab}[h]`: every subtree hangs off the corner at the order-smallest
/// vertex of its piece adjacent to the corner in the selected expansion.
pub fn is_nbc_tree_of_expansion(t: &NbcTree, a: i64, b: i64) -> Result<bool> {
    for e in t.edges() {
        if e.gain < a || e.gain > b {
            return Ok(false);
        }
    }
    fn check(
        t: &NbcTree,
        h: &HeightFunction,
        support: &BTreeSet<Vertex>,
        a: i64,
        b: i64,
    ) -> Result<bool> {
        if support.len() <= 1 {
            return Ok(true);
        }
        let mut corner = *support.iter().next().expect("nonempty");
        for &v in support.iter().skip(1) {
            if compare_vertices(h, v, corner)? == std::cmp::Ordering::Less {
                corner = v;
            }
        }
        // pieces of the tree after removing the corner
        let max_v = *support.iter().last().expect("nonempty");
        let mut uf = UnionFind::new(max_v);
        for e in t.edges() {
            if support.contains(&e.lo) && support.contains(&e.hi) && !e.incident(corner) {
                uf.union(e.lo, e.hi);
            }
        }
        let mut pieces: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for &v in support {
            if v != corner {
                pieces.entry(uf.find(v)).or_default().insert(v);
            }
        }
        for piece in pieces.values() {
            // the unique tree edge from the corner into this piece
            let mut attach: Option<Vertex> = None;
            for e in t.edges() {
                if let Some(other) = e.other(corner) {
                    if piece.contains(&other) {
                        if attach.is_some() {
                            return Ok(false);
                        }
                        attach = Some(other);
                    }
                }
            }
            let attach = match attach {
                Some(v) => v,
                None => return Ok(false),
            };
            for &v in piece {
                if compare_vertices(h, v, attach)? == std::cmp::Ordering::Less
                    && expansion_adjacent(h, corner, v, a, b)?
                {
                    return Ok(false);
                }
            }
            if !check(t, h, piece, a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    check(t, t.height(), &t.support(), a, b)
}

/// Encodes an NBC tree of `K_n^{ab}[h]` as a weighted rooted tree with
/// parameters `(1-a, b)`: root at the corner, weight `g` on positive
/// canonical gains and `1-g` otherwise.
pub fn encode_tree(t: &NbcTree, a: i64, b: i64) -> Result<ABTree> {
    let params = ABParams::from_gain_bounds(a, b)?;
    if !is_nbc_tree_of_expansion(t, a, b)? {
        return Err(Error::Internal(
            "input tree is not an NBC tree of the expansion".into(),
        ));
    }
    let root = t.corner();
    let mut links = BTreeMap::new();
    let mut queue = VecDeque::from([root]);
    let mut seen = BTreeSet::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in t.neighbors(v) {
            if seen.insert(w) {
                let (lo, hi) = if v < w { (v, w) } else { (w, v) };
                let gain = t
                    .edges()
                    .iter()
                    .find(|e| e.lo == lo && e.hi == hi)
                    .expect("tree edge")
                    .gain;
                let weight = if gain > 0 { gain as u64 } else { (1 - gain) as u64 };
                links.insert(w, (v, weight));
                queue.push_back(w);
            }
        }
    }
    let out = ABTree::new(root, links)?;
    let violations = validate_ab_tree(&out, params);
    if !violations.is_empty() {
        return Err(Error::Internal(format!(
            "encoded tree violates weight intervals on {} edge(s)",
            violations.len()
        )));
    }
    Ok(out)
}

/// Decodes a valid `(1-a, b)`-tree back to the unique NBC tree encoding
/// to it: heights are reconstructed top-down and shifted to attain 0, and
/// the root must come out as the corner.
pub fn decode_tree(t: &ABTree, a: i64, b: i64) -> Result<NbcTree> {
    let params = ABParams::from_gain_bounds(a, b)?;
    let violations = validate_ab_tree(t, params);
    if !violations.is_empty() {
        return Err(Error::WeightViolation(violations.len()));
    }
    let mut rel: BTreeMap<Vertex, i64> = BTreeMap::new();
    rel.insert(t.root(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([t.root()]);
    while let Some(p) = queue.pop_front() {
        let hp = rel[&p];
        for (c, w) in t.children(p) {
            let gain = if p < c { 1 - w as i64 } else { w as i64 };
            let (edge, hc) = if p < c {
                (GainedEdge { lo: p, hi: c, gain }, hp + gain)
            } else {
                (GainedEdge { lo: c, hi: p, gain }, hp - gain)
            };
            edges.push(edge);
            rel.insert(c, hc);
            queue.push_back(c);
        }
    }
    let min = *rel.values().min().expect("nonempty");
    let height = HeightFunction::new(
        rel.into_iter().map(|(v, h)| (v, (h - min) as u64)).collect(),
    )?;
    if height.corner() != t.root() {
        return Err(Error::Internal(format!(
            "decoded root {} is not the corner {}",
            t.root(),
            height.corner()
        )));
    }
    NbcTree::from_parts(edges, height)
}

/// Componentwise [`encode_tree`].
pub fn encode_forest(f: &NbcForest, a: i64, b: i64) -> Result<ABForest> {
    ABForest::new(
        f.components()
            .iter()
            .map(|t| encode_tree(t, a, b))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Componentwise [`decode_tree`].
pub fn decode_forest(f: &ABForest, a: i64, b: i64) -> Result<NbcForest> {
    NbcForest::new(
        f.trees()
            .iter()
            .map(|t| decode_tree(t, a, b))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// An unweighted rooted labelled tree, child -> parent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RootedTree {
    pub root: Vertex,
    pub parent: BTreeMap<Vertex, Vertex>,
}

impl RootedTree {
    pub fn support(&self) -> BTreeSet<Vertex> {
        let mut s: BTreeSet<Vertex> = self.parent.keys().copied().collect();
        s.insert(self.root);
        s
    }

    /// Every parent label smaller than its child's.
    pub fn is_increasing(&self) -> bool {
        self.parent.iter().all(|(&c, &p)| p < c)
    }
}

fn attach_components(f: &NbcForest, a: i64, b: i64, new_root: Vertex) -> Result<RootedTree> {
    let mut parent = BTreeMap::new();
    for component in f.components() {
        let encoded = encode_tree(component, a, b)?;
        parent.insert(encoded.root(), new_root);
        for (p, c, _) in encoded.edges() {
            parent.insert(c, p);
        }
    }
    Ok(RootedTree { root: new_root, parent })
}

/// Braid specialization: encode the components of an NBC forest of
/// `K_n^{00}` (weights are forced to 1 and dropped) and hang their roots
/// under a new vertex 0, giving an increasing tree on `n+1` vertices.
pub fn braid_correspondence(f: &NbcForest) -> Result<RootedTree> {
    let t = attach_components(f, 0, 0, 0)?;
    debug_assert!(t.is_increasing());
    Ok(t)
}

/// Shi specialization: encode the components of an NBC forest of
/// `K_n^{01}` and hang their roots under a new vertex `n+1`, giving an
/// arbitrary rooted labelled tree on `n+1` vertices.
pub fn shi_correspondence(f: &NbcForest) -> Result<RootedTree> {
    attach_components(f, 0, 1, f.n() + 1)
}

// ---- exhaustive enumeration (independent of encode/decode) ---------------

/// All labelled free trees on `support`, as edge lists, via weighted
/// sequence decoding.
pub fn labelled_free_trees(support: &[Vertex]) -> Vec<Vec<(Vertex, Vertex)>> {
    let m = support.len();
    if m == 0 {
        return Vec::new();
    }
    if m == 1 {
        return vec![Vec::new()];
    }
    if m == 2 {
        return vec![vec![(support[0], support[1])]];
    }
    // Prufer: every sequence of length m-2 over the support decodes to a
    // distinct tree.
    let mut out = Vec::new();
    let mut seq = vec![0usize; m - 2];
    loop {
        let mut degree: BTreeMap<Vertex, usize> =
            support.iter().map(|&v| (v, 1)).collect();
        for &i in &seq {
            *degree.get_mut(&support[i]).unwrap() += 1;
        }
        let mut edges = Vec::with_capacity(m - 1);
        for &i in &seq {
            let s = support[i];
            let leaf = *degree
                .iter()
                .find(|(_, &d)| d == 1)
                .expect("a leaf always exists")
                .0;
            edges.push((leaf.min(s), leaf.max(s)));
            *degree.get_mut(&leaf).unwrap() = 0;
            *degree.get_mut(&s).unwrap() -= 1;
        }
        let last: Vec<Vertex> = degree
            .iter()
            .filter(|(_, &d)| d == 1)
            .map(|(&v, _)| v)
            .collect();
        edges.push((last[0], last[1]));
        out.push(edges);
        // next sequence
        let mut i = 0;
        loop {
            if i == seq.len() {
                return out;
            }
            if seq[i] + 1 < m {
                seq[i] += 1;
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// All rooted labelled trees on `support` (free trees times root choice),
/// without weights.
pub fn enumerate_rooted_trees(support: &[Vertex]) -> Vec<RootedTree> {
    let mut out = Vec::new();
    for edges in labelled_free_trees(support) {
        for &root in support {
            let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
            for &(u, v) in &edges {
                adj.entry(u).or_default().push(v);
                adj.entry(v).or_default().push(u);
            }
            let mut parent = BTreeMap::new();
            let mut queue = VecDeque::from([root]);
            let mut seen = BTreeSet::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in adj.get(&v).into_iter().flatten() {
                    if seen.insert(w) {
                        parent.insert(w, v);
                        queue.push_back(w);
                    }
                }
            }
            out.push(RootedTree { root, parent });
        }
    }
    out.sort();
    out
}

/// All weighted rooted trees on `support` satisfying the interval
/// constraints. This enumeration is independent of the codec and serves
/// as its oracle.
pub fn enumerate_ab_trees(support: &[Vertex], params: ABParams) -> Vec<ABTree> {
    let mut out = Vec::new();
    for skeleton in enumerate_rooted_trees(support) {
        let edges: Vec<(Vertex, Vertex)> =
            skeleton.parent.iter().map(|(&c, &p)| (p, c)).collect();
        let bounds: Vec<u64> = edges
            .iter()
            .map(|&(p, c)| if p < c { params.alpha } else { params.beta })
            .collect();
        if bounds.iter().any(|&b| b == 0) {
            continue;
        }
        let mut weights: Vec<u64> = vec![1; edges.len()];
        let mut done = false;
        while !done {
            let links: BTreeMap<Vertex, (Vertex, u64)> = edges
                .iter()
                .zip(&weights)
                .map(|(&(p, c), &w)| (c, (p, w)))
                .collect();
            out.push(ABTree::new(skeleton.root, links).expect("valid skeleton"));
            done = true;
            for i in 0..weights.len() {
                if weights[i] < bounds[i] {
                    weights[i] += 1;
                    done = false;
                    break;
                }
                weights[i] = 1;
            }
        }
    }
    out.sort();
    out
}

/// All weighted rooted forests on `[n]` satisfying the constraints.
pub fn enumerate_ab_forests(n: usize, params: ABParams) -> Vec<ABForest> {
    let all: Vec<Vertex> = (1..=n).collect();
    let mut out = Vec::new();
    for blocks in set_partitions(&all) {
        let per_block: Vec<Vec<ABTree>> = blocks
            .iter()
            .map(|b| {
                let items: Vec<Vertex> = b.iter().copied().collect();
                enumerate_ab_trees(&items, params)
            })
            .collect();
        if per_block.iter().any(Vec::is_empty) {
            continue;
        }
        let mut combos: Vec<Vec<ABTree>> = vec![Vec::new()];
        for trees in &per_block {
            let mut next = Vec::with_capacity(combos.len() * trees.len());
            for c in &combos {
                for t in trees {
                    let mut merged = c.clone();
                    merged.push(t.clone());
                    next.push(merged);
                }
            }
            combos = next;
        }
        for trees in combos {
            out.push(ABForest::new(trees).expect("blocks partition [n]"));
        }
    }
    out.sort();
    out
}

// ---- JSON forms -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    parent: Vertex,
    child: Vertex,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
struct ABTreeJson {
    root: Vertex,
    edges: Vec<EdgeJson>,
}

impl Serialize for ABTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ABTreeJson {
            root: self.root,
            edges: self
                .edges()
                .map(|(parent, child, weight)| EdgeJson { parent, child, weight })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ABTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ABTreeJson::deserialize(d)?;
        let mut links = BTreeMap::new();
        for e in raw.edges {
            if links.insert(e.child, (e.parent, e.weight)).is_some() {
                return Err(D::Error::custom(format!(
                    "vertex {} has two parents",
                    e.child
                )));
            }
        }
        ABTree::new(raw.root, links).map_err(D::Error::custom)
    }
}

impl Serialize for ABForest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.trees.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ABForest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ABForest::new(Vec::<ABTree>::deserialize(d)?).map_err(D::Error::custom)
    }
}
