//! Enumeration of NBC trees and NBC spanning forests.
//!
//! NBC trees of a selected subgraph are produced by recursion on the
//! corner: partition the remaining vertices into pieces connected in the
//! selected subgraph, enumerate NBC subtrees per piece, and attach the
//! corner to each piece at its order-smallest vertex adjacent to the
//! corner. Forests come from the decomposition over set partitions of
//! `[n]` and coherent height functions per block.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{GainGraph, GainedEdge, Vertex};
use crate::height::{
    coherent_edges_within, compare_vertices, enumerate_height_functions, HeightFunction,
};
use crate::unionfind::UnionFind;

/// A broken-circuit-free tree on its support, together with the height
/// function it induces and that function's corner.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NbcTree {
    edges: Vec<GainedEdge>,
    height: HeightFunction,
    corner: Vertex,
}

impl NbcTree {
    /// The one-vertex tree with no edges.
    pub fn singleton(v: Vertex) -> Self {
        let height = HeightFunction::new([(v, 0)].into_iter().collect()).expect("valid");
        NbcTree { edges: Vec::new(), height, corner: v }
    }

    /// Assembles a tree from parts, checking the structural invariants:
    /// the edges form a tree on the height's support and every edge is
    /// coherent. Broken-circuit freeness is the caller's obligation
    /// (enumeration and decoding both certify it).
    pub(crate) fn from_parts(mut edges: Vec<GainedEdge>, height: HeightFunction) -> Result<Self> {
        edges.sort();
        let support = height.support_set();
        if edges.len() + 1 != support.len() {
            return Err(Error::NotATree(format!(
                "{} edges on {} vertices",
                edges.len(),
                support.len()
            )));
        }
        let max_v = *support.iter().last().expect("nonempty");
        let mut uf = UnionFind::new(max_v);
        for e in &edges {
            if !support.contains(&e.lo) || !support.contains(&e.hi) {
                return Err(Error::NotATree(format!("edge {} leaves the support", e)));
            }
            if !height.is_coherent(e)? {
                return Err(Error::Internal(format!("edge {} is not coherent", e)));
            }
            if !uf.union(e.lo, e.hi) {
                return Err(Error::NotATree(format!("edge {} closes a cycle", e)));
            }
        }
        let corner = height.corner();
        Ok(NbcTree { edges, height, corner })
    }

    pub fn edges(&self) -> &[GainedEdge] {
        &self.edges
    }

    pub fn height(&self) -> &HeightFunction {
        &self.height
    }

    pub fn corner(&self) -> Vertex {
        self.corner
    }

    pub fn support(&self) -> BTreeSet<Vertex> {
        self.height.support_set()
    }

    /// Tree-neighbors of a vertex.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> =
            self.edges.iter().filter_map(|e| e.other(v)).collect();
        out.sort_unstable();
        out
    }
}

/// A spanning forest of NBC trees whose supports partition `[n]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NbcForest {
    components: Vec<NbcTree>,
}

impl NbcForest {
    pub fn new(mut components: Vec<NbcTree>) -> Result<Self> {
        components.sort_by_key(|t| *t.support().iter().next().expect("nonempty"));
        let mut seen = BTreeSet::new();
        for t in &components {
            for v in t.support() {
                if !seen.insert(v) {
                    return Err(Error::Internal(format!(
                        "component supports overlap at vertex {}",
                        v
                    )));
                }
            }
        }
        let n = *seen.iter().last().ok_or(Error::EmptySupport)?;
        if seen.len() != n {
            return Err(Error::Internal(
                "component supports do not cover [n]".into(),
            ));
        }
        Ok(NbcForest { components })
    }

    pub fn components(&self) -> &[NbcTree] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components.iter().map(|t| t.support().len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.components.iter().map(|t| t.edges.len()).sum()
    }

    pub fn all_edges(&self) -> Vec<GainedEdge> {
        let mut out: Vec<GainedEdge> = self
            .components
            .iter()
            .flat_map(|t| t.edges.iter().copied())
            .collect();
        out.sort();
        out
    }
}

/// `counts[j]` = number of NBC forests with exactly `j` edges.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeCountProfile {
    pub n: usize,
    pub counts: BTreeMap<usize, BigUint>,
}

impl EdgeCountProfile {
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn count(&self, j: usize) -> BigUint {
        self.counts.get(&j).cloned().unwrap_or_else(BigUint::zero)
    }
}

impl Serialize for EdgeCountProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .counts
            .iter()
            .map(|(j, c)| (j.to_string(), c.to_string()))
            .collect();
        map.serialize(s)
    }
}

/// All set partitions of `items`, blocks and partitions in a fixed
/// deterministic order.
pub fn set_partitions(items: &[Vertex]) -> Vec<Vec<BTreeSet<Vertex>>> {
    fn rec(items: &[Vertex], current: &mut Vec<BTreeSet<Vertex>>, out: &mut Vec<Vec<BTreeSet<Vertex>>>) {
        match items.split_first() {
            None => out.push(current.clone()),
            Some((&first, rest)) => {
                for i in 0..current.len() {
                    current[i].insert(first);
                    rec(rest, current, out);
                    current[i].remove(&first);
                }
                current.push([first].into_iter().collect());
                rec(rest, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(items, &mut Vec::new(), &mut out);
    out
}

fn connected_in(edges: &[GainedEdge], block: &BTreeSet<Vertex>, max_vertex: usize) -> bool {
    let mut uf = UnionFind::new(max_vertex);
    for e in edges {
        if block.contains(&e.lo) && block.contains(&e.hi) {
            uf.union(e.lo, e.hi);
        }
    }
    let mut it = block.iter();
    let first = match it.next() {
        Some(&v) => v,
        None => return false,
    };
    it.all(|&v| uf.same(first, v))
}

/// The order-smallest vertex of `support` is the corner of `h` on it.
fn corner_of(h: &HeightFunction, support: &BTreeSet<Vertex>) -> Result<Vertex> {
    let mut it = support.iter();
    let mut best = *it.next().ok_or(Error::EmptySupport)?;
    for &v in it {
        if compare_vertices(h, v, best)? == std::cmp::Ordering::Less {
            best = v;
        }
    }
    Ok(best)
}

struct TreeSearch<'a> {
    h: &'a HeightFunction,
    /// coherent edges within the outer support, keyed by endpoint pair
    adjacency: BTreeMap<(Vertex, Vertex), GainedEdge>,
    max_vertex: usize,
}

impl<'a> TreeSearch<'a> {
    fn coherent_edge(&self, u: Vertex, v: Vertex) -> Option<GainedEdge> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.adjacency.get(&key).copied()
    }

    fn edges_within(&self, block: &BTreeSet<Vertex>) -> Vec<GainedEdge> {
        self.adjacency
            .values()
            .filter(|e| block.contains(&e.lo) && block.contains(&e.hi))
            .copied()
            .collect()
    }

    /// Edge lists of all NBC spanning trees of the selected subgraph
    /// restricted to `support`, by recursion on the corner.
    fn trees(&self, support: &BTreeSet<Vertex>) -> Result<Vec<Vec<GainedEdge>>> {
        if support.len() == 1 {
            return Ok(vec![Vec::new()]);
        }
        let corner = corner_of(self.h, support)?;
        let mut rest = support.clone();
        rest.remove(&corner);
        let rest_items: Vec<Vertex> = rest.iter().copied().collect();

        let mut out = Vec::new();
        'partition: for blocks in set_partitions(&rest_items) {
            let edges = self.edges_within(&rest);
            for block in &blocks {
                if !connected_in(&edges, block, self.max_vertex) {
                    continue 'partition;
                }
            }
            // each piece must attach to the corner at its order-smallest
            // vertex adjacent to the corner in the ambient selected graph
            let mut attachments = Vec::with_capacity(blocks.len());
            for block in &blocks {
                let mut smallest: Option<Vertex> = None;
                for &v in block {
                    if self.coherent_edge(corner, v).is_some() {
                        smallest = Some(match smallest {
                            None => v,
                            Some(s) => {
                                if compare_vertices(self.h, v, s)?
                                    == std::cmp::Ordering::Less
                                {
                                    v
                                } else {
                                    s
                                }
                            }
                        });
                    }
                }
                match smallest {
                    Some(v) => attachments
                        .push(self.coherent_edge(corner, v).expect("adjacent")),
                    None => continue 'partition,
                }
            }
            // subtree choices per piece, combined by cartesian product
            let mut per_block = Vec::with_capacity(blocks.len());
            for block in &blocks {
                let sub = self.trees(block)?;
                if sub.is_empty() {
                    continue 'partition;
                }
                per_block.push(sub);
            }
            let mut combos: Vec<Vec<GainedEdge>> = vec![attachments.clone()];
            for sub in &per_block {
                let mut next = Vec::with_capacity(combos.len() * sub.len());
                for c in &combos {
                    for s in sub {
                        let mut merged = c.clone();
                        merged.extend_from_slice(s);
                        next.push(merged);
                    }
                }
                combos = next;
            }
            out.extend(combos);
        }
        for t in &mut out {
            t.sort();
        }
        out.sort();
        Ok(out)
    }
}

/// Exactly the spanning trees of the selected subgraph restricted to
/// `support` that contain no broken circuit with respect to the induced
/// order. Errors if the selected subgraph does not connect the support.
pub fn enumerate_nbc_trees(
    graph: &GainGraph,
    h: &HeightFunction,
    support: &BTreeSet<Vertex>,
) -> Result<Vec<NbcTree>> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let coherent = coherent_edges_within(graph, h, support)?;
    if !connected_in(&coherent, support, graph.n()) {
        return Err(Error::NotConnected);
    }
    let search = TreeSearch {
        h,
        adjacency: coherent.iter().map(|e| ((e.lo, e.hi), *e)).collect(),
        max_vertex: graph.n(),
    };
    let height = h.restrict_normalized(support)?;
    search
        .trees(support)?
        .into_iter()
        .map(|edges| NbcTree::from_parts(edges, height.clone()))
        .collect()
}

/// All NBC spanning forests of the graph: per set partition of `[n]`, per
/// block, per coherent height function on the block, the block's NBC
/// subtrees, combined across blocks.
pub fn enumerate_nbc_sets(graph: &GainGraph) -> Result<Vec<NbcForest>> {
    let all: Vec<Vertex> = (1..=graph.n()).collect();
    let mut forests = Vec::new();
    for blocks in set_partitions(&all) {
        let mut per_block: Vec<Vec<NbcTree>> = Vec::with_capacity(blocks.len());
        let mut dead = false;
        for block in &blocks {
            let mut trees = Vec::new();
            for h in enumerate_height_functions(graph, block)? {
                trees.extend(enumerate_nbc_trees(graph, &h, block)?);
            }
            if trees.is_empty() {
                dead = true;
                break;
            }
            per_block.push(trees);
        }
        if dead {
            continue;
        }
        let mut combos: Vec<Vec<NbcTree>> = vec![Vec::new()];
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
        for components in combos {
            forests.push(NbcForest::new(components)?);
        }
    }
    forests.sort();
    Ok(forests)
}

/// The profile `j -> number of NBC forests with j edges`, including the
/// empty forest at `j = 0`.
pub fn nbc_edge_profile(graph: &GainGraph) -> Result<EdgeCountProfile> {
    let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
    for f in enumerate_nbc_sets(graph)? {
        *counts.entry(f.edge_count()).or_insert_with(BigUint::zero) += BigUint::one();
    }
    Ok(EdgeCountProfile { n: graph.n(), counts })
}

// ---- JSON forms -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TreeJson {
    support: Vec<Vertex>,
    edges: Vec<String>,
    heights: Vec<u64>,
}

impl Serialize for NbcTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let support: Vec<Vertex> = self.height.support().collect();
        let heights = support
            .iter()
            .map(|&v| self.height.get(v).expect("support"))
            .collect();
        TreeJson {
            support,
            edges: self.edges.iter().map(|e| e.to_string()).collect(),
            heights,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NbcTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TreeJson::deserialize(d)?;
        if raw.support.len() != raw.heights.len() {
            return Err(D::Error::custom("support/heights length mismatch"));
        }
        let height = HeightFunction::new(
            raw.support.iter().copied().zip(raw.heights.iter().copied()).collect(),
        )
        .map_err(D::Error::custom)?;
        let edges = raw
            .edges
            .iter()
            .map(|s| GainedEdge::parse(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        NbcTree::from_parts(edges, height).map_err(D::Error::custom)
    }
}

impl Serialize for NbcForest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.components.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NbcForest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let components = Vec::<NbcTree>::deserialize(d)?;
        NbcForest::new(components).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_expansion, ExpansionParams};

    fn k(n: usize, a: i64, b: i64) -> GainGraph {
        build_expansion(ExpansionParams::new(n, a, b).unwrap()).unwrap()
    }

    fn e(lo: Vertex, hi: Vertex, gain: i64) -> GainedEdge {
        GainedEdge { lo, hi, gain }
    }

    fn full(n: usize) -> BTreeSet<Vertex> {
        (1..=n).collect()
    }

    #[test]
    fn partitions_are_bell_numbers() {
        assert_eq!(set_partitions(&[1]).len(), 1);
        assert_eq!(set_partitions(&[1, 2, 3]).len(), 5);
        assert_eq!(set_partitions(&[1, 2, 3, 4, 5]).len(), 52);
    }

    #[test]
    fn worked_example_nbc_trees() {
        let g = k(4, 0, 1);
        let h = HeightFunction::from_full_array(&[0, 1, 0, 1]).unwrap();
        let trees = enumerate_nbc_trees(&g, &h, &full(4)).unwrap();
        let got: BTreeSet<Vec<GainedEdge>> =
            trees.iter().map(|t| t.edges().to_vec()).collect();
        let expect: BTreeSet<Vec<GainedEdge>> = [
            vec![e(1, 2, 1), e(1, 3, 0), e(2, 4, 0)],
            vec![e(1, 2, 1), e(2, 4, 0), e(3, 4, 1)],
            vec![e(1, 3, 0), e(1, 4, 1), e(2, 4, 0)],
            vec![e(1, 4, 1), e(2, 4, 0), e(3, 4, 1)],
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expect);
        for t in &trees {
            assert_eq!(t.corner(), 2);
        }
    }

    #[test]
    fn single_vertex_tree() {
        let g = k(1, -5, 5);
        let h = HeightFunction::from_full_array(&[0]).unwrap();
        let trees = enumerate_nbc_trees(&g, &h, &full(1)).unwrap();
        assert_eq!(trees.len(), 1);
        assert!(trees[0].edges().is_empty());
    }

    #[test]
    fn k2_shi_single_coherent_tree() {
        let g = k(2, 0, 1);
        let h = HeightFunction::from_full_array(&[0, 1]).unwrap();
        let trees = enumerate_nbc_trees(&g, &h, &full(2)).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].edges(), &[e(1, 2, 1)]);
        assert_eq!(trees[0].corner(), 2);
    }

    #[test]
    fn rejects_disconnected_support() {
        let g = k(2, 1, 1);
        let h = HeightFunction::from_full_array(&[0, 0]).unwrap();
        // no coherent edge for equal heights in the Linial graph
        assert!(matches!(
            enumerate_nbc_trees(&g, &h, &full(2)),
            Err(Error::NotConnected)
        ));
    }

    #[test]
    fn forests_small_cases() {
        let forests = enumerate_nbc_sets(&k(2, 0, 1)).unwrap();
        assert_eq!(forests.len(), 3);
        let edge_sets: BTreeSet<Vec<GainedEdge>> =
            forests.iter().map(|f| f.all_edges()).collect();
        let expect: BTreeSet<Vec<GainedEdge>> =
            [vec![], vec![e(1, 2, 0)], vec![e(1, 2, 1)]].into_iter().collect();
        assert_eq!(edge_sets, expect);

        assert_eq!(enumerate_nbc_sets(&k(1, 0, 0)).unwrap().len(), 1);
        assert_eq!(enumerate_nbc_sets(&k(3, 0, 0)).unwrap().len(), 6);
    }

    #[test]
    fn removing_the_corner_leaves_nbc_subtrees() {
        let g = k(4, 0, 1);
        let h = HeightFunction::from_full_array(&[0, 1, 0, 1]).unwrap();
        for tree in enumerate_nbc_trees(&g, &h, &full(4)).unwrap() {
            let c = tree.corner();
            let remaining: Vec<GainedEdge> = tree
                .edges()
                .iter()
                .filter(|e| !e.incident(c))
                .copied()
                .collect();
            // split remaining support into components of the residual forest
            let mut rest = tree.support();
            rest.remove(&c);
            let mut uf = UnionFind::new(g.n());
            for e in &remaining {
                uf.union(e.lo, e.hi);
            }
            let mut comps: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
            for &v in &rest {
                comps.entry(uf.find(v)).or_default().insert(v);
            }
            for comp in comps.values() {
                let sub = enumerate_nbc_trees(&g, &h.restrict_normalized(comp).unwrap(), comp)
                    .unwrap();
                let edges_here: Vec<GainedEdge> = remaining
                    .iter()
                    .filter(|e| comp.contains(&e.lo) && comp.contains(&e.hi))
                    .copied()
                    .collect();
                assert!(sub.iter().any(|t| t.edges() == edges_here.as_slice()));
            }
        }
    }

    #[test]
    fn profiles() {
        let p = nbc_edge_profile(&k(2, 0, 0)).unwrap();
        assert_eq!(p.count(0), BigUint::one());
        assert_eq!(p.count(1), BigUint::one());
        assert_eq!(p.counts.len(), 2);

        let p = nbc_edge_profile(&k(2, 0, 1)).unwrap();
        assert_eq!(p.count(0), BigUint::one());
        assert_eq!(p.count(1), BigUint::from(2u32));

        let p = nbc_edge_profile(&k(1, -3, 7)).unwrap();
        assert_eq!(p.counts.len(), 1);
        assert_eq!(p.count(0), BigUint::one());
    }

    #[test]
    fn forest_json_round_trip() {
        for f in enumerate_nbc_sets(&k(3, 0, 1)).unwrap() {
            let json = serde_json::to_string(&f).unwrap();
            let back: NbcForest = serde_json::from_str(&json).unwrap();
            assert_eq!(back, f);
        }
    }
}
