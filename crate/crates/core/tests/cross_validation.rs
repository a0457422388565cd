//! Cross-module consistency checks: the corner recursion against the
//! brute-force broken-circuit oracle, the closed forms against the
//! finite-field interpolation, and the codec against exhaustive
//! enumeration.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use gaingraph::bijection::{enumerate_ab_forests, enumerate_ab_trees};
use gaingraph::height::enumerate_height_functions;
use gaingraph::oracle::DEFAULT_MAX_N;
use gaingraph::*;

fn k(n: usize, a: i64, b: i64) -> GainGraph {
    build_expansion(ExpansionParams::new(n, a, b).unwrap()).unwrap()
}

fn all_nbc_trees(graph: &GainGraph) -> Vec<NbcTree> {
    let support: BTreeSet<Vertex> = (1..=graph.n()).collect();
    let mut out = Vec::new();
    for h in enumerate_height_functions(graph, &support).unwrap() {
        out.extend(enumerate_nbc_trees(graph, &h, &support).unwrap());
    }
    out
}

#[test]
fn recursion_agrees_with_bruteforce_per_height() {
    // every tree from the recursion passes the first-principles check,
    // and every spanning tree of the selected subgraph it rejects fails it
    let g = k(4, 0, 1);
    let h = HeightFunction::from_full_array(&[0, 1, 0, 1]).unwrap();
    let support: BTreeSet<Vertex> = (1..=4).collect();
    let accepted: BTreeSet<Vec<GainedEdge>> = enumerate_nbc_trees(&g, &h, &support)
        .unwrap()
        .iter()
        .map(|t| t.edges().to_vec())
        .collect();
    let order = EdgeOrder::ByHeight(h.clone());
    let selected = coherent_subgraph(&g, &h).unwrap();
    // all spanning trees of the 5-edge selected subgraph by brute force
    let edges = selected.edges();
    let mut spanning = 0;
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() != 3 {
            continue;
        }
        let subset: Vec<GainedEdge> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        if height_of_balanced_tree(&subset)
            .map(|ht| ht.support_set() == support)
            .unwrap_or(false)
        {
            spanning += 1;
            let is_nbc = is_nbc_bruteforce(&subset, &g, &order).unwrap();
            assert_eq!(is_nbc, accepted.contains(&subset), "{:?}", subset);
        }
    }
    assert_eq!(spanning, 8, "the selected subgraph has 8 spanning trees");
    assert_eq!(accepted.len(), 4);
}

#[test]
fn enumeration_count_matches_bruteforce() {
    for (a, b) in [(0, 0), (0, 1), (-1, 1), (1, 1), (-1, 2)] {
        for n in 1..=4 {
            let g = k(n, a, b);
            let listed = enumerate_nbc_sets(&g).unwrap();
            let (count, profile) =
                count_nbc_bruteforce(&g, &EdgeOrder::CanonicalKey, DEFAULT_MAX_N).unwrap();
            assert_eq!(
                BigUint::from(listed.len()),
                count,
                "({},{},{})",
                n,
                a,
                b
            );
            let enum_profile = nbc_edge_profile(&g).unwrap();
            assert_eq!(enum_profile.counts, profile.counts, "({},{},{})", n, a, b);
        }
    }
}

#[test]
fn oracle_triangle() {
    for (a, b) in [(0, 0), (0, 1), (-1, 1), (-1, 2)] {
        for n in 1..=4 {
            let g = k(n, a, b);
            let formula = region_count(n, a, b).unwrap();
            let listed = enumerate_nbc_sets(&g).unwrap().len();
            let (brute, _) =
                count_nbc_bruteforce(&g, &EdgeOrder::CanonicalKey, DEFAULT_MAX_N).unwrap();
            let chi = charpoly_interpolated(&g, &admissible_primes(&g, n + 2)).unwrap();
            let from_chi = regions_from_charpoly(&chi, n).unwrap();
            assert_eq!(formula, BigUint::from(listed), "({},{},{})", n, a, b);
            assert_eq!(formula, brute, "({},{},{})", n, a, b);
            assert_eq!(formula, from_chi, "({},{},{})", n, a, b);
        }
    }
}

#[test]
fn linial_regions_match_without_closed_form() {
    // no closed form is available at a=b=1; the two oracle routes must
    // still agree with each other
    for n in 1..=4 {
        let g = k(n, 1, 1);
        let (brute, _) =
            count_nbc_bruteforce(&g, &EdgeOrder::CanonicalKey, DEFAULT_MAX_N).unwrap();
        let chi = charpoly_interpolated(&g, &admissible_primes(&g, n + 2)).unwrap();
        assert_eq!(brute, regions_from_charpoly(&chi, n).unwrap(), "n={}", n);
        let listed = enumerate_nbc_sets(&g).unwrap().len();
        assert_eq!(brute, BigUint::from(listed), "n={}", n);
    }
}

#[test]
fn charpoly_three_routes_agree() {
    for (a, b) in [(0, 0), (0, 1), (-1, 1), (-1, 2)] {
        for n in 1..=4 {
            let g = k(n, a, b);
            let closed = charpoly_closed_form(n, a, b).unwrap();
            let from_poin =
                charpoly_from_poincare(&poincare(&nbc_edge_profile(&g).unwrap()), n).unwrap();
            let interpolated =
                charpoly_interpolated(&g, &admissible_primes(&g, n + 2)).unwrap();
            assert_eq!(closed, from_poin, "({},{},{})", n, a, b);
            assert_eq!(closed, interpolated, "({},{},{})", n, a, b);
            // reduced variant is the full one divided by q
            let reduced = charpoly_closed_form_reduced(n, a, b).unwrap();
            assert_eq!(IntPolynomial::variable().mul(&reduced), closed);
        }
    }
}

#[test]
fn tree_counts_match_closed_form() {
    for n in 1..=5usize {
        for (alpha, beta) in [(1u64, 0u64), (1, 1), (2, 1), (2, 2), (3, 2)] {
            let support: Vec<Vertex> = (1..=n).collect();
            let listed = enumerate_ab_trees(&support, ABParams::new(alpha, beta)).len();
            assert_eq!(
                BigUint::from(listed),
                ab_tree_count(n, alpha, beta).unwrap(),
                "n={}, ({},{})",
                n,
                alpha,
                beta
            );
        }
    }
}

#[test]
fn forest_polynomial_matches_exhaustive_counts() {
    // F(q) = sum_j (-1)^(n-j) f_{n,j} q^(j-1) with f_{n,j} counted directly
    for n in 1..=4usize {
        for (alpha, beta) in [(1u64, 0u64), (1, 1), (2, 1), (3, 2)] {
            let params = ABParams::new(alpha, beta);
            let mut by_trees: Vec<usize> = vec![0; n + 1];
            for f in enumerate_ab_forests(n, params) {
                by_trees[f.trees().len()] += 1;
            }
            let mut coeffs = vec![BigInt::from(0); n];
            for (j, &count) in by_trees.iter().enumerate().skip(1) {
                let mut c = BigInt::from(count);
                if (n - j) % 2 == 1 {
                    c = -c;
                }
                coeffs[j - 1] = c;
            }
            assert_eq!(
                IntPolynomial::new(coeffs),
                ab_forest_polynomial(n, alpha, beta).unwrap(),
                "n={}, ({},{})",
                n,
                alpha,
                beta
            );
        }
    }
}

#[test]
fn codec_round_trips_both_ways() {
    for (a, b) in [(0, 0), (0, 1), (-1, 1), (-1, 2)] {
        let params = ABParams::from_gain_bounds(a, b).unwrap();
        for n in 1..=4usize {
            let trees = all_nbc_trees(&k(n, a, b));
            let mut encoded = BTreeSet::new();
            for t in &trees {
                let image = encode_tree(t, a, b).unwrap();
                assert_eq!(&decode_tree(&image, a, b).unwrap(), t);
                assert_eq!(image.root(), t.corner());
                encoded.insert(image);
            }
            assert_eq!(encoded.len(), trees.len(), "injective");
            let support: Vec<Vertex> = (1..=n).collect();
            let all = enumerate_ab_trees(&support, params);
            assert_eq!(
                encoded,
                all.iter().cloned().collect(),
                "onto all valid trees at ({},{}), n={}",
                a,
                b,
                n
            );
            for t in &all {
                assert_eq!(&encode_tree(&decode_tree(t, a, b).unwrap(), a, b).unwrap(), t);
            }
        }
    }
}

#[test]
fn region_count_triangle_with_forest_enumeration() {
    for (a, b) in [(0, 0), (0, 1), (-1, 1), (-1, 2)] {
        for n in 1..=4usize {
            let params = ABParams::from_gain_bounds(a, b).unwrap();
            let regions = region_count(n, a, b).unwrap();
            let p = poincare(&nbc_edge_profile(&k(n, a, b)).unwrap());
            assert_eq!(BigInt::from(regions.clone()), p.eval(&BigInt::one()));
            let chi = charpoly_closed_form(n, a, b).unwrap();
            assert_eq!(regions, regions_from_charpoly(&chi, n).unwrap());
            let forests = enumerate_ab_forests(n, params).len();
            assert_eq!(regions, BigUint::from(forests));
        }
    }
}

#[test]
fn braid_and_shi_specializations() {
    for n in 1..=4usize {
        // braid: images are exactly the increasing trees on {0, ..., n}
        let mut images = BTreeSet::new();
        for f in enumerate_nbc_sets(&k(n, 0, 0)).unwrap() {
            images.insert(braid_correspondence(&f).unwrap());
        }
        let support: Vec<Vertex> = (0..=n).collect();
        let expected: BTreeSet<RootedTree> = gaingraph::bijection::enumerate_rooted_trees(&support)
            .into_iter()
            .filter(|t| t.root == 0 && t.is_increasing())
            .collect();
        assert_eq!(images, expected, "braid n={}", n);

        // shi: images are exactly the trees on {1, ..., n+1} rooted at n+1
        let mut images = BTreeSet::new();
        for f in enumerate_nbc_sets(&k(n, 0, 1)).unwrap() {
            images.insert(shi_correspondence(&f).unwrap());
        }
        let support: Vec<Vertex> = (1..=n + 1).collect();
        let expected: BTreeSet<RootedTree> = gaingraph::bijection::enumerate_rooted_trees(&support)
            .into_iter()
            .filter(|t| t.root == n + 1)
            .collect();
        assert_eq!(images, expected, "shi n={}", n);
        assert_eq!(images.len(), (n + 1).pow(n as u32 - 1), "Cayley count");
    }
}
