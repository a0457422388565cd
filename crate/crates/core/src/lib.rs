//! Integral gain graphs, their `[a,b]`-expansions, NBC tree and forest
//! enumeration by height-function decomposition, the bijection with
//! weighted rooted labelled trees, and the associated counting
//! polynomials, cross-checked by independent brute-force and
//! finite-field oracles.

pub mod bijection;
pub mod error;
pub mod graph;
pub mod height;
pub mod nbc;
pub mod oracle;
pub mod poly;

mod unionfind;

pub use error::{Error, Result};
pub use graph::{
    build_expansion, circle_gain, is_balanced_circle, CircleStep, ExpansionParams, GainGraph,
    GainedEdge, Preset, Vertex,
};
pub use height::{
    coherent_subgraph, compare_edges, compare_vertices, enumerate_height_functions,
    height_of_balanced_tree, EdgeOrder, HeightFunction,
};
pub use nbc::{
    enumerate_nbc_sets, enumerate_nbc_trees, nbc_edge_profile, EdgeCountProfile, NbcForest,
    NbcTree,
};
pub use bijection::{
    braid_correspondence, decode_forest, decode_tree, encode_forest, encode_tree,
    shi_correspondence, validate_ab_tree, ABForest, ABParams, ABTree, RootedTree,
};
pub use poly::{
    ab_forest_polynomial, ab_tree_count, charpoly_closed_form, charpoly_closed_form_reduced,
    charpoly_from_poincare, decreasing_forest_count, poincare, region_count, stirling1_unsigned,
    IntPolynomial,
};
pub use oracle::{
    admissible_primes, charpoly_interpolated, count_nbc_bruteforce, enumerate_balanced_circles,
    finite_field_count, is_nbc_bruteforce, regions_from_charpoly, BalancedCircle,
};
