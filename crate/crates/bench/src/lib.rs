//! Shared fixtures for the criterion benches.

use gaingraph::{build_expansion, ExpansionParams, GainGraph};

/// `K_n^{ab}` for benchmarking; panics on invalid parameters.
pub fn expansion(n: usize, a: i64, b: i64) -> GainGraph {
    build_expansion(ExpansionParams::new(n, a, b).expect("valid parameters"))
        .expect("buildable expansion")
}
