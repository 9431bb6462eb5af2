//! Shared fixtures for the benchmarks.

use lasso_tradeoff::lasso_sim::{gen_instance_with, CoefficientLayout, DesignInstance, GenOptions};
use lasso_tradeoff::Prior;

/// Exact-layout instance with `round(0.1·p)` signals of size 8.
pub fn sparse_instance(n: usize, p: usize, sigma: f64, seed: u64) -> DesignInstance {
    let prior = Prior::two_point(0.1, 8.0).expect("valid prior");
    let opts = GenOptions {
        layout: CoefficientLayout::Exact,
        ..GenOptions::default()
    };
    gen_instance_with(n, p, &prior, sigma, seed, &opts).expect("fixture fits the cell cap")
}

/// The two-point prior used by the state-evolution benchmarks.
pub fn fifty_prior() -> Prior {
    Prior::two_point(0.2, 50.0).expect("valid prior")
}
