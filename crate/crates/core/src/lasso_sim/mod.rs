//! Seeded Lasso experiments: instance generation, coordinate-descent paths,
//! FDP/TPP traces and path events, and two baseline orderings.

pub mod design;
pub mod events;
pub mod grid;
pub mod ordering;
pub mod path;
pub mod solver;

pub use design::{
    gen_instance, gen_instance_with, CoefficientLayout, DesignInstance, GenOptions, DEFAULT_MAX_CELLS, RNG_NAME,
};
pub use events::{empirical_vs_se, fdp_at_tpp, path_events, PathEvents};
pub use grid::{GridBound, LambdaGrid};
pub use ordering::{least_squares, ls_ordering, marginal_ordering};
pub use path::{lasso_path, lasso_path_with, Entry, PathConfig, PathRecord, PathTrace, StopRule};
pub use solver::{kkt_violation, lasso_at, objective, LassoFit, SolverConfig};

use crate::error::Result;
use crate::state_evolution::Prior;

/// Everything needed to run one replicate besides its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    pub prior: Prior,
    pub sigma: f64,
    pub grid: LambdaGrid,
    pub gen: GenOptions,
    pub path: PathConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub seed: u64,
    pub k: usize,
    pub trace: PathTrace,
    pub events: PathEvents,
}

/// Draws the instance for `seed`, walks its path and extracts the events.
pub fn run_replicate(cfg: &SimConfig, seed: u64) -> Result<Replicate> {
    let inst = gen_instance_with(cfg.n, cfg.p, &cfg.prior, cfg.sigma, seed, &cfg.gen)?;
    let grid = cfg.grid.resolve(inst.lambda_max())?;
    let trace = lasso_path_with(&inst, &grid, &cfg.path)?;
    let events = path_events(&trace, inst.k())?;
    Ok(Replicate {
        seed,
        k: inst.k(),
        trace,
        events,
    })
}
