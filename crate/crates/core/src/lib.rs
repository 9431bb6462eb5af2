//! Lasso TPP–FDP trade-off: the asymptotic boundary curve, AMP state
//! evolution for discrete priors, and a seeded Lasso-path simulator with an
//! exhaustive ℓ0 baseline to check the predictions against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod error;
pub mod gauss;
pub mod l0_search;
pub mod lasso_sim;
pub mod output;
mod prior;
mod roots;
pub mod state_evolution;

pub use boundary::{BoundarySample, PhasePoint, ProblemShape};
pub use error::{Error, Result};
pub use gauss::ScalarGrid;
pub use state_evolution::{Atom, Prior, SeInput, SeOperatingPoint, SweepPoint};
