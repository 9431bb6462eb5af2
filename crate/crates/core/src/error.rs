use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("u = {u} lies outside the achievable TPP range [0, {u_star})")]
    OutOfDomain { u: f64, u_star: f64 },

    #[error("{what} did not converge after {iterations} iterations (last iterate {last:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        last: f64,
    },

    #[error("lambda = {target} is outside the achievable interval [{lo}, {hi}]")]
    LambdaOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("lambda = {target} has {} admissible alpha roots: {alphas:?}", alphas.len())]
    MultipleRoots { target: f64, alphas: Vec<f64> },

    #[error("design of {cells} cells exceeds the memory cap of {cap} cells")]
    Resource { cells: usize, cap: usize },

    #[error("linear algebra error: {0}")]
    Singular(String),

    #[error("p = {p} exceeds the exhaustive-search cap of {max_p} variables")]
    TooLarge { p: usize, max_p: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
