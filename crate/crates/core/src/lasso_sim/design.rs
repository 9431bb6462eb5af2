//! Synthetic instances `y = Xβ + z` with an iid `N(0, 1/n)` design.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::state_evolution::Prior;

/// Identity of the generator used for every draw; echoed in output headers.
pub const RNG_NAME: &str = "ChaCha8";

/// Default limit on `n·p` (8 bytes per cell, so 400 MB).
pub const DEFAULT_MAX_CELLS: usize = 50_000_000;

const STREAM_DESIGN: u64 = 0;
const STREAM_COEF: u64 = 1;
const STREAM_NOISE: u64 = 2;

/// How coefficients are drawn from the prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientLayout {
    /// `β_j` iid from the prior.
    #[default]
    Iid,
    /// `round(mass·p)` copies of each nonzero atom on the leading indices,
    /// zeros elsewhere. Fixes `k` across replicates.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub layout: CoefficientLayout,
    pub max_cells: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            layout: CoefficientLayout::Iid,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

/// One regression instance. `X` is stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInstance {
    n: usize,
    p: usize,
    x: Vec<f64>,
    col_sq: Vec<f64>,
    beta: Vec<f64>,
    z: Vec<f64>,
    y: Vec<f64>,
    sigma: f64,
    seed: u64,
}

impl DesignInstance {
    /// Builds an instance from explicit parts; `y = Xβ + z`.
    pub fn from_parts(n: usize, p: usize, x: Vec<f64>, beta: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return domain(format!("need n, p >= 1, got n = {n}, p = {p}"));
        }
        if x.len() != n * p || beta.len() != p || z.len() != n {
            return domain("design, coefficient and noise dimensions disagree");
        }
        if x.iter().chain(&beta).chain(&z).any(|v| !v.is_finite()) {
            return domain("instance contains non-finite entries");
        }
        let mut y = z.clone();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                for (yi, xi) in y.iter_mut().zip(&x[j * n..(j + 1) * n]) {
                    *yi += xi * b;
                }
            }
        }
        let col_sq = x.chunks_exact(n).map(|c| c.iter().map(|v| v * v).sum()).collect();
        Ok(Self {
            n,
            p,
            x,
            col_sq,
            beta,
            z,
            y,
            sigma: 0.0,
            seed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn column(&self, j: usize) -> &[f64] {
        &self.x[j * self.n..(j + 1) * self.n]
    }
    pub(crate) fn col_sq(&self, j: usize) -> f64 {
        self.col_sq[j]
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn noise(&self) -> &[f64] {
        &self.z
    }
    pub fn y(&self) -> &[f64] {
        &self.y
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    /// Number of true signals `k = #{j : β_j ≠ 0}`.
    pub fn k(&self) -> usize {
        self.beta.iter().filter(|b| **b != 0.0).count()
    }
    pub fn is_signal(&self, j: usize) -> bool {
        self.beta[j] != 0.0
    }

    /// `X_jᵀ v`.
    pub fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        self.column(j).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `λ_max = ‖Xᵀy‖_∞`, the smallest λ with an all-zero Lasso solution.
    pub fn lambda_max(&self) -> f64 {
        (0..self.p).map(|j| self.col_dot(j, &self.y).abs()).fold(0.0, f64::max)
    }
}

/// Draws an instance with iid coefficients and the default memory cap.
pub fn gen_instance(n: usize, p: usize, prior: &Prior, sigma: f64, seed: u64) -> Result<DesignInstance> {
    gen_instance_with(n, p, prior, sigma, seed, &GenOptions::default())
}

/// Draws `X`, `β` and `z` from three independent streams of one seeded
/// generator, so instances differing only in σ share `X` and `β`.
pub fn gen_instance_with(
    n: usize,
    p: usize,
    prior: &Prior,
    sigma: f64,
    seed: u64,
    opts: &GenOptions,
) -> Result<DesignInstance> {
    if n == 0 || p == 0 {
        return domain(format!("need n, p >= 1, got n = {n}, p = {p}"));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return domain(format!("sigma must be non-negative, got {sigma}"));
    }
    let cells = n.saturating_mul(p);
    if cells > opts.max_cells {
        return Err(Error::Resource {
            cells,
            cap: opts.max_cells,
        });
    }

    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = stream(seed, STREAM_DESIGN);
    let x: Vec<f64> = (0..cells)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let beta = match opts.layout {
        CoefficientLayout::Iid => {
            let mut rng = stream(seed, STREAM_COEF);
            let atoms = prior.atoms();
            (0..p)
                .map(|_| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    for a in atoms {
                        acc += a.mass;
                        if u < acc {
                            return a.value;
                        }
                    }
                    atoms[atoms.len() - 1].value
                })
                .collect()
        }
        CoefficientLayout::Exact => {
            let mut beta = vec![0.0; p];
            let mut next = 0;
            for a in prior.nonzero() {
                let count = (a.mass * p as f64).round() as usize;
                for b in beta.iter_mut().skip(next).take(count) {
                    *b = a.value;
                }
                next = (next + count).min(p);
            }
            beta
        }
    };

    let mut rng = stream(seed, STREAM_NOISE);
    let z: Vec<f64> = (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();

    let mut inst = DesignInstance::from_parts(n, p, x, beta, z)?;
    inst.sigma = sigma;
    inst.seed = seed;
    Ok(inst)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
