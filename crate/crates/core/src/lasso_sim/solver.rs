//! Cyclic coordinate descent for `½‖y − Xb‖² + λ‖b‖₁`.

use crate::error::{domain, Error, Result};
use crate::gauss::shrink;

use super::design::DesignInstance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative KKT tolerance, as a fraction of λ.
    pub kkt_tol: f64,
    /// Sweep stops once no coordinate moves more than this times `max(1, ‖y‖_∞)`.
    pub change_tol: f64,
    pub max_sweeps: usize,
    /// Record the objective after every sweep.
    pub trace_objective: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kkt_tol: 1e-6,
            change_tol: 1e-9,
            max_sweeps: 50_000,
            trace_objective: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub sweeps: usize,
    /// Largest relative KKT violation at the returned point.
    pub kkt_violation: f64,
    pub objective: f64,
    pub objective_trace: Vec<f64>,
}

impl LassoFit {
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }
}

pub fn objective(inst: &DesignInstance, beta: &[f64], lambda: f64) -> f64 {
    let r = residual(inst, beta);
    0.5 * r.iter().map(|v| v * v).sum::<f64>() + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

fn residual(inst: &DesignInstance, beta: &[f64]) -> Vec<f64> {
    let mut r = inst.y().to_vec();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (ri, xi) in r.iter_mut().zip(inst.column(j)) {
                *ri -= xi * b;
            }
        }
    }
    r
}

/// Largest violation of the subgradient conditions, relative to λ.
pub fn kkt_violation(inst: &DesignInstance, beta: &[f64], lambda: f64) -> f64 {
    let r = residual(inst, beta);
    kkt_from_residual(inst, beta, &r, lambda)
}

fn kkt_from_residual(inst: &DesignInstance, beta: &[f64], r: &[f64], lambda: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, &b) in beta.iter().enumerate() {
        let g = inst.col_dot(j, r);
        let v = if b == 0.0 {
            (g.abs() - lambda).max(0.0)
        } else {
            (g - lambda * b.signum()).abs()
        };
        worst = worst.max(v / lambda);
    }
    worst
}

struct State<'a> {
    inst: &'a DesignInstance,
    lambda: f64,
    beta: Vec<f64>,
    r: Vec<f64>,
}

impl State<'_> {
    fn update(&mut self, j: usize) -> f64 {
        let c = self.inst.col_sq(j);
        if c == 0.0 {
            return 0.0;
        }
        let old = self.beta[j];
        let rho = self.inst.col_dot(j, &self.r) + c * old;
        let new = shrink(rho, self.lambda) / c;
        let d = new - old;
        if d != 0.0 {
            self.beta[j] = new;
            for (ri, xi) in self.r.iter_mut().zip(self.inst.column(j)) {
                *ri -= xi * d;
            }
        }
        d.abs()
    }

    fn objective(&self) -> f64 {
        0.5 * self.r.iter().map(|v| v * v).sum::<f64>() + self.lambda * self.beta.iter().map(|b| b.abs()).sum::<f64>()
    }
}

/// Lasso solution at one λ, optionally warm-started.
///
/// Alternates full sweeps with sweeps over the current active set. A
/// solution is returned only when a full sweep moves nothing beyond the
/// change tolerance and the KKT certificate holds on a freshly computed
/// residual.
pub fn lasso_at(
    inst: &DesignInstance,
    lambda: f64,
    warm_start: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<LassoFit> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !(cfg.kkt_tol > 0.0) || !(cfg.change_tol > 0.0) {
        return domain("solver tolerances must be positive");
    }
    let p = inst.p();
    let beta = match warm_start {
        Some(w) if w.len() != p => return domain(format!("warm start has length {}, expected {p}", w.len())),
        Some(w) => w.to_vec(),
        None => vec![0.0; p],
    };
    let r = residual(inst, &beta);
    let mut st = State { inst, lambda, beta, r };
    let y_scale = inst.y().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut tol = cfg.change_tol * y_scale;
    let mut trace = Vec::new();
    if cfg.trace_objective {
        trace.push(st.objective());
    }
    let mut sweeps = 0;
    let mut kkt = f64::INFINITY;
    while sweeps < cfg.max_sweeps {
        let mut dmax: f64 = 0.0;
        for j in 0..p {
            dmax = dmax.max(st.update(j));
        }
        sweeps += 1;
        if cfg.trace_objective {
            trace.push(st.objective());
        }
        if dmax <= tol {
            st.r = residual(inst, &st.beta);
            kkt = kkt_from_residual(inst, &st.beta, &st.r, lambda);
            if kkt <= cfg.kkt_tol {
                let objective = st.objective();
                return Ok(LassoFit {
                    lambda,
                    beta: st.beta,
                    sweeps,
                    kkt_violation: kkt,
                    objective,
                    objective_trace: trace,
                });
            }
            tol *= 0.1;
            continue;
        }
        let active: Vec<usize> = (0..p).filter(|&j| st.beta[j] != 0.0).collect();
        while sweeps < cfg.max_sweeps {
            let mut d: f64 = 0.0;
            for &j in &active {
                d = d.max(st.update(j));
            }
            sweeps += 1;
            if cfg.trace_objective {
                trace.push(st.objective());
            }
            if d <= tol {
                break;
            }
        }
    }
    if kkt.is_infinite() {
        kkt = kkt_violation(inst, &st.beta, lambda);
    }
    Err(Error::Convergence {
        what: "lasso coordinate descent",
        iterations: sweeps,
        last: kkt,
    })
}
