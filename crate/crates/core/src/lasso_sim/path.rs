//! Warm-started Lasso paths on a decreasing λ grid.

use crate::error::{domain, Result};

use super::design::DesignInstance;
use super::solver::{lasso_at, SolverConfig};

/// One grid point of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub lambda: f64,
    pub support_size: usize,
    /// False discoveries.
    pub v: usize,
    /// True discoveries.
    pub t: usize,
    pub tpp: f64,
    pub fdp: f64,
}

impl PathRecord {
    pub fn new(lambda: f64, v: usize, t: usize, k: usize) -> Self {
        let s = v + t;
        Self {
            lambda,
            support_size: s,
            v,
            t,
            tpp: t as f64 / k.max(1) as f64,
            fdp: v as f64 / s.max(1) as f64,
        }
    }
}

/// First appearance of a variable on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub index: usize,
    pub lambda: f64,
    pub signal: bool,
}

/// When a path walk ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// Solve every grid point.
    #[default]
    GridEnd,
    /// Stop after the first record with TPP = 1.
    FullPower,
    /// Stop once a null has entered and TPP = 1 has been reached.
    EventsResolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub solver: SolverConfig,
    /// Insert the geometric midpoint between grid points whose support sizes
    /// differ by more than this. `None` disables refinement.
    pub refine_jump: Option<usize>,
    /// Maximum number of successive halvings of one grid interval.
    pub max_refine_depth: usize,
    pub stop: StopRule,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            refine_jump: Some(5),
            max_refine_depth: 12,
            stop: StopRule::GridEnd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    /// Ordered by strictly decreasing λ.
    pub records: Vec<PathRecord>,
    /// Variables in order of first entry. `None` for traces read back from
    /// CSV, where only counts are known.
    pub entries: Option<Vec<Entry>>,
    /// Number of true signals.
    pub k: usize,
    /// Largest KKT violation over all solves.
    pub max_kkt_violation: f64,
}

impl PathTrace {
    pub fn entry_order(&self) -> Option<Vec<usize>> {
        self.entries.as_ref().map(|e| e.iter().map(|x| x.index).collect())
    }
}

/// Path with the default configuration.
pub fn lasso_path(inst: &DesignInstance, grid: &[f64]) -> Result<PathTrace> {
    lasso_path_with(inst, grid, &PathConfig::default())
}

/// Solves from the largest λ down, each solve warm-started from the previous
/// one. Variables entering at the same grid point are ordered by decreasing
/// `|β̂_j|`, then by index.
pub fn lasso_path_with(inst: &DesignInstance, grid: &[f64], cfg: &PathConfig) -> Result<PathTrace> {
    if grid.is_empty() {
        return domain("lambda grid is empty");
    }
    if grid.windows(2).any(|w| !(w[1] < w[0])) {
        return domain("lambda grid must be strictly decreasing");
    }
    let k = inst.k();
    let p = inst.p();
    // Stack of (λ, depth); the top is the next (largest) λ to solve.
    let mut pending: Vec<(f64, usize)> = grid.iter().rev().map(|&l| (l, 0)).collect();
    let mut warm = vec![0.0; p];
    let mut prev: Option<(f64, usize)> = None;
    let mut entered = vec![false; p];
    let mut entries = Vec::new();
    let mut records = Vec::new();
    let mut max_kkt: f64 = 0.0;
    let mut seen_false = false;

    while let Some((lambda, depth)) = pending.pop() {
        let fit = lasso_at(inst, lambda, Some(&warm), &cfg.solver)?;
        let support = fit.support();
        if let (Some(jump), Some((prev_lambda, prev_size))) = (cfg.refine_jump, prev) {
            if support.len().abs_diff(prev_size) > jump && depth < cfg.max_refine_depth {
                let mid = (prev_lambda * lambda).sqrt();
                if mid < prev_lambda && mid > lambda {
                    pending.push((lambda, depth + 1));
                    pending.push((mid, depth + 1));
                    continue;
                }
            }
        }
        max_kkt = max_kkt.max(fit.kkt_violation);

        let mut fresh: Vec<usize> = support.iter().copied().filter(|&j| !entered[j]).collect();
        fresh.sort_by(|&a, &b| fit.beta[b].abs().total_cmp(&fit.beta[a].abs()).then(a.cmp(&b)));
        for j in fresh {
            entered[j] = true;
            entries.push(Entry {
                index: j,
                lambda,
                signal: inst.is_signal(j),
            });
        }
        let t = support.iter().filter(|&&j| inst.is_signal(j)).count();
        let rec = PathRecord::new(lambda, support.len() - t, t, k);
        seen_false |= rec.v > 0;
        let full = k > 0 && rec.t == k;
        records.push(rec);
        prev = Some((lambda, support.len()));
        warm = fit.beta;

        let done = match cfg.stop {
            StopRule::GridEnd => false,
            StopRule::FullPower => full,
            StopRule::EventsResolved => seen_false && (full || k == 0),
        };
        if done {
            break;
        }
    }
    Ok(PathTrace {
        records,
        entries: Some(entries),
        k,
        max_kkt_violation: max_kkt,
    })
}
