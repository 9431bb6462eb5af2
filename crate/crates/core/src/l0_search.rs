//! Exhaustive ℓ0-penalised least squares at tiny `p`.
//!
//! Minimises `‖y − X_S β̂ᴸˢ_S‖² + λ|S|` over all subsets with
//! `|S| ≤ min(n, p)`. Subsets are visited depth-first in lexicographic order
//! while a Cholesky factor of `X_SᵀX_S` is extended one column at a time, so
//! each visit costs `O(|S|²)`: with `w = L⁻¹X_Sᵀy`, `RSS(S) = ‖y‖² − ‖w‖²`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::lasso_sim::DesignInstance;

/// Relative pivot below which a column is treated as linearly dependent.
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L0Config {
    pub lambda: f64,
    pub max_p: usize,
}

impl L0Config {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        Ok(Self { lambda, max_p: 20 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L0Result {
    pub support: Vec<usize>,
    pub objective: f64,
    pub fdp: f64,
    pub tpp: f64,
    /// Selected nulls.
    pub m0: usize,
    /// Selected signals.
    pub m1: usize,
    /// Subsets whose objective was evaluated.
    pub evaluated: u64,
    /// Subsets skipped because `X_S` is rank deficient.
    pub skipped_singular: u64,
}

/// Candidate with the deterministic order (objective, size, lexicographic).
#[derive(Debug, Clone, PartialEq)]
struct Best {
    objective: f64,
    support: Vec<usize>,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        self.objective
            .total_cmp(&other.objective)
            .then(self.support.len().cmp(&other.support.len()))
            .then_with(|| self.support.cmp(&other.support))
            .is_lt()
    }
}

struct Search<'a> {
    gram: &'a [Vec<f64>],
    xty: &'a [f64],
    yy: f64,
    lambda: f64,
    p: usize,
    max_size: usize,
    /// Row-major lower-triangular factor; row `i` has `i + 1` entries.
    chol: Vec<Vec<f64>>,
    w: Vec<f64>,
    support: Vec<usize>,
    best: Best,
    evaluated: u64,
    skipped: u64,
}

impl Search<'_> {
    /// Appends column `j` to the factor; `false` if it is dependent on the current set.
    fn push(&mut self, j: usize) -> bool {
        let s = self.support.len();
        let mut row = Vec::with_capacity(s + 1);
        for i in 0..s {
            let mut v = self.gram[self.support[i]][j];
            for (a, b) in self.chol[i].iter().zip(&row).take(i) {
                v -= a * b;
            }
            row.push(v / self.chol[i][i]);
        }
        let d2 = self.gram[j][j] - row.iter().map(|v| v * v).sum::<f64>();
        if !(d2 > PIVOT_TOL * self.gram[j][j].max(f64::MIN_POSITIVE)) {
            return false;
        }
        let d = d2.sqrt();
        let wv = (self.xty[j] - row.iter().zip(&self.w).map(|(a, b)| a * b).sum::<f64>()) / d;
        row.push(d);
        self.chol.push(row);
        self.w.push(wv);
        self.support.push(j);
        true
    }

    fn pop(&mut self) {
        self.chol.pop();
        self.w.pop();
        self.support.pop();
    }

    fn visit(&mut self) {
        self.evaluated += 1;
        let w_sq: f64 = self.w.iter().map(|v| v * v).sum();
        let rss = (self.yy - w_sq).max(0.0);
        let cand = Best {
            objective: rss + self.lambda * self.support.len() as f64,
            support: self.support.clone(),
        };
        if cand.better_than(&self.best) {
            self.best = cand;
        }
    }

    fn descend(&mut self, start: usize) {
        if self.support.len() == self.max_size {
            return;
        }
        for j in start..self.p {
            if self.push(j) {
                self.visit();
                self.descend(j + 1);
                self.pop();
            } else {
                // Every superset drawn from the remaining columns is singular too.
                let room = self.max_size - self.support.len();
                let rest = (self.p - j - 1) as u64;
                self.skipped += (0..room as u64).map(|m| binomial(rest, m)).sum::<u64>();
            }
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Global minimiser over all admissible subsets. Work is split by the
/// smallest selected index and the partial optima are merged with the
/// deterministic tie-break.
pub fn best_subset(inst: &DesignInstance, cfg: &L0Config) -> Result<L0Result> {
    let p = inst.p();
    if p > cfg.max_p {
        return Err(Error::TooLarge { p, max_p: cfg.max_p });
    }
    if !(cfg.lambda > 0.0) || !cfg.lambda.is_finite() {
        return domain(format!("lambda must be positive, got {}", cfg.lambda));
    }
    let gram: Vec<Vec<f64>> = (0..p)
        .map(|a| (0..p).map(|b| inst.col_dot(a, inst.column(b))).collect())
        .collect();
    let xty: Vec<f64> = (0..p).map(|j| inst.col_dot(j, inst.y())).collect();
    let yy: f64 = inst.y().iter().map(|v| v * v).sum();
    let max_size = inst.n().min(p);
    let empty = Best {
        objective: yy,
        support: Vec::new(),
    };

    let parts: Vec<(Best, u64, u64)> = (0..p)
        .into_par_iter()
        .map(|first| {
            let mut s = Search {
                gram: &gram,
                xty: &xty,
                yy,
                lambda: cfg.lambda,
                p,
                max_size,
                chol: Vec::new(),
                w: Vec::new(),
                support: Vec::new(),
                best: empty.clone(),
                evaluated: 0,
                skipped: 0,
            };
            if s.push(first) {
                s.visit();
                s.descend(first + 1);
            } else {
                let rest = (p - first - 1) as u64;
                s.skipped += (0..max_size as u64).map(|m| binomial(rest, m)).sum::<u64>();
            }
            (s.best, s.evaluated, s.skipped)
        })
        .collect();

    let mut best = empty;
    let (mut evaluated, mut skipped) = (1u64, 0u64);
    for (b, e, s) in parts {
        if b.better_than(&best) {
            best = b;
        }
        evaluated += e;
        skipped += s;
    }
    let m1 = best.support.iter().filter(|&&j| inst.is_signal(j)).count();
    let m0 = best.support.len() - m1;
    let k = inst.k();
    Ok(L0Result {
        fdp: m0 as f64 / best.support.len().max(1) as f64,
        tpp: m1 as f64 / k.max(1) as f64,
        support: best.support,
        objective: best.objective,
        m0,
        m1,
        evaluated,
        skipped_singular: skipped,
    })
}

/// `‖y − X_S β̂ᴸˢ_S‖² + λ|S|` for one subset, by QR.
pub fn subset_objective(inst: &DesignInstance, support: &[usize], lambda: f64) -> Result<f64> {
    use crate::lasso_sim::least_squares;
    let (_, coef) = least_squares(inst, Some(support))?;
    let mut r = inst.y().to_vec();
    for (&j, b) in support.iter().zip(&coef) {
        for (ri, xi) in r.iter_mut().zip(inst.column(j)) {
            *ri -= xi * b;
        }
    }
    Ok(r.iter().map(|v| v * v).sum::<f64>() + lambda * support.len() as f64)
}

/// `λ = 2·max(2σ², σ²δ/(cε))`, twice the larger of the two lower bounds on
/// λ under which the ℓ0 estimator separates strong signals from nulls.
pub fn l0_auto_lambda(sigma: f64, delta: f64, epsilon: f64, c: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return domain(format!("sigma must be positive, got {sigma}"));
    }
    if !(delta > 0.0) || !(epsilon > 0.0) {
        return domain("delta and epsilon must be positive");
    }
    if epsilon >= delta {
        return domain(format!(
            "need epsilon < delta, got epsilon = {epsilon}, delta = {delta}"
        ));
    }
    if !(c > 0.0 && c < 1.0) {
        return domain(format!("c must lie in (0, 1), got {c}"));
    }
    let s2 = sigma * sigma;
    Ok(2.0 * (2.0 * s2).max(s2 * delta / (c * epsilon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso_sim::{gen_instance, gen_instance_with, CoefficientLayout, GenOptions};
    use crate::state_evolution::Prior;
    use proptest::prelude::*;

    fn brute(inst: &DesignInstance, lambda: f64) -> (f64, Vec<usize>) {
        let p = inst.p();
        let mut best = (inst.y().iter().map(|v| v * v).sum::<f64>(), Vec::new());
        for mask in 1u32..(1 << p) {
            let s: Vec<usize> = (0..p).filter(|j| mask & (1 << j) != 0).collect();
            if s.len() > inst.n() {
                continue;
            }
            if let Ok(obj) = subset_objective(inst, &s, lambda) {
                if obj < best.0 - 1e-9 {
                    best = (obj, s);
                }
            }
        }
        best
    }

    #[test]
    fn lambda_formula() {
        assert!((l0_auto_lambda(1.0, 1.0, 0.25, 0.5).unwrap() - 16.0).abs() < 1e-12);
        let l = l0_auto_lambda(0.1, 20.0 / 12.0, 0.25, 0.5).unwrap();
        assert!((l - 2.0 * 0.01 * (20.0 / 12.0) / 0.125).abs() < 1e-12);
        assert!((l - 0.2667).abs() < 1e-3);
        let a = l0_auto_lambda(0.3, 1.0, 0.2, 0.5).unwrap();
        let b = l0_auto_lambda(0.6, 1.0, 0.2, 0.5).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-12);
        assert!(l0_auto_lambda(1.0, 0.2, 0.25, 0.5).is_err());
        assert!(l0_auto_lambda(1.0, 1.0, 0.25, 1.0).is_err());
        assert!(l0_auto_lambda(0.0, 1.0, 0.25, 0.5).is_err());
    }

    #[test]
    fn matches_brute_force() {
        let prior = Prior::two_point(0.3, 2.0).unwrap();
        for seed in 0..6 {
            let inst = gen_instance(8, 7, &prior, 0.5, seed).unwrap();
            for lambda in [0.05, 0.5, 2.0] {
                let got = best_subset(&inst, &L0Config::new(lambda).unwrap()).unwrap();
                let (obj, s) = brute(&inst, lambda);
                assert!((got.objective - obj).abs() < 1e-9 * obj.max(1.0), "{got:?} vs {obj}");
                assert_eq!(got.support, s);
            }
        }
    }

    #[test]
    fn enumeration_count() {
        let prior = Prior::two_point(0.3, 2.0).unwrap();
        let inst = gen_instance(5, 9, &prior, 0.5, 1).unwrap();
        let r = best_subset(&inst, &L0Config::new(1.0).unwrap()).unwrap();
        let total: u64 = (0..=5).map(|s| binomial(9, s)).sum();
        assert_eq!(r.evaluated + r.skipped_singular, total);
        assert_eq!(r.m0 + r.m1, r.support.len());
    }

    #[test]
    fn singular_subsets_are_skipped_and_counted() {
        // Columns 0 and 1 are identical.
        let x = vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let inst = DesignInstance::from_parts(3, 3, x, vec![0.0; 3], vec![1.0, 1.0, 0.5]).unwrap();
        let r = best_subset(&inst, &L0Config::new(0.1).unwrap()).unwrap();
        // {0,1} and {0,1,2} are singular.
        assert_eq!(r.skipped_singular, 2);
        assert_eq!(r.evaluated, 6);
        assert_eq!(r.support, vec![0, 2]);
    }

    #[test]
    fn huge_lambda_and_cap() {
        let prior = Prior::two_point(0.3, 2.0).unwrap();
        let inst = gen_instance(10, 6, &prior, 0.5, 3).unwrap();
        let yy: f64 = inst.y().iter().map(|v| v * v).sum();
        let r = best_subset(&inst, &L0Config::new(yy * 1.01).unwrap()).unwrap();
        assert!(r.support.is_empty());
        assert_eq!(r.tpp, 0.0);
        let wide = gen_instance(5, 21, &prior, 0.5, 3).unwrap();
        assert!(matches!(
            best_subset(&wide, &L0Config::new(1.0).unwrap()),
            Err(Error::TooLarge { p: 21, max_p: 20 })
        ));
        assert!(L0Config::new(0.0).is_err());
    }

    #[test]
    fn orthonormal_is_hard_thresholding() {
        let n = 5;
        let mut x = vec![0.0; n * 4];
        for j in 0..4 {
            x[j * n + j] = 1.0;
        }
        let inst =
            DesignInstance::from_parts(n, 4, x, vec![3.0, 0.0, -1.2, 0.0], vec![0.1, 0.5, 0.3, -0.2, 2.0]).unwrap();
        let lambda = 1.0;
        let r = best_subset(&inst, &L0Config::new(lambda).unwrap()).unwrap();
        let want: Vec<usize> = (0..4).filter(|&j| inst.col_dot(j, inst.y()).powi(2) > lambda).collect();
        assert_eq!(r.support, want);
    }

    #[test]
    fn optimal_against_known_candidates() {
        let prior: Prior = "100:0.25".parse().unwrap();
        let opts = GenOptions {
            layout: CoefficientLayout::Exact,
            ..GenOptions::default()
        };
        let inst = gen_instance_with(20, 12, &prior, 0.1, 4, &opts).unwrap();
        let lambda = l0_auto_lambda(0.1, 20.0 / 12.0, 0.25, 0.5).unwrap();
        let r = best_subset(&inst, &L0Config::new(lambda).unwrap()).unwrap();
        let truth: Vec<usize> = (0..12).filter(|&j| inst.is_signal(j)).collect();
        assert!(r.objective <= subset_objective(&inst, &truth, lambda).unwrap() + 1e-9);
        assert!(r.objective <= inst.y().iter().map(|v| v * v).sum::<f64>());
        assert_eq!(r.support, truth);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn objective_is_consistent(seed in 0u64..1000, lambda in 0.01..5.0f64) {
            let prior = Prior::two_point(0.3, 1.5).unwrap();
            let inst = gen_instance(9, 8, &prior, 0.7, seed).unwrap();
            let r = best_subset(&inst, &L0Config::new(lambda).unwrap()).unwrap();
            let direct = if r.support.is_empty() {
                inst.y().iter().map(|v| v * v).sum::<f64>()
            } else {
                subset_objective(&inst, &r.support, lambda).unwrap()
            };
            prop_assert!((direct - r.objective).abs() < 1e-8 * direct.max(1.0));
        }
    }
}
