//! Scalar Gaussian primitives and the closed-form soft-thresholding risk.
//!
//! Everything downstream (boundary curve, state evolution) is assembled from
//! the handful of functions in this module. The checked entry points return
//! [`Result`]; the crate-internal `pdf`/`cdf` skip validation for hot loops.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{domain, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x) through erfc, so the lower tail keeps full relative precision.
#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density φ(x).
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("normal density needs a finite argument, got {x}"));
    }
    Ok(pdf(x))
}

/// Standard normal distribution function Φ(x). `±∞` map to 1 and 0.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        return domain("normal cdf of NaN");
    }
    Ok(cdf(x))
}

/// Soft thresholding `sgn(x)·max(|x| − t, 0)`.
pub fn soft_threshold(x: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("threshold must be non-negative, got {t}"));
    }
    Ok(shrink(x, t))
}

#[inline]
pub(crate) fn shrink(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// P(|μ + W| > α) for standard normal W.
pub fn excess_tail(mu: f64, alpha: f64) -> f64 {
    cdf(mu - alpha) + cdf(-mu - alpha)
}

/// E(η_α(μ + W) − μ)², the risk of soft thresholding a unit-variance
/// observation of μ at level α.
///
/// Splitting on the three branches of η_α (with μ ≥ 0 by symmetry):
///
/// ```text
/// W > α − μ     : error W − α   →  (1+α²)Φ(μ−α) − (α+μ)φ(α−μ)
/// W < −α − μ    : error W + α   →  (1+α²)Φ(−α−μ) + (μ−α)φ(α+μ)
/// otherwise     : error −μ      →  μ²[Φ(α−μ) − Φ(−α−μ)]
/// ```
pub fn soft_mse(mu: f64, alpha: f64) -> f64 {
    let mu = mu.abs();
    let a2 = 1.0 + alpha * alpha;
    let upper = a2 * cdf(mu - alpha) - (alpha + mu) * pdf(alpha - mu);
    let lower = a2 * cdf(-alpha - mu) + (mu - alpha) * pdf(alpha + mu);
    let middle = mu * mu * (cdf(alpha - mu) - cdf(-alpha - mu));
    (upper + lower + middle).max(0.0)
}

/// E η_α(W)², the soft-thresholding risk at a zero coefficient.
#[inline]
pub(crate) fn null_risk(alpha: f64) -> f64 {
    2.0 * (1.0 + alpha * alpha) * cdf(-alpha) - 2.0 * alpha * pdf(alpha)
}

/// One point on the parametric curve `(P(|t+W|>α), E(η_α(t+W) − t)²)`,
/// which is strictly concave when read as y against x.
pub fn detection_risk_curve(alpha: f64, t: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return domain(format!("alpha must be positive and finite, got {alpha}"));
    }
    if !(t >= 0.0) {
        return domain(format!("curve parameter must be non-negative, got {t}"));
    }
    Ok((excess_tail(t, alpha), soft_mse(t, alpha)))
}

/// A non-empty, strictly increasing list of finite abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid(Vec<f64>);

impl ScalarGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return domain("grid must not be empty");
        }
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return domain(format!("grid contains a non-finite point {bad}"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return domain("grid must be strictly increasing");
        }
        Ok(Self(points))
    }

    /// `count` equally spaced points from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 1 {
            return Self::new(vec![lo]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        Self::new((0..count).map(|i| lo + step * i as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
