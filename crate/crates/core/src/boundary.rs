//! The Lasso TPP–FDP trade-off boundary and its phase-transition quantities.
//!
//! For a problem shape `(δ, ε)` this module computes
//!
//! * `α₀(δ)`, the smallest admissible threshold-to-noise ratio;
//! * the Donoho–Tanner sparsity `ε*(δ)` from its parametric form;
//! * the power ceiling `u*(δ, ε)`;
//! * `t*(u)` and the boundary `q*(u)`.
//!
//! `t*(u)` is found through the one-parameter family
//! `2(1 − εζ)[(1+t²)Φ(−t) − tφ(t)] + εζ(1+t²) = δ`: for each `ζ` the larger
//! positive root `t(ζ)` is isolated using convexity of the left side in `t`,
//! and `ζ` is then bisected so that `h(ζ) = 2(1−ζ)Φ(−t(ζ)) + ζ` hits `u`.

use crate::error::{domain, Error, Result};
use crate::gauss::{cdf, pdf};
use crate::roots::{bisect, grow_until};

/// Limiting sampling ratio `δ = n/p` and sparsity `ε = P(Π ≠ 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemShape {
    delta: f64,
    epsilon: f64,
}

impl ProblemShape {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return domain(format!("delta must be positive and finite, got {delta}"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
        }
        Ok(Self { delta, epsilon })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha0(&self) -> f64 {
        alpha0(self.delta).expect("validated delta")
    }

    pub fn u_star(&self) -> f64 {
        u_star(*self)
    }

    /// Below the phase transition full power is reachable.
    pub fn full_power_reachable(&self) -> bool {
        self.u_star() >= 1.0
    }
}

/// A point `(δ, ε*(δ))` of the phase-transition curve with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub delta: f64,
    pub eps_star: f64,
    pub t_param: f64,
}

/// `(u, t*(u), q*(u))` on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub u: f64,
    pub t_star: f64,
    pub q_star: f64,
}

/// `(1+t²)Φ(−t) − tφ(t)`, i.e. half the soft-thresholding risk at zero.
#[inline]
fn half_null_risk(t: f64) -> f64 {
    (1.0 + t * t) * cdf(-t) - t * pdf(t)
}

/// `2Φ(t) − 1` without cancellation near zero.
#[inline]
fn central_mass(t: f64) -> f64 {
    libm::erf(t * std::f64::consts::FRAC_1_SQRT_2)
}

/// Root of `(1+t²)Φ(−t) − tφ(t) = δ/2`, clamped at zero when `δ ≥ 1`.
pub fn alpha0(delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return domain(format!("delta must be positive and finite, got {delta}"));
    }
    if delta >= 1.0 {
        return Ok(0.0);
    }
    // LHS is 1/2 at t = 0 and decreases to 0.
    let f = |t: f64| half_null_risk(t) - 0.5 * delta;
    let hi = grow_until(1.0, |t| f(t) < 0.0).expect("LHS vanishes at infinity");
    Ok(bisect(f, 0.0, hi, 0.0))
}

fn phase_delta(t: f64) -> f64 {
    let two_phi = 2.0 * pdf(t);
    two_phi / (two_phi + t * central_mass(t))
}

/// Phase-transition point for `δ ∈ (0, 1)`, obtained by inverting
/// `t ↦ δ(t) = 2φ(t) / (2φ(t) + t(2Φ(t) − 1))`.
pub fn phase_point(delta: f64) -> Result<PhasePoint> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("phase transition needs delta in (0, 1), got {delta}"));
    }
    // δ(t) falls from 1 at t = 0 towards 0.
    let f = |t: f64| phase_delta(t) - delta;
    let hi = grow_until(1.0, |t| f(t) < 0.0).expect("delta(t) vanishes at infinity");
    let t = bisect(f, 0.0, hi, 0.0);
    let two_phi = 2.0 * pdf(t);
    let eps_star = (two_phi - 2.0 * t * cdf(-t)) / (two_phi + t * central_mass(t));
    Ok(PhasePoint {
        delta,
        eps_star,
        t_param: t,
    })
}

/// Donoho–Tanner sparsity `ε*(δ)` for `δ ∈ (0, 1)`.
pub fn epsilon_star(delta: f64) -> Result<f64> {
    phase_point(delta).map(|p| p.eps_star)
}

/// Supremum of the asymptotic TPP over all priors and all λ.
pub fn u_star(shape: ProblemShape) -> f64 {
    let ProblemShape { delta, epsilon } = shape;
    if delta >= 1.0 {
        return 1.0;
    }
    let es = epsilon_star(delta).expect("delta in (0, 1)");
    if epsilon <= es {
        1.0
    } else {
        1.0 - (1.0 - delta) * (epsilon - es) / (epsilon * (1.0 - es))
    }
}

/// `2(1−e)[(1+t²)Φ(−t) − tφ(t)] + e(1+t²) − δ`; convex in `t`, equal to
/// `1 − δ` at zero, with negative slope there.
#[inline]
fn sandwich(t: f64, e: f64, delta: f64) -> f64 {
    2.0 * (1.0 - e) * half_null_risk(t) + e * (1.0 + t * t) - delta
}

#[inline]
fn sandwich_slope(t: f64, e: f64) -> f64 {
    2.0 * t * (2.0 * (1.0 - e) * cdf(-t) + e) - 4.0 * (1.0 - e) * pdf(t)
}

/// Larger positive root of `sandwich(·, e, δ)` for `e ∈ (0, 1)`, or `None`
/// when the convex curve stays above zero.
pub(crate) fn larger_root(e: f64, delta: f64) -> Option<f64> {
    debug_assert!(e > 0.0 && e < 1.0);
    let t_min = {
        let hi = grow_until(1.0, |t| sandwich_slope(t, e) > 0.0)?;
        bisect(|t| sandwich_slope(t, e), 0.0, hi, 0.0)
    };
    if sandwich(t_min, e, delta) > 0.0 {
        return None;
    }
    let hi = grow_until(t_min.max(0.5) * 2.0, |t| sandwich(t, e, delta) > 0.0)?;
    Some(bisect(|t| sandwich(t, e, delta), t_min, hi, 0.0))
}

fn zeta_cap(shape: ProblemShape) -> f64 {
    if shape.delta < 1.0 {
        let es = epsilon_star(shape.delta).expect("delta in (0, 1)");
        (es / shape.epsilon).min(1.0)
    } else {
        1.0
    }
}

/// `(t(ζ), h(ζ))`, or `None` above the feasible range of `ζ`.
fn power_of_zeta(zeta: f64, shape: ProblemShape) -> Option<(f64, f64)> {
    let t = larger_root(shape.epsilon * zeta, shape.delta)?;
    Some((t, 2.0 * (1.0 - zeta) * cdf(-t) + zeta))
}

fn check_u(u: f64, shape: ProblemShape) -> Result<()> {
    if !(u >= 0.0) {
        return domain(format!("target TPP must be non-negative, got {u}"));
    }
    let us = shape.u_star();
    if u >= us {
        return Err(Error::OutOfDomain { u, u_star: us });
    }
    Ok(())
}

/// `t*(u)`: the root in `(α₀, ∞)` of the boundary equation. `t*(0) = +∞`.
pub fn t_star(u: f64, shape: ProblemShape) -> Result<f64> {
    check_u(u, shape)?;
    if u == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0;
    let mut hi = zeta_cap(shape);
    let mut best: Option<f64> = None;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match power_of_zeta(mid, shape) {
            None => hi = mid,
            Some((t, h)) => {
                best = Some(t);
                if (h - u).abs() <= 1e-14 {
                    break;
                }
                if h < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    best.ok_or(Error::Convergence {
        what: "t* zeta bisection",
        iterations: 400,
        last: lo,
    })
}

/// Left minus right side of the boundary equation
/// `[2(1−ε)A(t) + ε(1+t²) − δ] / (ε[(1+t²)(1−2Φ(−t)) + 2tφ(t)]) = (1 − u)/(1 − 2Φ(−t))`
/// with `A(t) = (1+t²)Φ(−t) − tφ(t)`.
pub fn boundary_equation_residual(t: f64, u: f64, shape: ProblemShape) -> f64 {
    let ProblemShape { delta, epsilon } = shape;
    let c = central_mass(t);
    let lhs = sandwich(t, epsilon, delta) / (epsilon * ((1.0 + t * t) * c + 2.0 * t * pdf(t)));
    lhs - (1.0 - u) / c
}

fn fdp_from(t: f64, u: f64, epsilon: f64) -> f64 {
    let false_rate = 2.0 * (1.0 - epsilon) * cdf(-t);
    if false_rate == 0.0 {
        return 0.0;
    }
    false_rate / (false_rate + epsilon * u)
}

/// The boundary `q*(u; δ, ε)`, with `q*(0) = 0`.
pub fn q_star(u: f64, shape: ProblemShape) -> Result<f64> {
    let t = t_star(u, shape)?;
    Ok(fdp_from(t, u, shape.epsilon))
}

/// Limit of the boundary as `u ↑ u*`.
pub fn boundary_endpoint(shape: ProblemShape) -> BoundarySample {
    let ProblemShape { delta, epsilon } = shape;
    let u = shape.u_star();
    let t = if delta < 1.0 && u < 1.0 {
        // Above the transition the limiting root is the tangency point at ε*.
        phase_point(delta).expect("delta in (0, 1)").t_param
    } else {
        larger_root(epsilon, delta).expect("root exists below the transition")
    };
    BoundarySample {
        u,
        t_star: t,
        q_star: fdp_from(t, u, epsilon),
    }
}

/// Samples the boundary on `n_points` equally spaced TPP values from 0 up to
/// (but excluding) `u*`; the last point sits at `u*(1 − 10⁻⁵)`.
pub fn sample_boundary(shape: ProblemShape, n_points: usize) -> Result<Vec<BoundarySample>> {
    if n_points < 2 {
        return domain(format!("need at least two boundary points, got {n_points}"));
    }
    let us = shape.u_star();
    let last = n_points - 1;
    (0..n_points)
        .map(|i| {
            let u = if i == last {
                us * (1.0 - 1e-5)
            } else {
                us * i as f64 / last as f64
            };
            let t = t_star(u, shape)?;
            Ok(BoundarySample {
                u,
                t_star: t,
                q_star: fdp_from(t, u, shape.epsilon),
            })
        })
        .collect()
}
