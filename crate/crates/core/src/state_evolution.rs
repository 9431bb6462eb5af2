//! AMP state evolution for the Lasso with a discrete prior.
//!
//! At a fixed λ the Lasso behaves like soft thresholding of `β + τW` at level
//! `ατ`, where `(α, τ)` solve
//!
//! ```text
//! τ² = σ² + (1/δ) E(η_{ατ}(Π + τW) − Π)²
//! λ  = (1 − (1/δ) P(|Π + τW| > ατ)) ατ
//! ```
//!
//! Expectations over the prior are exact sums of the closed forms in
//! [`crate::gauss`]. For a fixed α the first line is a monotone fixed-point
//! problem in `τ²`; λ is then matched by bisection over α.

use rayon::prelude::*;

use crate::boundary::{alpha0, q_star, ProblemShape};
use crate::error::{domain, Error, Result};
use crate::gauss::{cdf, excess_tail, null_risk, soft_mse, ScalarGrid};
use crate::roots::{bisect, grow_until};

pub use crate::prior::{sharpness_prior, sharpness_prior_with_weak, Atom, Prior};

/// Largest α considered; Φ(−40) is far below double precision relative to 1.
pub const ALPHA_MAX: f64 = 40.0;
const ALPHA_FLOOR_OFFSET: f64 = 1e-8;
const TAU_MAX_ITER: usize = 100_000;
/// Plain fixed-point steps before switching to bracketing.
pub const TAU_FAST_ITER: usize = 2_000;
const TAU_REL_TOL: f64 = 1e-12;
const LAMBDA_REL_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 240;

#[derive(Debug, Clone, PartialEq)]
pub struct SeInput {
    pub prior: Prior,
    pub delta: f64,
    pub sigma: f64,
    pub lambda: f64,
}

/// Solved `(α, τ, λ)` and the asymptotic rates it predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeOperatingPoint {
    pub alpha: f64,
    pub tau: f64,
    pub lambda: f64,
    /// Limit of `V(λ)/p`.
    pub fd_inf: f64,
    /// Limit of `T(λ)/p`.
    pub td_inf: f64,
    pub fdp_inf: f64,
    pub tpp_inf: f64,
}

/// One entry of an α sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepPoint {
    Solved(SeOperatingPoint),
    Skipped { alpha: f64, reason: String },
}

impl SweepPoint {
    pub fn solved(&self) -> Option<&SeOperatingPoint> {
        match self {
            SweepPoint::Solved(p) => Some(p),
            SweepPoint::Skipped { .. } => None,
        }
    }
}

fn validate_common(prior: &Prior, delta: f64, sigma: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return domain(format!("delta must be positive, got {delta}"));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return domain(format!("sigma must be non-negative, got {sigma}"));
    }
    if prior.epsilon() <= 0.0 {
        return domain("prior has no nonzero atoms (epsilon = 0)");
    }
    Ok(())
}

fn alpha_floor(delta: f64) -> f64 {
    alpha0(delta).expect("validated delta").max(0.0)
}

/// `Σ mass · soft_mse(value/τ, α)`: the normalised risk `E(η_α(Π/τ + W) − Π/τ)²`.
fn scaled_risk(prior: &Prior, alpha: f64, tau: f64) -> f64 {
    prior
        .atoms()
        .iter()
        .map(|a| {
            let r = if a.value == 0.0 {
                null_risk(alpha)
            } else if tau == 0.0 {
                1.0 + alpha * alpha
            } else {
                soft_mse(a.value / tau, alpha)
            };
            a.mass * r
        })
        .sum()
}

/// Fixed point `τ` of `τ² = σ² + (τ²/δ)·Σ mass·soft_mse(value/τ, α)`.
///
/// Iterates from `τ₀² = σ² + E[Π²]/δ`. With `σ = 0` the iteration may
/// collapse towards the trivial fixed point; `τ = 0` is reported once the
/// iterate drops below `10⁻⁹·√(E[Π²]/δ)`.
///
/// Near the edge of the exact-recovery region the map has slope close to one
/// and plain iteration crawls. After [`TAU_FAST_ITER`] steps the solver
/// brackets the root of `F(x) − x` around the last iterate and bisects; the
/// map is concave with `F(0) = σ²`, so that root is unique on `x > 0`.
pub fn solve_tau(prior: &Prior, delta: f64, sigma: f64, alpha: f64) -> Result<f64> {
    validate_common(prior, delta, sigma)?;
    let floor = alpha_floor(delta);
    if !(alpha > floor) || !alpha.is_finite() {
        return domain(format!("alpha = {alpha} must exceed max(alpha0, 0) = {floor}"));
    }
    let s2 = sigma * sigma;
    let signal_scale = prior.second_moment() / delta;
    let collapse = 1e-18 * signal_scale;
    let map = |t2: f64| s2 + t2 / delta * scaled_risk(prior, alpha, t2.sqrt());
    let mut t2 = s2 + signal_scale;
    let mut iterations = 0;
    while iterations < TAU_FAST_ITER {
        iterations += 1;
        let next = map(t2);
        if sigma == 0.0 && next < collapse {
            return Ok(0.0);
        }
        if (next - t2).abs() <= TAU_REL_TOL * next {
            return Ok(next.sqrt());
        }
        t2 = next;
    }

    let gap = |x: f64| map(x) - x;
    let (mut lo, mut hi) = if gap(t2) > 0.0 {
        let mut hi = 2.0 * t2;
        while gap(hi) > 0.0 {
            iterations += 1;
            hi *= 2.0;
            if !hi.is_finite() || iterations >= TAU_MAX_ITER {
                return Err(Error::Convergence {
                    what: "tau fixed point",
                    iterations,
                    last: t2.sqrt(),
                });
            }
        }
        (t2, hi)
    } else {
        let mut lo = 0.5 * t2;
        while gap(lo) <= 0.0 {
            iterations += 1;
            if lo < collapse.max(1e-18 * s2) || iterations >= TAU_MAX_ITER {
                if sigma == 0.0 {
                    return Ok(0.0);
                }
                return Err(Error::Convergence {
                    what: "tau fixed point",
                    iterations,
                    last: lo.sqrt(),
                });
            }
            lo *= 0.5;
        }
        (lo, t2)
    };
    while hi - lo > 0.25 * TAU_REL_TOL * hi && iterations < TAU_MAX_ITER {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).sqrt())
}

/// Rates and λ implied by a solved `(α, τ)`.
pub fn operating_point(prior: &Prior, delta: f64, alpha: f64, tau: f64) -> SeOperatingPoint {
    let eps = prior.epsilon();
    let (fd, td, detect) = if tau == 0.0 {
        // Exact recovery: only true coefficients survive.
        (0.0, eps, eps)
    } else {
        let fd = 2.0 * (1.0 - eps) * cdf(-alpha);
        let td: f64 = prior
            .nonzero()
            .map(|a| a.mass * excess_tail(a.value / tau, alpha))
            .sum();
        (fd, td, fd + td)
    };
    let lambda = (1.0 - detect / delta) * alpha * tau;
    let fdp = if fd + td > 0.0 { fd / (fd + td) } else { 0.0 };
    SeOperatingPoint {
        alpha,
        tau,
        lambda,
        fd_inf: fd,
        td_inf: td,
        fdp_inf: fdp,
        tpp_inf: td / eps,
    }
}

fn lambda_at(prior: &Prior, delta: f64, sigma: f64, alpha: f64) -> Result<SeOperatingPoint> {
    let tau = solve_tau(prior, delta, sigma, alpha)?;
    Ok(operating_point(prior, delta, alpha, tau))
}

/// All α in `(max(α₀,0), 40]` whose λ(α) matches the target, found by a
/// coarse scan for sign changes followed by bisection in each bracket.
pub fn solve_lambda_roots(input: &SeInput) -> Result<Vec<SeOperatingPoint>> {
    let SeInput {
        prior,
        delta,
        sigma,
        lambda,
    } = input;
    let (delta, sigma, target) = (*delta, *sigma, *lambda);
    validate_common(prior, delta, sigma)?;
    if !(target > 0.0) || !target.is_finite() {
        return domain(format!("lambda must be positive, got {target}"));
    }
    let lo = alpha_floor(delta) + ALPHA_FLOOR_OFFSET;
    let span = ALPHA_MAX - lo;
    // Quadratic spacing concentrates points near the lower end, where λ(α) bends.
    let scan: Vec<(f64, SeOperatingPoint)> = (0..=SCAN_POINTS)
        .into_par_iter()
        .filter_map(|i| {
            let s = i as f64 / SCAN_POINTS as f64;
            let alpha = lo + span * s * s;
            lambda_at(prior, delta, sigma, alpha).ok().map(|p| (alpha, p))
        })
        .collect();
    if scan.is_empty() {
        return Err(Error::LambdaOutOfRange {
            target,
            lo: f64::NAN,
            hi: f64::NAN,
        });
    }
    let tol = LAMBDA_REL_TOL * target.max(1.0);
    let mut roots = Vec::new();
    for w in scan.windows(2) {
        let (a0, p0) = w[0];
        let (a1, p1) = w[1];
        let f0 = p0.lambda - target;
        let f1 = p1.lambda - target;
        if f0.abs() <= tol {
            roots.push(p0);
            continue;
        }
        if f0.signum() == f1.signum() || f1.abs() <= tol {
            continue;
        }
        roots.push(refine_root(prior, delta, sigma, target, tol, a0, a1, f0 < 0.0)?);
    }
    if let Some(&(_, last)) = scan.last() {
        if (last.lambda - target).abs() <= tol {
            roots.push(last);
        }
    }
    if roots.is_empty() {
        let lmin = scan.iter().map(|(_, p)| p.lambda).fold(f64::INFINITY, f64::min);
        let lmax = scan.iter().map(|(_, p)| p.lambda).fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::LambdaOutOfRange {
            target,
            lo: lmin.max(0.0),
            hi: lmax,
        });
    }
    Ok(roots)
}

#[allow(clippy::too_many_arguments)]
fn refine_root(
    prior: &Prior,
    delta: f64,
    sigma: f64,
    target: f64,
    tol: f64,
    mut lo: f64,
    mut hi: f64,
    increasing: bool,
) -> Result<SeOperatingPoint> {
    let mut best = lambda_at(prior, delta, sigma, 0.5 * (lo + hi))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = lambda_at(prior, delta, sigma, mid)?;
        best = p;
        let f = p.lambda - target;
        if f.abs() <= tol || mid <= lo || mid >= hi {
            break;
        }
        if (f < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Solves the state evolution at a prescribed λ.
///
/// With `σ = 0` the noiseless solution is the limit of noisy ones: the system
/// is solved on `σ_k = 2^{-k}` down to `10⁻⁶` and `(α, τ)` are Richardson
/// extrapolated in `σ²` from the last two rungs.
pub fn solve_lambda_point(input: &SeInput) -> Result<SeOperatingPoint> {
    if input.sigma == 0.0 {
        return solve_noiseless(input);
    }
    let roots = solve_lambda_roots(input)?;
    match roots.as_slice() {
        [only] => Ok(*only),
        _ => Err(Error::MultipleRoots {
            target: input.lambda,
            alphas: roots.iter().map(|p| p.alpha).collect(),
        }),
    }
}

fn solve_noiseless(input: &SeInput) -> Result<SeOperatingPoint> {
    let SeInput {
        prior, delta, lambda, ..
    } = input;
    validate_common(prior, *delta, 0.0)?;
    let mut rungs: Vec<(f64, SeOperatingPoint)> = Vec::new();
    let mut sigma: f64 = 1.0;
    while sigma >= 1e-6 {
        let noisy = SeInput { sigma, ..input.clone() };
        let roots = solve_lambda_roots(&noisy)?;
        let pick = match (roots.as_slice(), rungs.last()) {
            ([only], _) => *only,
            (_, Some((_, prev))) => *roots
                .iter()
                .min_by(|a, b| (a.alpha - prev.alpha).abs().total_cmp(&(b.alpha - prev.alpha).abs()))
                .expect("roots are non-empty"),
            (_, None) => {
                return Err(Error::MultipleRoots {
                    target: *lambda,
                    alphas: roots.iter().map(|p| p.alpha).collect(),
                })
            }
        };
        rungs.push((sigma, pick));
        sigma *= 0.5;
    }
    let (s1, p1) = rungs[rungs.len() - 2];
    let (s2, p2) = rungs[rungs.len() - 1];
    let w = s2 * s2 / (s1 * s1 - s2 * s2);
    let alpha = p2.alpha + (p2.alpha - p1.alpha) * w;
    // Without noise the τ equation is nearly flat in τ once the signal sits
    // far above the threshold, so τ is recovered from the λ equation at the
    // extrapolated α instead of being extrapolated itself.
    let tau = tau_for_lambda(prior, *delta, alpha, *lambda)?;
    Ok(operating_point(prior, *delta, alpha, tau))
}

/// τ with `(1 − P(α, τ)/δ)·ατ = λ`; the left side increases in τ wherever
/// it is positive.
fn tau_for_lambda(prior: &Prior, delta: f64, alpha: f64, lambda: f64) -> Result<f64> {
    let excess = |tau: f64| operating_point(prior, delta, alpha, tau).lambda - lambda;
    let Some(hi) = grow_until(lambda / alpha, |t| excess(t) > 0.0) else {
        return Err(Error::LambdaOutOfRange {
            target: lambda,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    };
    let mut lo = 0.5 * hi;
    while excess(lo) > 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return domain("lambda equation has no positive root in tau");
        }
    }
    Ok(bisect(excess, lo, hi, 0.0))
}

/// Instance-specific trade-off curve: the operating point at every α of the
/// grid. Points where τ fails to converge, collapses to zero, or λ comes out
/// non-positive are kept as [`SweepPoint::Skipped`] records.
pub fn sweep_alpha(prior: &Prior, delta: f64, sigma: f64, alpha_grid: &ScalarGrid) -> Result<Vec<SweepPoint>> {
    validate_common(prior, delta, sigma)?;
    let floor = alpha_floor(delta);
    let pts = alpha_grid.points();
    if pts[0] <= floor || pts[pts.len() - 1] > ALPHA_MAX {
        return domain(format!(
            "alpha grid must lie in ({floor}, {ALPHA_MAX}], got [{}, {}]",
            pts[0],
            pts[pts.len() - 1]
        ));
    }
    Ok(pts
        .par_iter()
        .map(|&alpha| match solve_tau(prior, delta, sigma, alpha) {
            Err(e) => SweepPoint::Skipped {
                alpha,
                reason: e.to_string(),
            },
            Ok(0.0) => SweepPoint::Skipped {
                alpha,
                reason: "exact recovery regime (tau = 0, lambda = 0)".into(),
            },
            Ok(tau) => {
                let p = operating_point(prior, delta, alpha, tau);
                if p.lambda > 0.0 {
                    SweepPoint::Solved(p)
                } else {
                    SweepPoint::Skipped {
                        alpha,
                        reason: format!("infeasible: lambda = {:e} is not positive", p.lambda),
                    }
                }
            }
        })
        .collect())
}

/// Where an instance-specific curve comes closest to the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryApproach {
    pub alpha: f64,
    pub tpp_inf: f64,
    pub fdp_inf: f64,
    /// `fdp_inf − q*(tpp_inf)`.
    pub gap: f64,
}

/// First interior local minimum of the vertical gap `fdp − q*(tpp)` when the
/// solved points are walked in increasing α (decreasing TPP).
///
/// Both curves tend to zero as TPP → 0, so the global minimum of the gap is
/// always the trivial limit at the deepest threshold; the first local
/// minimum is the point where the curve actually touches the boundary.
/// Points with TPP at or above `u*` are ignored.
pub fn boundary_approach(points: &[SeOperatingPoint], shape: ProblemShape) -> Option<BoundaryApproach> {
    let mut pts: Vec<BoundaryApproach> = points
        .iter()
        .filter(|p| p.tpp_inf < shape.u_star())
        .filter_map(|p| {
            let q = q_star(p.tpp_inf, shape).ok()?;
            Some(BoundaryApproach {
                alpha: p.alpha,
                tpp_inf: p.tpp_inf,
                fdp_inf: p.fdp_inf,
                gap: p.fdp_inf - q,
            })
        })
        .collect();
    pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    pts.windows(3)
        .find(|w| w[1].gap <= w[0].gap && w[1].gap < w[2].gap)
        .map(|w| w[1])
}

/// ε′ with `P(|π* + W| > α) = (1 − ε′)P(|W| > α) + ε′`, where `π* = Π*/τ`.
pub fn effective_epsilon_prime(prior: &Prior, alpha: f64, tau: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let eps = prior.epsilon();
    if eps <= 0.0 {
        return domain("prior has no nonzero atoms");
    }
    let detect: f64 = prior
        .nonzero()
        .map(|a| a.mass / eps * excess_tail(a.value.abs() / tau, alpha))
        .sum();
    let null = 2.0 * cdf(-alpha);
    Ok(((detect - null) / (1.0 - null)).clamp(0.0, 1.0))
}

/// Residuals and constraint margins of a solved operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeDiagnostics {
    /// `|σ² + (τ²/δ)R − τ²| / τ²`.
    pub fixed_point_residual: f64,
    /// `(1−ε)Eη_α(W)² + ε E(η_α(π*+W) − π*)²`, which must stay below δ.
    pub risk_budget: f64,
    /// `(1−ε)P(|W|>α) + ε P(|π*+W|>α)`, which must stay below `min(δ, 1)`.
    pub detection_budget: f64,
    /// `E(η_α(π*+W) − π*)² − [(1−ε′)Eη_α(W)² + ε′(α²+1)]`, non-negative by concavity.
    pub jensen_gap: f64,
}

pub fn diagnostics(prior: &Prior, delta: f64, sigma: f64, point: &SeOperatingPoint) -> Result<SeDiagnostics> {
    let SeOperatingPoint { alpha, tau, .. } = *point;
    if !(tau > 0.0) {
        return domain("diagnostics need tau > 0");
    }
    let eps = prior.epsilon();
    let risk = scaled_risk(prior, alpha, tau);
    let t2 = tau * tau;
    let fixed_point_residual = (sigma * sigma + t2 / delta * risk - t2).abs() / t2;
    let detection_budget = (1.0 - eps) * 2.0 * cdf(-alpha)
        + prior
            .nonzero()
            .map(|a| a.mass * excess_tail(a.value / tau, alpha))
            .sum::<f64>();
    let signal_risk: f64 = prior
        .nonzero()
        .map(|a| a.mass / eps * soft_mse(a.value / tau, alpha))
        .sum();
    let ep = effective_epsilon_prime(prior, alpha, tau)?;
    let jensen_gap = signal_risk - ((1.0 - ep) * null_risk(alpha) + ep * (alpha * alpha + 1.0));
    Ok(SeDiagnostics {
        fixed_point_residual,
        risk_budget: risk,
        detection_budget,
        jensen_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fifty() -> Prior {
        Prior::two_point(0.2, 50.0).unwrap()
    }

    #[test]
    fn tau_matches_linear_solve_for_negligible_signal() {
        // With all signal mass at ~0 the fixed point is linear in τ²:
        // τ² = σ² / (1 − Eη_α(W)²/δ).
        let prior = Prior::new(vec![
            Atom {
                value: 1e-12,
                mass: 0.2,
            },
            Atom { value: 0.0, mass: 0.8 },
        ])
        .unwrap();
        for (sigma, alpha, delta) in [(1.0, 1.0, 1.0), (10.0, 2.0, 0.8), (1.0, 0.5, 2.0)] {
            let tau = solve_tau(&prior, delta, sigma, alpha).unwrap();
            let exact = (sigma * sigma / (1.0 - null_risk(alpha) / delta)).sqrt();
            assert!((tau - exact).abs() <= 1e-10 * exact, "{tau} vs {exact}");
        }
    }

    #[test]
    fn tau_rejects_small_alpha() {
        let p = fifty();
        assert!(solve_tau(&p, 0.5, 1.0, 0.1).is_err());
        assert!(solve_tau(&p, 1.0, 1.0, 0.0).is_err());
        assert!(solve_tau(&p, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn tau_iterates_monotone_for_point_mass() {
        let p = fifty();
        let (delta, sigma, alpha) = (1.0, 1.0, 1.5);
        let mut t2 = sigma * sigma + p.second_moment() / delta;
        let mut prev_step: Option<f64> = None;
        for _ in 0..200 {
            let next = sigma * sigma + t2 / delta * scaled_risk(&p, alpha, t2.sqrt());
            let step = next - t2;
            if let Some(ps) = prev_step {
                assert!(step == 0.0 || ps == 0.0 || step.signum() == ps.signum());
            }
            prev_step = Some(step);
            t2 = next;
        }
        let tau = solve_tau(&p, delta, sigma, alpha).unwrap();
        assert!((tau - t2.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rates_identities() {
        let p = fifty();
        let pt = lambda_at(&p, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(pt.fd_inf, 2.0 * 0.8 * cdf(-2.0));
        assert_eq!(pt.fdp_inf, pt.fd_inf / (pt.fd_inf + pt.td_inf));
        assert_eq!(pt.tpp_inf, pt.td_inf / p.epsilon());
        let ep = effective_epsilon_prime(&p, pt.alpha, pt.tau).unwrap();
        let compact = 2.0 * (1.0 - ep) * cdf(-pt.alpha) + ep;
        assert!((pt.tpp_inf - compact).abs() < 1e-10);
        let deep = lambda_at(&p, 1.0, 1.0, 30.0).unwrap();
        assert!(deep.fd_inf < 1e-100);
    }

    #[test]
    fn lambda_solve_residuals() {
        let p = fifty();
        for lambda in [0.5, 2.0, 4.0, 8.0, 30.0] {
            let input = SeInput {
                prior: p.clone(),
                delta: 1.0,
                sigma: 1.0,
                lambda,
            };
            let pt = solve_lambda_point(&input).unwrap();
            assert!((pt.lambda - lambda).abs() <= 1e-9 * lambda.max(1.0));
            let d = diagnostics(&p, 1.0, 1.0, &pt).unwrap();
            assert!(d.fixed_point_residual <= 1e-10, "{d:?}");
            assert!(d.risk_budget < 1.0 && d.detection_budget < 1.0);
            assert!(d.jensen_gap >= -1e-12);
        }
    }

    #[test]
    fn lambda_out_of_range() {
        let input = SeInput {
            prior: fifty(),
            delta: 1.0,
            sigma: 1.0,
            lambda: 1e6,
        };
        assert!(matches!(
            solve_lambda_point(&input),
            Err(Error::LambdaOutOfRange { .. })
        ));
        let bad = SeInput { lambda: -1.0, ..input };
        assert!(solve_lambda_point(&bad).is_err());
    }

    #[test]
    fn lambda_map_is_monotone_on_scan() {
        // Audit of the uniqueness assumption behind the bisection.
        for (prior, delta) in [
            (fifty(), 1.0),
            (sharpness_prior_with_weak(0.2, 0.5, 50.0, 0.1).unwrap(), 1.0),
            (Prior::two_point(0.1, 3.0).unwrap(), 0.5),
        ] {
            let floor = alpha_floor(delta);
            let mut prev = f64::NEG_INFINITY;
            let mut positive = false;
            for i in 1..=200 {
                let alpha = floor + 0.05 * i as f64;
                let Ok(p) = lambda_at(&prior, delta, 1.0, alpha) else {
                    continue;
                };
                if p.lambda > 0.0 {
                    positive = true;
                }
                if positive {
                    assert!(p.lambda > prev, "lambda dropped at alpha {alpha}");
                }
                prev = p.lambda;
            }
        }
    }

    #[test]
    fn noiseless_extrapolation_is_consistent() {
        let p = fifty();
        let input = SeInput {
            prior: p.clone(),
            delta: 1.0,
            sigma: 0.0,
            lambda: 4.0,
        };
        let pt = solve_lambda_point(&input).unwrap();
        assert!((pt.lambda - 4.0).abs() <= 4e-9, "{pt:?}");
        // A moderately small σ is already close to the limit.
        let rung = solve_lambda_point(&SeInput { sigma: 1e-3, ..input }).unwrap();
        assert!((rung.alpha - pt.alpha).abs() < 1e-6 * pt.alpha, "{rung:?} vs {pt:?}");
        assert!((rung.tau - pt.tau).abs() < 1e-5 * pt.tau);
        let d = diagnostics(&p, 1.0, 0.0, &pt).unwrap();
        assert!(d.fixed_point_residual <= 1e-10, "{d:?}");
    }

    #[test]
    fn epsilon_prime_limits() {
        let strong = Prior::two_point(0.2, 1e9).unwrap();
        assert!((effective_epsilon_prime(&strong, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let weak = Prior::two_point(0.2, 1e-12).unwrap();
        assert!(effective_epsilon_prime(&weak, 1.0, 1.0).unwrap() < 1e-12);
        let mix = sharpness_prior(0.2, 0.3, 1e6).unwrap();
        let ep = effective_epsilon_prime(&mix, 2.0, 1.0).unwrap();
        assert!((ep - 0.3).abs() < 1e-6);
        assert!(effective_epsilon_prime(&mix, 0.0, 1.0).is_err());
        assert!(effective_epsilon_prime(&mix, 1.0, 0.0).is_err());
    }

    #[test]
    fn sweep_dominates_boundary() {
        let p = fifty();
        let shape = ProblemShape::new(1.0, 0.2).unwrap();
        let grid = ScalarGrid::linspace(0.05, 12.0, 120).unwrap();
        let sweep = sweep_alpha(&p, 1.0, 1.0, &grid).unwrap();
        assert_eq!(sweep.len(), 120);
        let mut solved = 0;
        for pt in sweep.iter().filter_map(SweepPoint::solved) {
            solved += 1;
            if pt.tpp_inf < shape.u_star() {
                let q = q_star(pt.tpp_inf, shape).unwrap();
                assert!(pt.fdp_inf >= q - 1e-9, "{pt:?} below q* = {q}");
            }
        }
        assert!(solved > 100);
        let last = sweep.last().unwrap().solved().unwrap();
        assert!(last.fdp_inf < 1e-6 && last.tpp_inf < 1e-6, "{last:?}");
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let p = fifty();
        let grid = ScalarGrid::new(vec![0.1, 1.0]).unwrap();
        assert!(sweep_alpha(&p, 0.5, 1.0, &grid).is_err());
        let grid = ScalarGrid::new(vec![1.0, 41.0]).unwrap();
        assert!(sweep_alpha(&p, 1.0, 1.0, &grid).is_err());
        let zero = Prior::new(vec![Atom { value: 0.0, mass: 1.0 }]).unwrap();
        let grid = ScalarGrid::new(vec![1.0]).unwrap();
        assert!(sweep_alpha(&zero, 1.0, 1.0, &grid).is_err());
    }

    #[test]
    fn sharpness_curves_touch_in_order() {
        let shape = ProblemShape::new(1.0, 0.2).unwrap();
        let grid = ScalarGrid::linspace(0.01, 20.0, 2000).unwrap();
        let mut last_tpp = 0.0;
        for ep in [0.3, 0.5, 0.7, 0.9] {
            let prior = sharpness_prior_with_weak(0.2, ep, 50.0, 0.1).unwrap();
            let sweep = sweep_alpha(&prior, 1.0, 1.0, &grid).unwrap();
            let solved: Vec<_> = sweep.iter().filter_map(SweepPoint::solved).copied().collect();
            let touch = boundary_approach(&solved, shape).unwrap();
            assert!(touch.gap <= 0.02 && touch.gap >= -1e-9, "{ep}: {touch:?}");
            assert!(touch.tpp_inf > last_tpp);
            last_tpp = touch.tpp_inf;
        }
    }
}
