//! Path events: power at the first false discovery, FDP at full power, and
//! the rank of the first null to enter.

use crate::error::{domain, Result};
use crate::state_evolution::SeOperatingPoint;

use super::path::{PathRecord, PathTrace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvents {
    /// TPP at the first record with `V > 0`; `None` if no null ever enters.
    pub tpp_at_first_false: Option<f64>,
    /// FDP at the first record with `TPP = 1`; `None` if never reached.
    pub fdp_at_full_power: Option<f64>,
    /// 1-based position of the first null in the entry order, or
    /// `entries + 1` if no null enters.
    pub rank_first_false: usize,
    /// All `k` signals enter before any null.
    pub perfect_recovery: bool,
}

/// Events of a trace against `k` true signals.
///
/// Traces read back from CSV carry counts only. There the rank is taken as
/// one more than the largest support size seen before the first false
/// discovery, which is exact when no variable leaves the path early on.
pub fn path_events(trace: &PathTrace, k: usize) -> Result<PathEvents> {
    let recs = &trace.records;
    if recs.is_empty() {
        return domain("path trace has no records");
    }
    let first_false = recs.iter().position(|r| r.v > 0);
    let tpp_at_first_false = first_false.map(|i| recs[i].tpp);
    let fdp_at_full_power = if k == 0 {
        None
    } else {
        recs.iter().find(|r| r.t >= k).map(|r| r.fdp)
    };
    let rank_first_false = match &trace.entries {
        Some(entries) => entries
            .iter()
            .position(|e| !e.signal)
            .map_or(entries.len() + 1, |i| i + 1),
        None => {
            let before = first_false.unwrap_or(recs.len());
            recs[..before].iter().map(|r| r.support_size).max().unwrap_or(0) + 1
        }
    };
    Ok(PathEvents {
        tpp_at_first_false,
        fdp_at_full_power,
        rank_first_false,
        perfect_recovery: rank_first_false > k,
    })
}

/// FDP at the first record whose TPP reaches `u`.
pub fn fdp_at_tpp(trace: &PathTrace, u: f64) -> Option<f64> {
    trace.records.iter().find(|r| r.tpp >= u).map(|r| r.fdp)
}

/// Largest deviations `(sup |V/p − fd∞|, sup |T/p − td∞|)` over the λ values
/// present in both the trace and the state-evolution curve (matched to a
/// relative 1e-9).
pub fn empirical_vs_se(trace: &PathTrace, p: usize, se_curve: &[SeOperatingPoint]) -> Result<(f64, f64)> {
    if p == 0 {
        return domain("p must be positive");
    }
    let matched: Vec<(&PathRecord, &SeOperatingPoint)> = trace
        .records
        .iter()
        .filter_map(|r| {
            se_curve
                .iter()
                .find(|s| (s.lambda - r.lambda).abs() <= 1e-9 * r.lambda.abs().max(s.lambda.abs()))
                .map(|s| (r, s))
        })
        .collect();
    if matched.is_empty() {
        return domain("trace and state-evolution curve share no lambda values");
    }
    let pf = p as f64;
    Ok(matched.iter().fold((0.0_f64, 0.0_f64), |(dv, dt), (r, s)| {
        (
            dv.max((r.v as f64 / pf - s.fd_inf).abs()),
            dt.max((r.t as f64 / pf - s.td_inf).abs()),
        )
    }))
}
