//! Bracketing bisection used by every scalar solve in the crate.

/// Bisects `f` on `[lo, hi]`, assuming `f(lo) ≤ 0 ≤ f(hi)` or the reverse.
/// Stops once the bracket is narrower than `xtol` or can no longer shrink in
/// floating point. Returns the midpoint of the final bracket.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Doubles `hi` (starting from `start > 0`) until `pred(hi)` holds.
/// Returns `None` if the value overflows first.
pub(crate) fn grow_until<P: FnMut(f64) -> bool>(start: f64, mut pred: P) -> Option<f64> {
    let mut hi = start;
    while hi.is_finite() {
        if pred(hi) {
            return Some(hi);
        }
        hi *= 2.0;
    }
    None
}
