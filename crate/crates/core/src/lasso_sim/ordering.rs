//! Non-Lasso variable orderings: least squares and marginal correlations.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};

use super::design::DesignInstance;

fn rank_by_magnitude(index: &[usize], score: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..index.len()).collect();
    order.sort_by(|&a, &b| score[b].abs().total_cmp(&score[a].abs()).then(index[a].cmp(&index[b])));
    order.into_iter().map(|i| index[i]).collect()
}

/// Least-squares coefficients on the full design (needs `n > p`) or on the
/// columns in `restrict_to`.
pub fn least_squares(inst: &DesignInstance, restrict_to: Option<&[usize]>) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = inst.n();
    let cols: Vec<usize> = match restrict_to {
        Some(s) => {
            if let Some(&bad) = s.iter().find(|&&j| j >= inst.p()) {
                return domain(format!("column {bad} out of range for p = {}", inst.p()));
            }
            s.to_vec()
        }
        None => (0..inst.p()).collect(),
    };
    if cols.is_empty() {
        return Ok((cols, Vec::new()));
    }
    if restrict_to.is_none() && n <= inst.p() {
        return domain(format!("full least squares needs n > p, got n = {n}, p = {}", inst.p()));
    }
    if cols.len() > n {
        return domain(format!("{} columns exceed n = {n}", cols.len()));
    }
    let x = DMatrix::from_fn(n, cols.len(), |i, c| inst.column(cols[c])[i]);
    let y = DVector::from_column_slice(inst.y());
    let qr = x.qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if r.diagonal().iter().any(|v| v.abs() <= 1e-10 * scale) {
        return Err(Error::Singular("design columns are rank deficient".into()));
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    Ok((cols, coef.iter().copied().collect()))
}

/// Variables ranked by `|β̂ᴸˢ_j|`, largest first; ties by index.
pub fn ls_ordering(inst: &DesignInstance, restrict_to: Option<&[usize]>) -> Result<Vec<usize>> {
    let (cols, coef) = least_squares(inst, restrict_to)?;
    Ok(rank_by_magnitude(&cols, &coef))
}

/// Variables ranked by `|X_jᵀy|`, largest first; ties by index.
pub fn marginal_ordering(inst: &DesignInstance) -> Vec<usize> {
    let cols: Vec<usize> = (0..inst.p()).collect();
    let score: Vec<f64> = cols.iter().map(|&j| inst.col_dot(j, inst.y())).collect();
    rank_by_magnitude(&cols, &score)
}
