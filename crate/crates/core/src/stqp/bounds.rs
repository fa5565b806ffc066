use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Closed-form lower bound on γ(Q) = min over the simplex of δᵀQδ:
///
/// min_{i≤j} Q_ij + 1 / Σ_k 1/(Q_kk − min_{i≤j} Q_ij),
///
/// with 1/0 = ∞, a + ∞ = ∞ and 1/∞ = 0.
pub fn lower_bound_gamma(q: &SymMatrix) -> f64 {
    let n = q.n();
    let mut min_entry = f64::INFINITY;
    for i in 0..n {
        for &v in &q.row(i)[i..] {
            min_entry = min_entry.min(v);
        }
    }
    let mut denom = 0.0;
    for d in q.diagonal() {
        let gap = d - min_entry;
        if gap <= 0.0 {
            // 1/0 = ∞ makes the whole sum infinite, so the correction is 0.
            return min_entry;
        }
        denom += 1.0 / gap;
    }
    min_entry + 1.0 / denom
}

/// Lipschitz constant of δ ↦ δᵀQδ on the simplex: 2·max_i ‖q_i‖₂.
#[allow(non_snake_case)]
pub fn lipschitz_K(q: &SymMatrix) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    Ok(2.0 * (0..q.n()).map(|j| q.column_norm(j)).fold(0.0, f64::max))
}
