//! Exact StQP by support enumeration.
//!
//! Every global minimizer set contains a point δ* of minimal support J*.
//! On the face spanned by J*, δ* is a relative-interior local minimizer, so
//! the form Q restricted to the tangent space {v : supp v ⊆ J*, Σ v = 0} is
//! positive semidefinite, and it is in fact definite: a null direction
//! would keep δᵀQδ constant along a line that exits the face, producing a
//! minimizer of smaller support. Positive definiteness of the tangent form
//! is inherited by every subset of J*, so a depth-first walk over supports
//! that abandons a branch as soon as the tangent form stops being definite
//! still reaches J*. On each surviving face the KKT system
//!
//! Q_J δ_J = λ·1,  1ᵀδ_J = 1
//!
//! is nonsingular and its solution is the candidate for that face.
//!
//! Definiteness is tested with a threshold of `PD_REL_TOL · max|Q_ij|`;
//! a face dropped by the threshold has a boundary point whose value differs
//! by at most about twice that threshold.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{StqpMethod, StqpResult};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::simplex::{SimplexPoint, SIMPLEX_TOL};

pub const DEFAULT_EXACT_CAP: usize = 22;
pub const DEFAULT_EXACT_NODE_BUDGET: u64 = 50_000_000;

const PD_REL_TOL: f64 = 1e-11;
const PINV_EPS: f64 = 1e-13;

/// Global minimum of δᵀQδ over the simplex.
pub fn stqp_exact(q: &SymMatrix, n_cap: usize) -> Result<StqpResult> {
    stqp_exact_with_budget(q, n_cap, DEFAULT_EXACT_NODE_BUDGET)
}

/// [`stqp_exact`] with an explicit limit on the number of supports visited.
pub fn stqp_exact_with_budget(q: &SymMatrix, n_cap: usize, node_budget: u64) -> Result<StqpResult> {
    let n = q.n();
    if n > n_cap {
        return Err(Error::ExactSolverCap { n, cap: n_cap });
    }
    let scale = q.max_abs();
    let mut best = Candidate { value: f64::INFINITY, support: vec![], weights: vec![] };
    let mut evaluations = 0u64;

    if scale == 0.0 {
        // γ(O) = 0 and every point is optimal; report e_1.
        return Ok(result(n, Candidate { value: 0.0, support: vec![0], weights: vec![1.0] }, 1));
    }
    let pd_tol = PD_REL_TOL * scale;

    // Depth-first over supports, children extend by a strictly larger index,
    // so supports are visited in lexicographic order.
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|i| vec![i]).collect();
    let mut visited = 0u64;
    while let Some(support) = stack.pop() {
        visited += 1;
        if visited > node_budget {
            return Err(Error::ExactSearchBudget { budget: node_budget });
        }
        if support.len() > 1 && !tangent_form_definite(q, &support, pd_tol) {
            continue;
        }
        if let Some(weights) = face_stationary_point(q, &support) {
            evaluations += 1;
            let value = restricted_form(q, &support, &weights);
            if value < best.value {
                best = Candidate { value, support: support.clone(), weights };
            }
        }
        let last = *support.last().unwrap();
        for j in ((last + 1)..n).rev() {
            let mut child = support.clone();
            child.push(j);
            stack.push(child);
        }
    }
    Ok(result(n, best, evaluations))
}

struct Candidate {
    value: f64,
    support: Vec<usize>,
    weights: Vec<f64>,
}

fn result(n: usize, best: Candidate, evaluations: u64) -> StqpResult {
    let mut coords = vec![0.0; n];
    for (&i, &w) in best.support.iter().zip(&best.weights) {
        coords[i] = w;
    }
    StqpResult {
        minimizer: SimplexPoint::new(coords).expect("face candidates are valid simplex points"),
        value: best.value,
        method: StqpMethod::Exact,
        evaluations,
        r: None,
        m: None,
        clamped: false,
    }
}

/// Whether vᵀQv > tol·‖v‖² on {supp v ⊆ J, Σ v = 0}, using the basis
/// v = (u, −Σu) with the last support index eliminated.
fn tangent_form_definite(q: &SymMatrix, support: &[usize], tol: f64) -> bool {
    let k = support.len() - 1;
    let last = support[k];
    let qll = q.get(last, last);
    let t = DMatrix::from_fn(k, k, |a, b| {
        let (ia, ib) = (support[a], support[b]);
        let shifted = q.get(ia, ib) - q.get(ia, last) - q.get(last, ib) + qll;
        // The basis Gram matrix I + 11ᵀ has eigenvalues in [1, k+1]; shifting
        // by tol·(k+1) keeps the test conservative in the v-norm.
        if a == b {
            shifted - tol * (k + 1) as f64
        } else {
            shifted
        }
    });
    Cholesky::new(t).is_some()
}

/// Solves the face KKT system and returns the face weights when they are
/// nonnegative up to `SIMPLEX_TOL`, clipped and renormalized.
fn face_stationary_point(q: &SymMatrix, support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let bordered = DMatrix::from_fn(k + 1, k + 1, |a, b| match (a < k, b < k) {
        (true, true) => q.get(support[a], support[b]),
        (true, false) | (false, true) => 1.0,
        (false, false) => 0.0,
    });
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;

    let solution = bordered
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .or_else(|| {
            let pinv = bordered.pseudo_inverse(PINV_EPS).ok()?;
            Some(pinv * rhs)
        })?;

    let mut weights: Vec<f64> = solution.iter().take(k).copied().collect();
    if weights.iter().any(|w| !w.is_finite() || *w < -SIMPLEX_TOL) {
        return None;
    }
    for w in weights.iter_mut() {
        *w = w.max(0.0);
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    for w in weights.iter_mut() {
        *w /= sum;
    }
    Some(weights)
}

fn restricted_form(q: &SymMatrix, support: &[usize], weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for (a, &i) in support.iter().enumerate() {
        let mut acc = 0.0;
        for (b, &j) in support.iter().enumerate() {
            acc += q.get(i, j) * weights[b];
        }
        total += weights[a] * acc;
    }
    total
}
