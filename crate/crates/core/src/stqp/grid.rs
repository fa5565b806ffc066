//! The regular grid Δ_r^{n-1} = { δ ∈ Δ^{n-1} : rδ integral }.

use super::{lower_bound_gamma, StqpMethod, StqpResult};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::simplex::GridPoint;

/// Default cap on quadratic-form evaluations for [`stqp_grid`].
pub const DEFAULT_GRID_BUDGET: u64 = 10_000_000;

/// binom(a, b), or `None` when it does not fit in a u64.
pub fn binomial(a: u64, b: u64) -> Option<u64> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        // acc·(a−i)/(i+1) stays integral at every step.
        acc = acc.checked_mul((a - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// |Δ_r^{n-1}| = binom(n + r − 1, r).
pub fn grid_size(n: usize, r: u64) -> Option<u64> {
    binomial((n as u64).checked_add(r)?.checked_sub(1)?, r)
}

/// Lazily yields every composition of `r` into `n` nonnegative parts, in
/// decreasing lexicographic order starting at (r, 0, …, 0).
pub fn grid_enumerate(n: usize, r: u64) -> Result<GridIter> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidArgument(format!("grid needs n >= 1 and r >= 1, got n = {n}, r = {r}")));
    }
    let total = grid_size(n, r)
        .ok_or_else(|| Error::GridTooLarge { n, r, reason: "point count overflows 64 bits".into() })?;
    Ok(GridIter { r, next: Some(GridPoint::vertex(n, r, 0).numerators().to_vec()), remaining: total })
}

#[derive(Debug, Clone)]
pub struct GridIter {
    r: u64,
    next: Option<Vec<u64>>,
    remaining: u64,
}

impl GridIter {
    /// Advances `a` to the next composition in place; false when exhausted.
    fn advance(a: &mut [u64]) -> bool {
        let n = a.len();
        // Rightmost position before the last with a positive entry.
        let Some(j) = (0..n.saturating_sub(1)).rev().find(|&j| a[j] > 0) else {
            return false;
        };
        let tail: u64 = a[j + 1..].iter().sum();
        a[j] -= 1;
        for v in a[j + 1..].iter_mut() {
            *v = 0;
        }
        a[j + 1] = tail + 1;
        true
    }
}

impl Iterator for GridIter {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if Self::advance(&mut succ) {
            self.next = Some(succ);
        }
        self.remaining = self.remaining.saturating_sub(1);
        Some(GridPoint::from_parts_unchecked(self.r, current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (rem, usize::try_from(self.remaining).ok())
    }
}

/// Smallest positive integer r with r ≥ (max_i Q_ii − γ̲(Q)) / ε.
pub fn grid_resolution_for(q: &SymMatrix, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::EpsilonRange { epsilon, upper: f64::INFINITY });
    }
    let max_diag = q.diagonal().fold(f64::NEG_INFINITY, f64::max);
    let numerator = max_diag - lower_bound_gamma(q);
    if numerator <= 0.0 {
        return Ok(1);
    }
    let ratio = numerator / epsilon;
    if ratio >= u64::MAX as f64 {
        return Err(Error::GridTooLarge { n: q.n(), r: u64::MAX, reason: "resolution overflows 64 bits".into() });
    }
    let mut r = ratio.ceil().max(1.0) as u64;
    // Guard against the division rounding up past an exact integer.
    while r > 1 && (r - 1) as f64 * epsilon >= numerator {
        r -= 1;
    }
    Ok(r)
}

/// δᵀQδ for δ = a / r, summing only over nonzero numerators.
pub fn grid_quadratic_form(q: &SymMatrix, point: &GridPoint) -> f64 {
    let support: Vec<(usize, f64)> =
        point.numerators().iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, &a)| (i, a as f64)).collect();
    let mut total = 0.0;
    for &(i, ai) in &support {
        let row = q.row(i);
        let mut acc = 0.0;
        for &(j, aj) in &support {
            acc += row[j] * aj;
        }
        total += ai * acc;
    }
    let r = point.r() as f64;
    total / (r * r)
}

/// Minimum of δᵀQδ over Δ_r with r = [`grid_resolution_for`]`(q, ε)`;
/// within ε of γ(Q).
pub fn stqp_grid(q: &SymMatrix, epsilon: f64) -> Result<StqpResult> {
    stqp_grid_with_budget(q, epsilon, DEFAULT_GRID_BUDGET)
}

pub fn stqp_grid_with_budget(q: &SymMatrix, epsilon: f64, budget: u64) -> Result<StqpResult> {
    let n = q.n();
    let r = grid_resolution_for(q, epsilon)?;
    let size = grid_size(n, r)
        .ok_or_else(|| Error::GridTooLarge { n, r, reason: "point count overflows 64 bits".into() })?;
    if size > budget {
        return Err(Error::GridTooLarge { n, r, reason: format!("{size} points exceed budget {budget}") });
    }
    let mut best: Option<(f64, GridPoint)> = None;
    for point in grid_enumerate(n, r)? {
        let value = grid_quadratic_form(q, &point);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, point));
        }
    }
    let (value, point) = best.expect("grid is nonempty");
    Ok(StqpResult {
        minimizer: point.to_simplex(),
        value,
        method: StqpMethod::Grid,
        evaluations: size,
        r: Some(r),
        m: None,
        clamped: false,
    })
}

/// G_r(δ): grid points within Euclidean distance √2/r of δ.
///
/// Numerator vectors of two points of Δ_r have integer differences summing
/// to zero, so squared distance ≤ 2 leaves exactly δ itself and the moves
/// δ − e_i/r + e_j/r with a_i ≥ 1, j ≠ i. Returned in increasing
/// lexicographic order of numerators.
pub fn grid_neighborhood(delta: &GridPoint) -> Vec<GridPoint> {
    let a = delta.numerators();
    let n = a.len();
    let mut out = vec![delta.clone()];
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut b = a.to_vec();
            b[i] -= 1;
            b[j] += 1;
            out.push(GridPoint::from_parts_unchecked(delta.r(), b));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stqp::{stqp_exact, DEFAULT_EXACT_CAP};
    use rand::Rng;

    #[test]
    fn enumeration_examples() {
        assert_eq!(grid_enumerate(3, 2).unwrap().count(), 6);
        let pts: Vec<Vec<u64>> = grid_enumerate(2, 3).unwrap().map(|p| p.numerators().to_vec()).collect();
        assert_eq!(pts, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(grid_enumerate(5, 4).unwrap().count(), 70);
        assert_eq!(grid_enumerate(1, 7).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_counts_match_binomial() {
        for n in 1..=8 {
            for r in 1..=8u64 {
                let mut seen = std::collections::HashSet::new();
                for p in grid_enumerate(n, r).unwrap() {
                    assert_eq!(p.numerators().iter().sum::<u64>(), r);
                    assert!(seen.insert(p));
                }
                assert_eq!(seen.len() as u64, grid_size(n, r).unwrap());
            }
        }
    }

    #[test]
    fn overflow_is_a_typed_error() {
        assert!(matches!(grid_enumerate(1000, 1000), Err(Error::GridTooLarge { .. })));
        assert_eq!(binomial(51, 2), Some(1275));
        assert_eq!(binomial(67, 33), Some(14226520737620288370));
        assert_eq!(binomial(68, 34), None);
    }

    #[test]
    fn resolution_examples() {
        let i2 = SymMatrix::identity(2);
        assert_eq!(grid_resolution_for(&i2, 1.0).unwrap(), 1);
        assert_eq!(grid_resolution_for(&i2, 0.1).unwrap(), 5);
        let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(grid_resolution_for(&swap, 0.25).unwrap(), 1);
        assert!(grid_resolution_for(&i2, 0.0).is_err());
    }

    #[test]
    fn grid_solve_examples() {
        let i2 = SymMatrix::identity(2);
        let res = stqp_grid(&i2, 0.5).unwrap();
        assert_eq!(res.r, Some(1));
        assert_eq!(res.value, 1.0);
        let res = stqp_grid(&i2, 0.25).unwrap();
        assert_eq!(res.r, Some(2));
        assert_eq!(res.value, 0.5);
        assert_eq!(res.minimizer.coords(), &[0.5, 0.5]);
    }

    #[test]
    fn grid_gap_within_epsilon() {
        let mut rng = RngStream::new(31);
        for _ in 0..20 {
            let q = SymMatrix::from_upper_fn(5, |_, _| rng.random_range(-1.0..=1.0));
            let exact = stqp_exact(&q, DEFAULT_EXACT_CAP).unwrap().value;
            let grid = stqp_grid(&q, 0.1).unwrap().value;
            assert!(grid - exact <= 0.1 + 1e-12);
            assert!(grid - exact >= -1e-10);
        }
    }

    #[test]
    fn budget_turns_blowup_into_error() {
        let q = SymMatrix::identity(30);
        assert!(matches!(stqp_grid_with_budget(&q, 0.01, 1000), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn neighborhood_examples() {
        for n in 1..6 {
            for r in 1..5 {
                let nb = grid_neighborhood(&GridPoint::vertex(n, r, 0));
                assert_eq!(nb.len(), n);
            }
        }
        let mid = GridPoint::new(2, vec![1, 1]).unwrap();
        let nb: Vec<Vec<u64>> = grid_neighborhood(&mid).iter().map(|p| p.numerators().to_vec()).collect();
        assert_eq!(nb, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn neighborhood_matches_brute_force_distance() {
        for n in 1..=5 {
            for r in 1..=6 {
                let all: Vec<GridPoint> = grid_enumerate(n, r).unwrap().collect();
                for p in &all {
                    let mut brute: Vec<GridPoint> = all
                        .iter()
                        .filter(|other| {
                            let d2: f64 = p
                                .to_simplex()
                                .coords()
                                .iter()
                                .zip(other.to_simplex().coords())
                                .map(|(x, y)| (x - y).powi(2))
                                .sum();
                            d2 <= 2.0 / (r * r) as f64 + 1e-12
                        })
                        .cloned()
                        .collect();
                    brute.sort();
                    let fast = grid_neighborhood(p);
                    assert_eq!(fast, brute);
                    assert!(fast.len() >= n);
                }
            }
        }
    }
}
