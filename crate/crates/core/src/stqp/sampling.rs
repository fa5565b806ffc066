//! Random-search StQP solvers over the simplex and over the regular grid.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::{
    grid_enumerate, grid_quadratic_form, grid_resolution_for, grid_size, lipschitz_K, StqpMethod, StqpResult,
};
use crate::error::{Error, Result};
use crate::matrix::{quadratic_form_raw, SymMatrix};
use crate::simplex::{GridPoint, SimplexPoint};

/// Default absolute cap on the number of draws of either sampler.
pub const DEFAULT_SAMPLE_CAP: u64 = 1_000_000;

/// m(ρ, φ) = ⌈log φ / log(1 − ρ)⌉, at least 1: the fewest independent
/// trials, each succeeding with probability ρ, that all fail with
/// probability at most φ. Saturates at `u64::MAX`.
pub fn sample_count(rho: f64, phi: f64) -> u64 {
    assert!(phi > 0.0 && phi < 1.0, "phi must lie in (0, 1), got {phi}");
    if rho >= 1.0 {
        return 1;
    }
    if rho <= 0.0 {
        return u64::MAX;
    }
    let log_fail = (-rho).ln_1p();
    let raw = (phi.ln() / log_fail).ceil();
    if raw >= u64::MAX as f64 {
        return u64::MAX;
    }
    let mut m = (raw as u64).max(1);
    // The quotient can land one off an integer boundary; settle on the
    // smallest M with M·log(1−ρ) ≤ log φ.
    let ok = |m: u64| m as f64 * log_fail <= phi.ln();
    while !ok(m) {
        m += 1;
    }
    while m > 1 && ok(m - 1) {
        m -= 1;
    }
    m
}

/// Uniform draw from Δ^{n-1}: n standard exponentials over their sum.
pub fn sample_simplex_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SimplexPoint {
    assert!(n >= 1);
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            let coords = draws.into_iter().map(|e| e / total).collect();
            return SimplexPoint::new(coords).expect("normalized exponentials lie on the simplex");
        }
    }
}

/// Uniform draw from Δ_r^{n-1}: n − 1 bar positions chosen uniformly among
/// n + r − 1 slots; the star counts between bars are the numerators.
pub fn sample_grid_uniform<R: Rng + ?Sized>(n: usize, r: u64, rng: &mut R) -> GridPoint {
    assert!(n >= 1 && r >= 1);
    let slots = usize::try_from(r).expect("resolution fits in usize") + n - 1;
    let mut bars = rand::seq::index::sample(rng, slots, n - 1).into_vec();
    bars.sort_unstable();
    let mut numerators = Vec::with_capacity(n);
    let mut prev: Option<usize> = None;
    for &b in &bars {
        numerators.push((b - prev.map_or(0, |p| p + 1)) as u64);
        prev = Some(b);
    }
    numerators.push((slots - prev.map_or(0, |p| p + 1)) as u64);
    GridPoint::from_parts_unchecked(r, numerators)
}

/// Which rule fixed the sample count M.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleBranch {
    /// M = m(ρ, φ), the count the probabilistic guarantee asks for.
    Guarantee,
    /// M = ⌈fraction · |Δ_r|⌉.
    Fraction,
    /// M hit the absolute cap.
    Cap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub phi: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub r: Option<u64>,
    pub branch: SampleBranch,
    /// True when M < m(ρ, φ).
    pub clamped: bool,
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("phi must lie in (0, 1), got {phi}")))
    }
}

fn check_cap(m_cap: u64) -> Result<()> {
    if m_cap >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("sample cap must be at least 1".into()))
    }
}

/// M for simplex sampling: m((ε / (√2·K(Q)))^{n-1}, φ), capped at `m_cap`.
pub fn simplex_sample_plan(q: &SymMatrix, epsilon: f64, phi: f64, m_cap: u64) -> Result<SamplePlan> {
    check_phi(phi)?;
    check_cap(m_cap)?;
    let upper = std::f64::consts::SQRT_2 * lipschitz_K(q)?;
    if !(epsilon > 0.0 && epsilon <= upper) {
        return Err(Error::EpsilonRange { epsilon, upper });
    }
    let rho = (epsilon / upper).powi(q.n() as i32 - 1);
    let needed = sample_count(rho, phi);
    let (m, branch) = if needed > m_cap { (m_cap, SampleBranch::Cap) } else { (needed, SampleBranch::Guarantee) };
    Ok(SamplePlan { epsilon, phi, m, r: None, branch, clamped: m < needed })
}

/// M for grid sampling: max(1, min(m(n/|Δ_r|, φ), ⌈fraction·|Δ_r|⌉, m_cap)).
/// A grid too large to count is treated as infinite.
pub fn grid_sample_plan(q: &SymMatrix, epsilon: f64, phi: f64, fraction: f64, m_cap: u64) -> Result<SamplePlan> {
    check_phi(phi)?;
    check_cap(m_cap)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("sample fraction must lie in (0, 1], got {fraction}")));
    }
    let n = q.n();
    let r = grid_resolution_for(q, epsilon)?;
    let (needed, by_fraction) = match grid_size(n, r) {
        Some(size) => {
            let by_fraction = (fraction * size as f64).ceil();
            let by_fraction = if by_fraction >= u64::MAX as f64 { u64::MAX } else { by_fraction as u64 };
            (sample_count(n as f64 / size as f64, phi), by_fraction)
        }
        None => (u64::MAX, u64::MAX),
    };
    let mut m = needed;
    let mut branch = SampleBranch::Guarantee;
    if by_fraction < m {
        m = by_fraction;
        branch = SampleBranch::Fraction;
    }
    if m_cap < m {
        m = m_cap;
        branch = SampleBranch::Cap;
    }
    let m = m.max(1);
    Ok(SamplePlan { epsilon, phi, m, r: Some(r), branch, clamped: m < needed })
}

fn zero_matrix_result(n: usize, method: StqpMethod) -> StqpResult {
    StqpResult {
        minimizer: SimplexPoint::vertex(n, 0),
        value: 0.0,
        method,
        evaluations: 0,
        r: None,
        m: None,
        clamped: false,
    }
}

/// Best of M uniform draws from the simplex. Unless `clamped`, the gap to
/// γ(Q) is at most ε with probability at least 1 − φ.
pub fn stqp_simplex_sample<R: Rng + ?Sized>(
    q: &SymMatrix,
    epsilon: f64,
    phi: f64,
    rng: &mut R,
    m_cap: u64,
) -> Result<StqpResult> {
    if q.is_zero() {
        return Ok(zero_matrix_result(q.n(), StqpMethod::SimplexSample));
    }
    let plan = simplex_sample_plan(q, epsilon, phi, m_cap)?;
    let mut best: Option<(f64, SimplexPoint)> = None;
    for _ in 0..plan.m {
        let d = sample_simplex_uniform(q.n(), rng);
        let value = quadratic_form_raw(q, d.coords());
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, d));
        }
    }
    let (value, minimizer) = best.expect("M >= 1");
    Ok(StqpResult {
        minimizer,
        value,
        method: StqpMethod::SimplexSample,
        evaluations: plan.m,
        r: None,
        m: Some(plan.m),
        clamped: plan.clamped,
    })
}

/// Best of M uniform draws from Δ_r with r = `grid_resolution_for(q, ε)`.
/// Unless `clamped`, the gap to γ(Q) is at most
/// (√2·K(Q) + max_i Q_ii − γ̲(Q)) / r with probability at least 1 − φ.
///
/// When M reaches |Δ_r| the grid is enumerated instead, which is never
/// worse than M draws with replacement; the generator is left untouched.
pub fn stqp_grid_sample<R: Rng + ?Sized>(
    q: &SymMatrix,
    epsilon: f64,
    phi: f64,
    sample_fraction: f64,
    rng: &mut R,
    m_cap: u64,
) -> Result<StqpResult> {
    let n = q.n();
    if q.is_zero() {
        return Ok(zero_matrix_result(n, StqpMethod::GridSample));
    }
    let plan = grid_sample_plan(q, epsilon, phi, sample_fraction, m_cap)?;
    let r = plan.r.expect("grid plan carries r");
    let mut best: Option<(f64, GridPoint)> = None;
    let mut consider = |point: GridPoint| {
        let value = grid_quadratic_form(q, &point);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, point));
        }
    };
    let evaluations = match grid_size(n, r) {
        Some(size) if plan.m >= size => {
            grid_enumerate(n, r)?.for_each(&mut consider);
            size
        }
        _ => {
            for _ in 0..plan.m {
                consider(sample_grid_uniform(n, r, rng));
            }
            plan.m
        }
    };
    let (value, point) = best.expect("M >= 1");
    Ok(StqpResult {
        minimizer: point.to_simplex(),
        value,
        method: StqpMethod::GridSample,
        evaluations,
        r: Some(r),
        m: Some(plan.m),
        clamped: plan.clamped,
    })
}
