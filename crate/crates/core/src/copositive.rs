//! Copositive programs
//!
//!   minimize cᵀx  subject to  A_0 + Σ x_i A_i copositive,  x ∈ S,
//!
//! as semi-infinite programs with g(x; δ) = −δᵀ(A_0 + Σ x_i A_i)δ over the
//! simplex, whose index oracle is a standard quadratic program.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::instance::CoppInstance;
use crate::matrix::{quadratic_form, SymMatrix};
use crate::report::AuditMethod;
use crate::rng::RngStream;
use crate::simplex::SimplexPoint;
use crate::sip::{OracleAnswer, SipProblem};
use crate::stqp::{
    lipschitz_K, stqp_exact_with_budget, stqp_grid_sample, stqp_grid_with_budget, stqp_simplex_sample, StqpMethod,
    StqpResult, DEFAULT_EXACT_CAP, DEFAULT_EXACT_NODE_BUDGET, DEFAULT_GRID_BUDGET, DEFAULT_SAMPLE_CAP,
};

/// A_0 + Σ x_i A_i.
pub fn slack_matrix(instance: &CoppInstance, x: &[f64]) -> Result<SymMatrix> {
    check_dim(instance.m(), x.len())?;
    let a = instance.matrices();
    let mut q = a[0].clone();
    for (xi, ai) in x.iter().zip(&a[1..]) {
        if *xi != 0.0 {
            q.add_scaled(*xi, ai)?;
        }
    }
    Ok(q)
}

/// g(x; δ) = −δᵀ(A_0 + Σ x_i A_i)δ.
pub fn copp_constraint_value(instance: &CoppInstance, x: &[f64], delta: &SimplexPoint) -> Result<f64> {
    Ok(-quadratic_form(&slack_matrix(instance, x)?, delta)?)
}

/// ∂ₓg(x; δ) = (−δᵀA_1δ, …, −δᵀA_mδ); independent of x.
pub fn copp_constraint_subgradient(instance: &CoppInstance, x: &[f64], delta: &SimplexPoint) -> Result<Vec<f64>> {
    check_dim(instance.m(), x.len())?;
    check_dim(instance.n(), delta.n())?;
    instance.matrices()[1..].iter().map(|ai| Ok(-quadratic_form(ai, delta)?)).collect()
}

/// L = max{‖c‖₂, (Σ_i (max_{k≤l} |(A_i)_kl|)²)^{1/2}}.
#[allow(non_snake_case)]
pub fn estimate_L(instance: &CoppInstance) -> f64 {
    let c_norm = instance.c().iter().map(|v| v * v).sum::<f64>().sqrt();
    let a_part = instance.matrices()[1..].iter().map(|ai| ai.max_abs().powi(2)).sum::<f64>().sqrt();
    c_norm.max(a_part)
}

/// How the index oracle solves its StQP subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoppOracleConfig {
    pub method: StqpMethod,
    /// Violation measure: each call targets G(x) − g(x; δ_k) ≤ αε.
    pub alpha: f64,
    /// Per-call failure probability for the sampling methods.
    pub phi: f64,
    /// Grid sampling draws at most this fraction of the grid.
    pub sample_fraction: f64,
    pub exact_cap: usize,
    /// Absolute cap on draws per call for the sampling methods.
    pub m_cap: u64,
    /// Largest grid the Grid method will enumerate.
    pub grid_budget: u64,
    /// Support budget of the exact solver.
    pub node_budget: u64,
}

impl CoppOracleConfig {
    pub fn exact() -> Self {
        Self::new(StqpMethod::Exact, 0.0)
    }

    pub fn new(method: StqpMethod, alpha: f64) -> Self {
        CoppOracleConfig {
            method,
            alpha,
            phi: 0.05,
            sample_fraction: 1.0,
            exact_cap: DEFAULT_EXACT_CAP,
            m_cap: DEFAULT_SAMPLE_CAP,
            grid_budget: DEFAULT_GRID_BUDGET,
            node_budget: DEFAULT_EXACT_NODE_BUDGET,
        }
    }

    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    /// Exact solves need α = 0; every other method needs α > 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be finite and nonnegative, got {}", self.alpha)));
        }
        match self.method {
            StqpMethod::Exact if self.alpha != 0.0 => Err(Error::InvalidArgument(format!(
                "the exact oracle solves subproblems exactly and needs alpha = 0, got {}",
                self.alpha
            ))),
            StqpMethod::Exact => Ok(()),
            _ if self.alpha == 0.0 => Err(Error::InvalidArgument(format!(
                "the {} oracle is inexact and needs alpha > 0",
                self.method.name()
            ))),
            _ => {
                if !(self.phi > 0.0 && self.phi < 1.0) {
                    return Err(Error::InvalidArgument(format!("phi must lie in (0, 1), got {}", self.phi)));
                }
                if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "sample fraction must lie in (0, 1], got {}",
                        self.sample_fraction
                    )));
                }
                Ok(())
            }
        }
    }
}

impl Default for CoppOracleConfig {
    fn default() -> Self {
        Self::exact()
    }
}

/// Solves min_δ δᵀQδ with the configured method at additive accuracy
/// `accuracy` (ignored by the exact method).
pub fn solve_subproblem<R: Rng + ?Sized>(
    q: &SymMatrix,
    config: &CoppOracleConfig,
    accuracy: f64,
    rng: &mut R,
) -> Result<StqpResult> {
    match config.method {
        StqpMethod::Exact => stqp_exact_with_budget(q, config.exact_cap, config.node_budget),
        StqpMethod::Grid => stqp_grid_with_budget(q, accuracy, config.grid_budget),
        StqpMethod::SimplexSample => {
            if q.is_zero() {
                return stqp_simplex_sample(q, accuracy, config.phi, rng, config.m_cap);
            }
            // Past √2·K(Q) any single draw is already within the target.
            let top = std::f64::consts::SQRT_2 * lipschitz_K(q)?;
            stqp_simplex_sample(q, accuracy.min(top), config.phi, rng, config.m_cap)
        }
        StqpMethod::GridSample => {
            stqp_grid_sample(q, accuracy, config.phi, config.sample_fraction, rng, config.m_cap)
        }
    }
}

/// A copositive program bound to an index oracle.
#[derive(Debug, Clone)]
pub struct CoppSip<'a> {
    instance: &'a CoppInstance,
    oracle: CoppOracleConfig,
    epsilon: f64,
    lipschitz: f64,
    rng: RngStream,
}

/// Binds `instance` to the configured StQP method; each oracle call runs
/// at accuracy αε.
pub fn build_sip<'a>(
    instance: &'a CoppInstance,
    oracle: CoppOracleConfig,
    epsilon: f64,
    rng: RngStream,
) -> Result<CoppSip<'a>> {
    oracle.validate()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::EpsilonRange { epsilon, upper: f64::INFINITY });
    }
    if oracle.method == StqpMethod::Exact && instance.n() > oracle.exact_cap {
        return Err(Error::ExactSolverCap { n: instance.n(), cap: oracle.exact_cap });
    }
    let lipschitz = estimate_L(instance);
    Ok(CoppSip { instance, oracle, epsilon, lipschitz, rng })
}

impl CoppSip<'_> {
    pub fn oracle(&self) -> &CoppOracleConfig {
        &self.oracle
    }
}

impl SipProblem for CoppSip<'_> {
    fn dim(&self) -> usize {
        self.instance.m()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.instance.c().iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn objective_subgradient(&self, _x: &[f64]) -> Vec<f64> {
        self.instance.c().to_vec()
    }

    fn constraint(&self, x: &[f64], delta: &SimplexPoint) -> f64 {
        copp_constraint_value(self.instance, x, delta).expect("dimensions checked at build time")
    }

    fn constraint_subgradient(&self, x: &[f64], delta: &SimplexPoint) -> Vec<f64> {
        copp_constraint_subgradient(self.instance, x, delta).expect("dimensions checked at build time")
    }

    fn index_oracle(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        let q = slack_matrix(self.instance, x)?;
        let res = solve_subproblem(&q, &self.oracle, self.oracle.alpha * self.epsilon, &mut self.rng)?;
        // Re-evaluate so g is exactly the constraint at the returned index.
        let g_value = -quadratic_form(&q, &res.minimizer)?;
        Ok(OracleAnswer { delta: res.minimizer, g_value, evaluations: res.evaluations })
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        self.instance.feasible_set().project(x)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Exact when n ≤ exact_cap, else the regular grid at accuracy ε/10,
    /// which underestimates G by at most ε/10.
    fn audit_max(&mut self, x: &[f64]) -> Option<(f64, AuditMethod)> {
        let q = slack_matrix(self.instance, x).ok()?;
        if self.instance.n() <= self.oracle.exact_cap {
            let res = stqp_exact_with_budget(&q, self.oracle.exact_cap, self.oracle.node_budget).ok()?;
            Some((-res.value, AuditMethod::Exact))
        } else {
            let res = stqp_grid_with_budget(&q, self.epsilon / 10.0, self.oracle.grid_budget).ok()?;
            Some((-res.value, AuditMethod::FineGrid))
        }
    }

    fn is_probabilistic(&self) -> bool {
        self.oracle.method.is_sampling()
    }
}
