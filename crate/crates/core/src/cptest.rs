//! Complete-positivity test.
//!
//! For ‖C‖_F = 1 the program
//!
//!   minimize ⟨C, X⟩  subject to  X copositive,  ‖X‖_F ≤ 1
//!
//! has a negative optimum exactly when C is not completely positive. The
//! subgradient method runs on it from X_1 = O with L = 1, and any iterate
//! with g(X_k; δ_k) ≤ ε and ⟨C, X_k⟩ < −n(1+α)ε certifies that C is not
//! completely positive.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::copositive::{solve_subproblem, CoppOracleConfig};
use crate::error::{Error, Result};
use crate::instance::project_ball;
use crate::matrix::{frobenius_inner, quadratic_form, SymMatrix};
use crate::report::{RunReport, Termination};
use crate::rng::RngStream;
use crate::simplex::SimplexPoint;
use crate::sip::{run, OracleAnswer, SipConfig, SipProblem};
use crate::stqp::stqp_exact_with_budget;

/// Tolerance on γ(X) in the exact separation check.
pub const SEPARATION_TOL: f64 = 1e-10;

/// C / ‖C‖_F.
pub fn normalize_input(c: &SymMatrix) -> Result<SymMatrix> {
    if c.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    Ok(c.scaled(1.0 / c.frobenius_norm()))
}

/// Projection onto the Frobenius ball of the given radius about O.
pub fn ball_projection(x: &SymMatrix, radius: f64) -> SymMatrix {
    let norm = x.frobenius_norm();
    if norm <= radius {
        x.clone()
    } else {
        x.scaled(radius / norm)
    }
}

/// −δδᵀ.
pub fn cp_constraint_subgradient(delta: &SimplexPoint) -> SymMatrix {
    let d = delta.coords();
    SymMatrix::from_upper_fn(d.len(), |i, j| -d[i] * d[j])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpTestConfig {
    /// Schedule constant t > 1; `None` picks 55 for n ≤ 6 and 15 otherwise.
    pub t: Option<f64>,
    /// Subproblem method and violation measure α.
    pub oracle: CoppOracleConfig,
    pub time_cap: Option<Duration>,
    /// Overrides N = ⌈t²(1+α)²n²⌉.
    pub max_iterations: Option<usize>,
}

impl CpTestConfig {
    pub fn new(oracle: CoppOracleConfig) -> Self {
        CpTestConfig { t: None, oracle, time_cap: None, max_iterations: None }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.oracle.alpha
    }

    pub fn t_for(&self, n: usize) -> f64 {
        self.t.unwrap_or(if n <= 6 { 55.0 } else { 15.0 })
    }
}

impl Default for CpTestConfig {
    fn default() -> Self {
        Self::new(CoppOracleConfig::exact())
    }
}

/// ε = 1/(t·n·(1+α)).
pub fn cp_epsilon(n: usize, t: f64, alpha: f64) -> f64 {
    1.0 / (t * n as f64 * (1.0 + alpha))
}

/// N = ⌈t²(1+α)²n²⌉.
pub fn cp_iterations(n: usize, t: f64, alpha: f64) -> usize {
    (t * (1.0 + alpha) * n as f64).powi(2).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NotCompletelyPositive,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpVerdict {
    pub verdict: Verdict,
    /// ⟨C, X⟩ at the certificate, or at the best iterate with g ≤ ε.
    pub objective: f64,
    #[serde(rename = "epsilon")]
    pub epsilon_used: f64,
    pub n: usize,
    pub t: f64,
    pub alpha: f64,
    #[serde(rename = "iterations")]
    pub iterations_used: usize,
    /// The iterate X_k that triggered the certificate.
    pub certificate: Option<SymMatrix>,
    /// g(X_k; δ_k) at the certificate.
    pub certificate_violation: Option<f64>,
    /// X + τ·eeᵀ with τ = max(0, −γ(X)), a matrix with γ ≥ 0; computed
    /// when the exact solver is affordable.
    pub separating_matrix: Option<SymMatrix>,
    /// Whether `separating_matrix` is copositive up to `SEPARATION_TOL`
    /// and has a negative inner product with C.
    pub exact_separation: Option<bool>,
}

struct CpProblem {
    c: SymMatrix,
    oracle: CoppOracleConfig,
    epsilon: f64,
    rng: RngStream,
}

impl CpProblem {
    fn matrix(&self, x: &[f64]) -> SymMatrix {
        SymMatrix::from_flat(self.c.n(), x).expect("iterates stay finite")
    }
}

impl SipProblem for CpProblem {
    fn dim(&self) -> usize {
        self.c.n() * self.c.n()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.c.as_slice().iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn objective_subgradient(&self, _x: &[f64]) -> Vec<f64> {
        self.c.as_slice().to_vec()
    }

    fn constraint(&self, x: &[f64], delta: &SimplexPoint) -> f64 {
        -quadratic_form(&self.matrix(x), delta).expect("dimensions agree")
    }

    fn constraint_subgradient(&self, _x: &[f64], delta: &SimplexPoint) -> Vec<f64> {
        cp_constraint_subgradient(delta).as_slice().to_vec()
    }

    fn index_oracle(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        let q = self.matrix(x);
        let res = solve_subproblem(&q, &self.oracle, self.oracle.alpha * self.epsilon, &mut self.rng)?;
        let g_value = -quadratic_form(&q, &res.minimizer)?;
        Ok(OracleAnswer { delta: res.minimizer, g_value, evaluations: res.evaluations })
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        project_ball(x, &vec![0.0; x.len()], 1.0)
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn is_probabilistic(&self) -> bool {
        self.oracle.method.is_sampling()
    }
}

/// Runs the test; returns the verdict and the underlying run log.
pub fn test_cp_with_report(c: &SymMatrix, config: &CpTestConfig, rng: RngStream) -> Result<(CpVerdict, Option<RunReport>)> {
    config.oracle.validate()?;
    let n = c.n();
    let alpha = config.alpha();
    let t = config.t_for(n);
    if !(t > 1.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("schedule constant t must exceed 1, got {t}")));
    }
    let epsilon = cp_epsilon(n, t, alpha);
    let mut verdict = CpVerdict {
        verdict: Verdict::Inconclusive,
        objective: 0.0,
        epsilon_used: epsilon,
        n,
        t,
        alpha,
        iterations_used: 0,
        certificate: None,
        certificate_violation: None,
        separating_matrix: None,
        exact_separation: None,
    };
    let c = match normalize_input(c) {
        Ok(c) => c,
        // O is completely positive; nothing to certify.
        Err(Error::ZeroMatrix) => return Ok((verdict, None)),
        Err(e) => return Err(e),
    };

    let threshold = -(n as f64) * (1.0 + alpha) * epsilon;
    let max_iterations = config.max_iterations.unwrap_or_else(|| cp_iterations(n, t, alpha));
    let mut sip_config = SipConfig::new(epsilon, alpha, max_iterations)
        .with_early_exit(move |_, _, g, f| g <= epsilon && f < threshold);
    sip_config.time_cap = config.time_cap;
    let mut problem = CpProblem { c: c.clone(), oracle: config.oracle.clone(), epsilon, rng };
    let report = run(&mut problem, &vec![0.0; n * n], sip_config)?;

    verdict.iterations_used = report.iterations.len();
    if report.terminated_by == Termination::CertificateFound {
        let last = report.iterations.last().expect("certificate run has iterations");
        // Earlier iterates with g ≤ ε all sat above the threshold, so the
        // trigger iterate is the new k*.
        debug_assert_eq!(report.k_star, Some(last.k));
        let cert = SymMatrix::from_flat(n, report.x_kstar.as_ref().expect("trigger iterate is feasible"))?;
        verdict.verdict = Verdict::NotCompletelyPositive;
        verdict.objective = last.f_value;
        verdict.certificate_violation = Some(last.g_value);
        if n <= config.oracle.exact_cap {
            let (shifted, separated) = exact_separation(&c, &cert, config.oracle.exact_cap, config.oracle.node_budget)?;
            verdict.separating_matrix = Some(shifted);
            verdict.exact_separation = Some(separated);
        }
        verdict.certificate = Some(cert);
    } else {
        verdict.objective = report.f_at_kstar.unwrap_or(0.0);
    }
    Ok((verdict, Some(report)))
}

/// Runs the test on `c` (normalized internally).
pub fn test_cp(c: &SymMatrix, config: &CpTestConfig, rng: RngStream) -> Result<CpVerdict> {
    Ok(test_cp_with_report(c, config, rng)?.0)
}

/// Shifts X by τ·eeᵀ, τ = max(0, −γ(X)), so that γ becomes nonnegative,
/// then checks copositivity of the shift exactly and the sign of its inner
/// product with C.
pub fn exact_separation(c: &SymMatrix, x: &SymMatrix, cap: usize, node_budget: u64) -> Result<(SymMatrix, bool)> {
    let n = x.n();
    let gamma = stqp_exact_with_budget(x, cap, node_budget)?.value;
    let tau = (-gamma).max(0.0);
    let mut shifted = x.clone();
    shifted.add_scaled(tau, &SymMatrix::from_upper_fn(n, |_, _| 1.0))?;
    let gamma_shifted = stqp_exact_with_budget(&shifted, cap, node_budget)?.value;
    let separated = gamma_shifted >= -SEPARATION_TOL && frobenius_inner(c, &shifted)? < 0.0;
    Ok((shifted, separated))
}
