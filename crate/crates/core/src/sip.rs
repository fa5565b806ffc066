//! Inexact projected subgradient method for convex semi-infinite programs
//!
//!   minimize f(x)  subject to  g(x; δ) ≤ 0 for all δ ∈ Δ,  x ∈ S,
//!
//! driven by an index oracle that approximately maximizes g(x; ·).

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{AuditMethod, Branch, IterationRecord, RunReport, Termination, RUN_SCHEMA};
use crate::simplex::SimplexPoint;

/// Index returned by the oracle together with g(x; δ) at that index.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAnswer {
    pub delta: SimplexPoint,
    pub g_value: f64,
    /// Work spent by the subsolver (quadratic-form evaluations).
    pub evaluations: u64,
}

pub trait SipProblem {
    fn dim(&self) -> usize;
    fn objective(&self, x: &[f64]) -> f64;
    fn objective_subgradient(&self, x: &[f64]) -> Vec<f64>;
    fn constraint(&self, x: &[f64], delta: &SimplexPoint) -> f64;
    fn constraint_subgradient(&self, x: &[f64], delta: &SimplexPoint) -> Vec<f64>;
    /// δ with G(x) − g(x; δ) within the oracle's accuracy target.
    fn index_oracle(&mut self, x: &[f64]) -> Result<OracleAnswer>;
    /// Euclidean projection onto S.
    fn project(&self, x: &[f64]) -> Vec<f64>;
    /// Bound on the norms of all subgradients of f and g(·; δ).
    fn lipschitz(&self) -> f64;

    /// High-accuracy value of G(x) = max_δ g(x; δ), when one is available.
    fn audit_max(&mut self, _x: &[f64]) -> Option<(f64, AuditMethod)> {
        None
    }

    fn is_probabilistic(&self) -> bool {
        false
    }
}

pub type EarlyExit = Box<dyn FnMut(usize, &[f64], f64, f64) -> bool>;

pub struct SipConfig {
    pub epsilon: f64,
    pub alpha: f64,
    pub max_iterations: usize,
    pub time_cap: Option<Duration>,
    /// Called as (k, x_k, g_k, f(x_k)) before the step from x_k; true
    /// stops the run with x_k as a certificate.
    pub early_exit: Option<EarlyExit>,
    /// Keep x_1, …, x_{K+1} in the report.
    pub record_points: bool,
}

impl SipConfig {
    pub fn new(epsilon: f64, alpha: f64, max_iterations: usize) -> Self {
        SipConfig { epsilon, alpha, max_iterations, time_cap: None, early_exit: None, record_points: false }
    }

    pub fn with_time_cap(mut self, cap: Duration) -> Self {
        self.time_cap = Some(cap);
        self
    }

    pub fn with_early_exit(mut self, f: impl FnMut(usize, &[f64], f64, f64) -> bool + 'static) -> Self {
        self.early_exit = Some(Box::new(f));
        self
    }

    pub fn recording_points(mut self) -> Self {
        self.record_points = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::EpsilonRange { epsilon: self.epsilon, upper: f64::INFINITY });
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be finite and nonnegative, got {}", self.alpha)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

impl std::fmt::Debug for SipConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SipConfig")
            .field("epsilon", &self.epsilon)
            .field("alpha", &self.alpha)
            .field("max_iterations", &self.max_iterations)
            .field("time_cap", &self.time_cap)
            .field("early_exit", &self.early_exit.is_some())
            .field("record_points", &self.record_points)
            .finish()
    }
}

/// ⌈L²·dist²/ε²⌉, at least 1; saturates at `u64::MAX`.
pub fn iteration_bound(lipschitz: f64, dist_bound: f64, epsilon: f64) -> u64 {
    let raw = ((lipschitz * dist_bound) / epsilon).powi(2).ceil();
    if raw >= u64::MAX as f64 {
        u64::MAX
    } else {
        (raw as u64).max(1)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// P_S(x − (numerator / ‖d‖²)·d).
pub fn subgradient_step(
    x: &[f64],
    d: &[f64],
    step_numerator: f64,
    project: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let dd = norm_sq(d);
    if dd == 0.0 {
        if step_numerator != 0.0 {
            return Err(Error::ZeroSubgradient { numerator: step_numerator });
        }
        return Ok(project(x));
    }
    let scale = step_numerator / dd;
    let moved: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi - scale * di).collect();
    Ok(project(&moved))
}

/// Runs the method from `x1` for at most `config.max_iterations` steps.
pub fn run<P: SipProblem + ?Sized>(problem: &mut P, x1: &[f64], mut config: SipConfig) -> Result<RunReport> {
    config.validate()?;
    crate::error::check_dim(problem.dim(), x1.len())?;
    let eps = config.epsilon;
    let start = Instant::now();

    let mut x = problem.project(x1);
    let start_projected = x.as_slice() != x1;
    let mut points = config.record_points.then(|| vec![x.clone()]);
    let mut iterations = Vec::new();
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut terminated_by = Termination::IterationCap;

    for k in 1..=config.max_iterations {
        if let Some(cap) = config.time_cap {
            if k > 1 && start.elapsed() >= cap {
                terminated_by = Termination::TimeCap;
                break;
            }
        }
        let answer = problem.index_oracle(&x).map_err(|e| Error::Oracle { iteration: k, source: Box::new(e) })?;
        let g = answer.g_value;
        let f = problem.objective(&x);
        let branch = if g <= eps { Branch::Objective } else { Branch::Constraint };

        if branch == Branch::Objective && best.as_ref().is_none_or(|(_, bf, _)| f < *bf) {
            best = Some((k, f, x.clone()));
        }

        let stop = config.early_exit.as_mut().is_some_and(|exit| exit(k, &x, g, f));
        if !stop {
            x = match branch {
                Branch::Objective => {
                    let d = problem.objective_subgradient(&x);
                    if norm_sq(&d) == 0.0 {
                        // f is constant along every direction; x is already optimal.
                        x
                    } else {
                        subgradient_step(&x, &d, eps, |y| problem.project(y))?
                    }
                }
                Branch::Constraint => {
                    let d = problem.constraint_subgradient(&x, &answer.delta);
                    subgradient_step(&x, &d, g, |y| problem.project(y))?
                }
            };
            if let Some(points) = points.as_mut() {
                points.push(x.clone());
            }
        }
        iterations.push(IterationRecord {
            k,
            branch,
            g_value: g,
            f_value: f,
            subproblem_evals: answer.evaluations,
            elapsed: start.elapsed().as_secs_f64(),
        });
        if stop {
            terminated_by = Termination::CertificateFound;
            break;
        }
    }

    let (k_star, f_at_kstar, x_kstar) = match best {
        Some((k, f, xk)) => (Some(k), Some(f), Some(xk)),
        None => (None, None, None),
    };
    let audit = x_kstar.as_ref().and_then(|xk| problem.audit_max(xk));
    Ok(RunReport {
        schema: RUN_SCHEMA.to_string(),
        epsilon: eps,
        alpha: config.alpha,
        lipschitz: problem.lipschitz(),
        iterations,
        k_star,
        f_at_kstar,
        g_check: audit.map(|(v, _)| v),
        g_check_method: audit.map(|(_, m)| m),
        x_kstar,
        terminated_by,
        probabilistic: problem.is_probabilistic(),
        start_projected,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// Margins of the two guarantees: ε − (f(x_{k*}) − f*) and (1+α)ε − G(x_{k*}).
/// Negative margins are violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub status: CheckStatus,
    pub objective_margin: Option<f64>,
    pub constraint_margin: Option<f64>,
}

/// Checks f(x_{k*}) ≤ f* + ε and G(x_{k*}) ≤ (1+α)ε, given an upper bound
/// `f_star_bound` ≥ f*.
pub fn theorem_check(report: &RunReport, f_star_bound: f64, epsilon: f64, alpha: f64) -> CheckResult {
    let objective_margin = report.f_at_kstar.map(|f| epsilon - (f - f_star_bound));
    let constraint_margin = report.g_check.map(|g| (1.0 + alpha) * epsilon - g);
    let status = match (objective_margin, constraint_margin) {
        (Some(o), _) if o < 0.0 => CheckStatus::Fail,
        (_, Some(c)) if c < 0.0 => CheckStatus::Fail,
        (Some(_), Some(_)) => CheckStatus::Pass,
        _ => CheckStatus::Inconclusive,
    };
    CheckResult { status, objective_margin, constraint_margin }
}
