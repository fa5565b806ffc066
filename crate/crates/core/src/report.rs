//! Per-iteration log of a subgradient run and its JSON form.

use serde::{Deserialize, Serialize};

pub const RUN_SCHEMA: &str = "coposolve/run/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Objective,
    Constraint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    IterationCap,
    TimeCap,
    CertificateFound,
}

/// How the post-run constraint audit at x_{k*} was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMethod {
    Exact,
    /// Finer regular grid; a lower estimate of the true maximum violation.
    FineGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub k: usize,
    pub branch: Branch,
    pub g_value: f64,
    pub f_value: f64,
    pub subproblem_evals: u64,
    /// Seconds since the run started, measured after this iteration's step.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub epsilon: f64,
    pub alpha: f64,
    pub lipschitz: f64,
    pub iterations: Vec<IterationRecord>,
    /// Minimizer of f over I_N = {k : g_k ≤ ε}; smallest k on ties.
    pub k_star: Option<usize>,
    pub f_at_kstar: Option<f64>,
    #[serde(rename = "G_check")]
    pub g_check: Option<f64>,
    pub g_check_method: Option<AuditMethod>,
    pub x_kstar: Option<Vec<f64>>,
    pub terminated_by: Termination,
    /// True when the index oracle only meets its accuracy target with
    /// high probability.
    pub probabilistic: bool,
    /// Set when the starting point was outside S and had to be projected.
    pub start_projected: bool,
    /// x_1, …, x_{K+1} when point recording was requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<Vec<f64>>>,
}

impl RunReport {
    /// Indices k ∈ I_N.
    pub fn feasible_indices(&self, epsilon: f64) -> impl Iterator<Item = usize> + '_ {
        self.iterations.iter().filter(move |r| r.g_value <= epsilon).map(|r| r.k)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
