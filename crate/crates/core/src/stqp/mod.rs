//! Standard quadratic programming: γ(Q) = min { δᵀQδ : δ ∈ Δ^{n-1} }.
//!
//! Four interchangeable subsolvers share [`StqpResult`]:
//!
//! * [`stqp_exact`]: global optimum by pruned support enumeration.
//! * [`stqp_grid`]: exhaustive search of the regular grid Δ_r^{n-1}, with a
//!   deterministic additive error of at most ε.
//! * [`stqp_simplex_sample`]: best of M uniform draws from the simplex.
//! * [`stqp_grid_sample`]: best of M uniform draws from the regular grid.
//!
//! [`export_milp`] writes the mixed-integer reformulation as an LP file for
//! external solvers.

mod bounds;
mod exact;
mod grid;
mod milp;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::simplex::SimplexPoint;

pub use bounds::{lipschitz_K, lower_bound_gamma};
pub use exact::{stqp_exact, stqp_exact_with_budget, DEFAULT_EXACT_CAP, DEFAULT_EXACT_NODE_BUDGET};
pub use grid::{
    binomial, grid_enumerate, grid_neighborhood, grid_quadratic_form, grid_resolution_for, grid_size,
    stqp_grid, stqp_grid_with_budget, GridIter, DEFAULT_GRID_BUDGET,
};
pub use milp::{export_milp, milp_lp_string};
pub use sampling::{
    grid_sample_plan, sample_count, sample_grid_uniform, sample_simplex_uniform, simplex_sample_plan,
    stqp_grid_sample, stqp_simplex_sample, SampleBranch, SamplePlan, DEFAULT_SAMPLE_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StqpMethod {
    Exact,
    Grid,
    SimplexSample,
    GridSample,
}

impl StqpMethod {
    pub const ALL: [StqpMethod; 4] =
        [StqpMethod::Exact, StqpMethod::Grid, StqpMethod::SimplexSample, StqpMethod::GridSample];

    pub fn is_sampling(self) -> bool {
        matches!(self, StqpMethod::SimplexSample | StqpMethod::GridSample)
    }

    pub fn name(self) -> &'static str {
        match self {
            StqpMethod::Exact => "exact",
            StqpMethod::Grid => "grid",
            StqpMethod::SimplexSample => "simplex-sample",
            StqpMethod::GridSample => "grid-sample",
        }
    }
}

impl std::str::FromStr for StqpMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        StqpMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected exact, grid, simplex-sample or grid-sample)"))
    }
}

/// Outcome of any StQP subsolver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StqpResult {
    pub minimizer: SimplexPoint,
    pub value: f64,
    pub method: StqpMethod,
    /// Quadratic-form evaluations (candidate faces for the exact solver).
    pub evaluations: u64,
    /// Grid resolution, for the grid-based methods.
    pub r: Option<u64>,
    /// Sample count, for the sampling methods.
    #[serde(rename = "M")]
    pub m: Option<u64>,
    /// True when a sample cap kept M below the count its probabilistic
    /// guarantee needs.
    #[serde(default)]
    pub clamped: bool,
}
