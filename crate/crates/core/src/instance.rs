//! Copositive program instances and their JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrix::SymMatrix;

/// The closed convex set S the decision vector is restricted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeasibleSet {
    #[default]
    WholeSpace,
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Componentwise bounds; `null` in JSON means unbounded on that side.
    Box {
        #[serde(with = "lower_bounds")]
        lower: Vec<f64>,
        #[serde(with = "upper_bounds")]
        upper: Vec<f64>,
    },
    NonnegativeOrthant,
}

impl FeasibleSet {
    /// Checks the descriptor against the variable dimension `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            FeasibleSet::WholeSpace | FeasibleSet::NonnegativeOrthant => Ok(()),
            FeasibleSet::Ball { center, radius } => {
                check_dim(m, center.len())?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
                }
                Ok(())
            }
            FeasibleSet::Box { lower, upper } => {
                check_dim(m, lower.len())?;
                check_dim(m, upper.len())?;
                for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
                    if lo.is_nan() || hi.is_nan() || lo > hi || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY {
                        return Err(Error::InvalidArgument(format!("box bounds invalid at {i}: [{lo}, {hi}]")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Euclidean projection P_S(x).
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::WholeSpace => x.to_vec(),
            FeasibleSet::NonnegativeOrthant => x.iter().map(|v| v.max(0.0)).collect(),
            FeasibleSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect()
            }
            FeasibleSet::Ball { center, radius } => project_ball(x, center, *radius),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let p = self.project(x);
        x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= tol
    }
}

pub(crate) fn project_ball(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let dist = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
    if dist <= radius {
        return x.to_vec();
    }
    let t = radius / dist;
    x.iter().zip(center).map(|(a, c)| c + (a - c) * t).collect()
}

mod lower_bounds {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)).collect())
    }
}

mod upper_bounds {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
    }
}

/// minimize cᵀx subject to A_0 + Σ x_i A_i copositive and x ∈ S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct CoppInstance {
    m: usize,
    n: usize,
    c: Vec<f64>,
    a: Vec<SymMatrix>,
    feasible_set: FeasibleSet,
}

impl CoppInstance {
    /// `a` holds A_0, A_1, …, A_m.
    pub fn new(c: Vec<f64>, a: Vec<SymMatrix>, feasible_set: FeasibleSet) -> Result<Self> {
        let m = c.len();
        check_dim(m + 1, a.len())?;
        let n = a[0].n();
        for ai in &a {
            check_dim(n, ai.n())?;
        }
        if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite objective coefficient {bad}")));
        }
        feasible_set.validate(m)?;
        Ok(Self { m, n, c, a, feasible_set })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// A_0 … A_m.
    pub fn matrices(&self) -> &[SymMatrix] {
        &self.a
    }

    pub fn feasible_set(&self) -> &FeasibleSet {
        &self.feasible_set
    }

    pub fn with_feasible_set(mut self, s: FeasibleSet) -> Result<Self> {
        s.validate(self.m)?;
        self.feasible_set = s;
        Ok(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    m: usize,
    n: usize,
    c: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<SymMatrix>,
    #[serde(default)]
    feasible_set: FeasibleSet,
}

impl TryFrom<RawInstance> for CoppInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let inst = CoppInstance::new(raw.c, raw.a, raw.feasible_set)?;
        check_dim(raw.m, inst.m)?;
        check_dim(raw.n, inst.n)?;
        Ok(inst)
    }
}

impl From<CoppInstance> for RawInstance {
    fn from(i: CoppInstance) -> Self {
        RawInstance { m: i.m, n: i.n, c: i.c, a: i.a, feasible_set: i.feasible_set }
    }
}
