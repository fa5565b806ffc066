//! Points of the standard simplex and of its regular grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates below this are treated as rounding noise and clipped to 0;
/// the coordinate sum is renormalized to 1.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point δ of the standard simplex Δ^{n-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates and renormalizes `coords`. Entries in `[-1e-12, 0)` are
    /// clipped; anything more negative is rejected.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("simplex point needs at least one coordinate".into()));
        }
        for c in coords.iter_mut() {
            if !c.is_finite() || *c < -SIMPLEX_TOL {
                return Err(Error::InvalidArgument(format!("invalid simplex coordinate {c}")));
            }
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidArgument("simplex coordinates sum to zero".into()));
        }
        if (sum - 1.0).abs() > 0.0 {
            for c in coords.iter_mut() {
                *c /= sum;
            }
        }
        Ok(Self { coords })
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Self { coords }
    }

    pub fn barycenter(n: usize) -> Self {
        Self { coords: vec![1.0 / n as f64; n] }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.coords
    }
}

/// A point of the regular grid Δ_r^{n-1}, stored as integer numerators that
/// sum to `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    r: u64,
    numerators: Vec<u64>,
}

impl GridPoint {
    pub fn new(r: u64, numerators: Vec<u64>) -> Result<Self> {
        if r == 0 || numerators.is_empty() {
            return Err(Error::InvalidArgument("grid point needs r >= 1 and n >= 1".into()));
        }
        let sum = numerators.iter().try_fold(0u64, |acc, &a| acc.checked_add(a));
        if sum != Some(r) {
            return Err(Error::InvalidArgument(format!("grid numerators {numerators:?} do not sum to {r}")));
        }
        Ok(Self { r, numerators })
    }

    /// r·e_i.
    pub fn vertex(n: usize, r: u64, i: usize) -> Self {
        let mut numerators = vec![0; n];
        numerators[i] = r;
        Self { r, numerators }
    }

    pub(crate) fn from_parts_unchecked(r: u64, numerators: Vec<u64>) -> Self {
        debug_assert_eq!(numerators.iter().sum::<u64>(), r);
        Self { r, numerators }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.numerators.len()
    }

    #[inline]
    pub fn r(&self) -> u64 {
        self.r
    }

    #[inline]
    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn to_simplex(&self) -> SimplexPoint {
        let r = self.r as f64;
        SimplexPoint { coords: self.numerators.iter().map(|&a| a as f64 / r).collect() }
    }
}
