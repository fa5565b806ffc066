//! Dense symmetric matrices and the two inner products everything else is
//! built on.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::simplex::SimplexPoint;

/// Largest asymmetry |a_ij - a_ji| tolerated when loading a matrix from text.
pub const FILE_SYMMETRY_TOL: f64 = 1e-8;

/// Dense real symmetric matrix stored row-major.
///
/// Entries are exactly symmetric and finite. Constructors average the two
/// triangles, so `a[(i, j)] == a[(j, i)]` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle and
    /// mirrored.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds a matrix from a row-major buffer of length n², symmetrizing
    /// by averaging mirrored entries.
    pub fn from_flat(n: usize, flat: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("matrix order must be positive".into()));
        }
        check_dim(n * n, flat.len())?;
        if let Some(bad) = flat.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite matrix entry {bad}")));
        }
        let mut m = Self { n, data: flat.to_vec() };
        m.symmetrize();
        Ok(m)
    }

    /// Builds a matrix from rows, symmetrizing by averaging.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            flat.extend_from_slice(row);
        }
        Self::from_flat(n, &flat)
    }

    /// Like [`SymMatrix::from_rows`] but rejects inputs whose asymmetry
    /// exceeds `tol`.
    pub fn from_rows_checked(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            check_dim(n, row.len())?;
            for j in 0..i {
                let gap = (row[j] - rows[j][i]).abs();
                if gap > tol {
                    return Err(Error::Format(format!(
                        "matrix not symmetric at ({i}, {j}): |{} - {}| = {gap:e}",
                        row[j], rows[j][i]
                    )));
                }
            }
        }
        Self::from_rows(rows)
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Row-major view of all n² entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.get(i, i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Euclidean norm of column `j`.
    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j).powi(2)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * t).collect() }
    }

    /// `self += t * other`.
    pub fn add_scaled(&mut self, t: f64, other: &SymMatrix) -> Result<()> {
        check_dim(self.n, other.n)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += t * b;
        }
        Ok(())
    }

    /// The matrix-vector product `Q v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Reads the plain-text matrix format: a line with `n`, then n rows of n
    /// whitespace-separated decimals.
    pub fn read_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty matrix file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Format(format!("bad matrix order line {header:?}")))?;
        if n == 0 {
            return Err(Error::Format("matrix order must be positive".into()));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("expected {n} rows, found {i}")))?;
            let row = line
                .split_whitespace()
                .map(|tok| tok.parse::<f64>().map_err(|_| Error::Format(format!("bad number {tok:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Format(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(Error::Format("trailing data after matrix rows".into()));
        }
        Self::from_rows_checked(&rows, FILE_SYMMETRY_TOL)
    }

    /// Writes the plain-text format with 17 significant digits per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.n).unwrap();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_checked(&rows, FILE_SYMMETRY_TOL)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

/// ⟨A, B⟩ = Σ_ij A_ij B_ij.
pub fn frobenius_inner(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    check_dim(a.n, b.n)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// δᵀ Q δ.
pub fn quadratic_form(q: &SymMatrix, d: &SimplexPoint) -> Result<f64> {
    check_dim(q.n, d.n())?;
    Ok(quadratic_form_raw(q, d.coords()))
}

/// δᵀ Q δ for an arbitrary vector of matching length, skipping zero
/// coordinates.
pub(crate) fn quadratic_form_raw(q: &SymMatrix, v: &[f64]) -> f64 {
    let n = q.n;
    let mut total = 0.0;
    for i in 0..n {
        let vi = v[i];
        if vi == 0.0 {
            continue;
        }
        let row = q.row(i);
        let mut acc = 0.0;
        for j in 0..n {
            acc += row[j] * v[j];
        }
        total += vi * acc;
    }
    total
}
