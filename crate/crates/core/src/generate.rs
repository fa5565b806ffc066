//! Random instance families used by the experiments.

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CoppInstance, FeasibleSet};
use crate::matrix::SymMatrix;
use crate::rng::RngStream;

/// Upper triangle i.i.d. uniform on [−1, 1], mirrored.
pub fn gen_stqp_instance(n: usize, rng: &mut RngStream) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(SymMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..=1.0)))
}

/// Number of variables in the chi-distribution family.
pub const COPP_FAMILY_M: usize = 5;

/// Five-variable copositive program with optimal value 0 at x = 0.
///
/// c has chi(1) entries. A_0 is zero on the first five diagonal positions
/// and chi(1) + 0.01 elsewhere. A_i has a 1 at (i, i), zeros on the other
/// first-five diagonal positions and standard normal entries elsewhere.
/// Entries are drawn in the order c, A_0, A_1, …, A_5, each matrix row by
/// row over its upper triangle.
pub fn gen_copp_instance(n: usize, rng: &mut RngStream) -> Result<CoppInstance> {
    let m = COPP_FAMILY_M;
    if n < m {
        return Err(Error::Dimension { expected: m, found: n });
    }
    let c: Vec<f64> = (0..m).map(|_| rng.chi1()).collect();
    let head = |i: usize, j: usize| i == j && i < m;
    let mut a = Vec::with_capacity(m + 1);
    a.push(SymMatrix::from_upper_fn(n, |i, j| if head(i, j) { 0.0 } else { rng.chi1() + 0.01 }));
    for k in 0..m {
        a.push(SymMatrix::from_upper_fn(n, |i, j| {
            if head(i, j) {
                if i == k {
                    1.0
                } else {
                    0.0
                }
            } else {
                rng.standard_normal()
            }
        }));
    }
    CoppInstance::new(c, a, FeasibleSet::WholeSpace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CpKind {
    /// BBᵀ with B a rows × cols matrix of i.i.d. |N(0, 1)| entries.
    CpProduct { rows: usize, cols: usize },
    FromFile(PathBuf),
}

pub fn gen_cp_instance(kind: &CpKind, rng: &mut RngStream) -> Result<SymMatrix> {
    match kind {
        CpKind::CpProduct { rows, cols } => {
            if *rows == 0 || *cols == 0 {
                return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
            }
            let b: Vec<Vec<f64>> = (0..*rows).map(|_| (0..*cols).map(|_| rng.chi1()).collect()).collect();
            Ok(SymMatrix::from_upper_fn(*rows, |i, j| b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum()))
        }
        CpKind::FromFile(path) => SymMatrix::load(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copositive::{estimate_L, slack_matrix};
    use crate::sip::iteration_bound;
    use crate::stqp::stqp_exact;
    use nalgebra::DMatrix;

    #[test]
    fn stqp_instances() {
        let q = gen_stqp_instance(5, &mut RngStream::new(0)).unwrap();
        assert!(q.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(q, gen_stqp_instance(5, &mut RngStream::new(0)).unwrap());
        let mut rng = RngStream::new(1);
        let mut total = 0.0;
        let mut count = 0;
        while count < 10_000 {
            let q = gen_stqp_instance(10, &mut rng).unwrap();
            for i in 0..10 {
                for j in i..10 {
                    total += q.get(i, j);
                    count += 1;
                }
            }
        }
        assert!((total / count as f64).abs() < 0.02);
    }

    #[test]
    fn copp_family_structure() {
        assert!(matches!(gen_copp_instance(4, &mut RngStream::new(0)), Err(Error::Dimension { .. })));
        for seed in 0..5 {
            let inst = gen_copp_instance(7, &mut RngStream::new(seed)).unwrap();
            assert_eq!(inst.m(), 5);
            assert!(inst.c().iter().all(|&v| v >= 0.0));
            let a0 = &inst.matrices()[0];
            for i in 0..7 {
                for j in 0..7 {
                    if i == j && i < 5 {
                        assert_eq!(a0.get(i, j), 0.0);
                    } else {
                        assert!(a0.get(i, j) >= 0.01);
                    }
                }
            }
            for k in 1..=5 {
                for i in 0..5 {
                    assert_eq!(inst.matrices()[k].get(i, i), if i + 1 == k { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn zero_is_feasible() {
        for n in 5..=8 {
            let inst = gen_copp_instance(n, &mut RngStream::new(n as u64)).unwrap();
            let a0 = slack_matrix(&inst, &[0.0; 5]).unwrap();
            assert!(stqp_exact(&a0, 22).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn iteration_cap_formula() {
        for seed in 0..10 {
            let inst = gen_copp_instance(5, &mut RngStream::new(seed)).unwrap();
            let l = estimate_L(&inst);
            assert!(l.is_finite() && l > 0.0);
            let eps = 0.2;
            // Equal up to rounding of √5·√5.
            let formula = (5.0 * l * l / (eps * eps)).ceil() as u64;
            assert!(iteration_bound(l, 5f64.sqrt(), eps).abs_diff(formula) <= 1);
        }
    }

    #[test]
    fn cp_products() {
        let mut rng = RngStream::new(2);
        let c = gen_cp_instance(&CpKind::CpProduct { rows: 3, cols: 5 }, &mut rng).unwrap();
        assert!(c.as_slice().iter().all(|&v| v >= 0.0));
        let mut m = DMatrix::from_row_slice(3, 3, c.as_slice());
        for i in 0..3 {
            m[(i, i)] += 1e-12;
        }
        assert!(m.cholesky().is_some());

        let r1 = gen_cp_instance(&CpKind::CpProduct { rows: 2, cols: 1 }, &mut rng).unwrap();
        let det = r1.get(0, 0) * r1.get(1, 1) - r1.get(0, 1).powi(2);
        assert!(det.abs() <= 1e-12 * r1.max_abs().powi(2));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        c.save(&path).unwrap();
        assert_eq!(gen_cp_instance(&CpKind::FromFile(path), &mut rng).unwrap(), c);
    }
}
