//! Mixed-integer reformulation of the StQP, written in CPLEX LP format.
//!
//!   minimize    v
//!   subject to  e_jᵀQδ − v − z_j ≤ 0          (j = 1..n)
//!               Σ δ_j = 1
//!               δ_j − y_j ≤ 0                 (j = 1..n)
//!               z_j + M_j y_j ≤ M_j           (j = 1..n)
//!               δ, z ≥ 0,  y ∈ {0,1}ⁿ,  v free
//!
//! with M_j = max_i Q_ij − γ̲(Q). The optimal v is γ(Q).

use std::fmt::Write as _;
use std::path::Path;

use super::lower_bound_gamma;
use crate::error::Result;
use crate::matrix::SymMatrix;

const TERMS_PER_LINE: usize = 8;

fn push_term(line: &mut String, coef: f64, name: &str, first: bool) {
    let sign = if coef < 0.0 { "-" } else if first { "" } else { "+" };
    let mag = coef.abs();
    if !first || sign == "-" {
        line.push(' ');
    }
    line.push_str(sign);
    if mag == 1.0 {
        let _ = write!(line, " {name}");
    } else {
        let _ = write!(line, " {mag:?} {name}");
    }
}

fn write_row(out: &mut String, label: &str, terms: &[(f64, String)], sense: &str, rhs: f64) {
    let mut line = format!(" {label}:");
    let mut first = true;
    for (count, (coef, name)) in terms.iter().filter(|(c, _)| *c != 0.0).enumerate() {
        if count > 0 && count % TERMS_PER_LINE == 0 {
            out.push_str(&line);
            out.push('\n');
            line = "   ".to_string();
        }
        push_term(&mut line, *coef, name, first);
        first = false;
    }
    let _ = writeln!(out, "{line} {sense} {rhs:?}");
}

/// The LP-format text of the MILP for `q`.
pub fn milp_lp_string(q: &SymMatrix) -> String {
    let n = q.n();
    let gamma_lb = lower_bound_gamma(q);
    let d = |j: usize| format!("d{}", j + 1);
    let z = |j: usize| format!("z{}", j + 1);
    let y = |j: usize| format!("y{}", j + 1);

    let mut out = String::new();
    let _ = writeln!(out, "\\ Standard quadratic program as a MILP, n = {n}");
    out.push_str("Minimize\n obj: v\nSubject To\n");
    for j in 0..n {
        let mut terms: Vec<(f64, String)> = (0..n).map(|i| (q.get(j, i), d(i))).collect();
        terms.push((-1.0, "v".into()));
        terms.push((-1.0, z(j)));
        write_row(&mut out, &format!("grad{}", j + 1), &terms, "<=", 0.0);
    }
    let terms: Vec<(f64, String)> = (0..n).map(|i| (1.0, d(i))).collect();
    write_row(&mut out, "simplex", &terms, "=", 1.0);
    for j in 0..n {
        write_row(&mut out, &format!("link{}", j + 1), &[(1.0, d(j)), (-1.0, y(j))], "<=", 0.0);
    }
    for j in 0..n {
        let big_m = (0..n).map(|i| q.get(i, j)).fold(f64::NEG_INFINITY, f64::max) - gamma_lb;
        write_row(&mut out, &format!("bigm{}", j + 1), &[(1.0, z(j)), (big_m, y(j))], "<=", big_m);
    }
    out.push_str("Bounds\n v free\n");
    for j in 0..n {
        let _ = writeln!(out, " {} >= 0", d(j));
    }
    for j in 0..n {
        let _ = writeln!(out, " {} >= 0", z(j));
    }
    out.push_str("Binary\n");
    for j in 0..n {
        let _ = writeln!(out, " {}", y(j));
    }
    out.push_str("End\n");
    out
}

/// Writes [`milp_lp_string`] to `path`.
pub fn export_milp(q: &SymMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, milp_lp_string(q))?;
    Ok(())
}
