//! Desk-scale reruns of the StQP and copositive-programming experiments.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::copositive::{build_sip, estimate_L, solve_subproblem, CoppOracleConfig};
use crate::error::Result;
use crate::generate::{gen_copp_instance, gen_stqp_instance, COPP_FAMILY_M};
use crate::rng::RngStream;
use crate::sip::{iteration_bound, run, SipConfig};
use crate::stqp::{stqp_exact, StqpMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Stqp,
    Copp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOptions {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub methods: Vec<StqpMethod>,
    /// ε for StQP rows; ε(1+α) for copositive rows.
    pub epsilons: Vec<f64>,
    /// α used by the inexact methods in copositive rows.
    pub alpha: f64,
    pub phi: f64,
    pub sample_fraction: f64,
    pub m_cap: u64,
    pub exact_cap: usize,
    pub grid_budget: u64,
    /// Run sizes beyond `exact_cap`, without deviation columns.
    pub allow_large: bool,
    /// Copositive runs stop after this many iterations even when the
    /// theoretical count is larger.
    pub max_iterations: Option<usize>,
}

impl TableOptions {
    pub fn defaults(kind: TableKind) -> Self {
        let base = TableOptions {
            sizes: vec![],
            seeds: (0..10).collect(),
            methods: vec![],
            epsilons: vec![],
            alpha: 1.0,
            phi: 0.05,
            sample_fraction: 1e-2,
            m_cap: 100_000,
            exact_cap: 64,
            grid_budget: 10_000_000,
            allow_large: false,
            max_iterations: None,
        };
        match kind {
            TableKind::Stqp => TableOptions {
                sizes: vec![5, 10, 50],
                methods: StqpMethod::ALL.to_vec(),
                epsilons: vec![1.0, 0.1],
                ..base
            },
            TableKind::Copp => TableOptions {
                sizes: vec![5, 10],
                methods: vec![StqpMethod::Exact, StqpMethod::Grid],
                epsilons: vec![2.0, 0.2],
                sample_fraction: 1.0,
                ..base
            },
        }
    }

    fn oracle(&self, method: StqpMethod, alpha: f64) -> CoppOracleConfig {
        let mut cfg = CoppOracleConfig::new(method, alpha).with_exact_cap(self.exact_cap);
        cfg.phi = self.phi;
        cfg.sample_fraction = self.sample_fraction;
        cfg.m_cap = self.m_cap;
        cfg.grid_budget = self.grid_budget;
        cfg
    }
}

/// One averaged cell. Means are over the seeds that ran without error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub method: StqpMethod,
    /// ε for StQP rows; ε(1+α) for copositive rows.
    pub epsilon: f64,
    pub alpha: f64,
    /// Mean grid resolution r or sample count M.
    pub size_param: Option<f64>,
    pub iterations: Option<f64>,
    pub objective: Option<f64>,
    /// Mean gap to the exact optimum (StQP rows only).
    pub deviation: Option<f64>,
    /// Mean audited constraint violation at x_{k*} (copositive rows only).
    pub audit: Option<f64>,
    /// Mean process CPU seconds.
    pub cpu_time: Option<f64>,
    pub runs: usize,
    pub status: String,
}

/// Process CPU time in seconds.
pub fn cpu_time() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return f64::NAN;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

#[derive(Default)]
struct Acc {
    size_param: Vec<f64>,
    iterations: Vec<f64>,
    objective: Vec<f64>,
    deviation: Vec<f64>,
    audit: Vec<f64>,
    time: Vec<f64>,
    errors: Vec<String>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl Acc {
    fn finish(self, n: usize, method: StqpMethod, epsilon: f64, alpha: f64, seeds: usize) -> TableRow {
        let runs = self.time.len();
        let status = match self.errors.first() {
            None => "ok".to_string(),
            Some(e) if runs == 0 => format!("error: {e}"),
            Some(e) => format!("partial {runs}/{seeds}: {e}"),
        };
        TableRow {
            n,
            method,
            epsilon,
            alpha,
            size_param: mean(&self.size_param),
            iterations: mean(&self.iterations),
            objective: mean(&self.objective),
            deviation: mean(&self.deviation),
            audit: mean(&self.audit),
            cpu_time: mean(&self.time),
            runs,
            status,
        }
    }
}

fn error_row(n: usize, method: StqpMethod, epsilon: f64, alpha: f64, msg: String) -> TableRow {
    Acc { errors: vec![msg], ..Acc::default() }.finish(n, method, epsilon, alpha, 0)
}

/// Runs the experiment grid; rows come out sorted by (n, method, ε) in
/// the order given by the options.
pub fn reproduce_table(kind: TableKind, opts: &TableOptions) -> Vec<TableRow> {
    match kind {
        TableKind::Stqp => stqp_table(opts),
        TableKind::Copp => copp_table(opts),
    }
}

fn cells(opts: &TableOptions) -> Vec<(StqpMethod, f64)> {
    let mut out = Vec::new();
    for &method in &opts.methods {
        if method == StqpMethod::Exact && !opts.epsilons.is_empty() {
            out.push((method, opts.epsilons[0]));
            continue;
        }
        for &eps in &opts.epsilons {
            out.push((method, eps));
        }
    }
    out
}

fn stqp_table(opts: &TableOptions) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for &n in &opts.sizes {
        let exact_ok = n <= opts.exact_cap;
        for (cell, &(method, eps)) in cells(opts).iter().enumerate() {
            let alpha = if method == StqpMethod::Exact { 0.0 } else { opts.alpha };
            if !exact_ok && !opts.allow_large {
                rows.push(error_row(n, method, eps, alpha, format!("n = {n} exceeds the exact cap {}; pass allow_large", opts.exact_cap)));
                continue;
            }
            let oracle = opts.oracle(method, alpha);
            let mut acc = Acc::default();
            for &seed in &opts.seeds {
                let q = match gen_stqp_instance(n, &mut RngStream::new(seed)) {
                    Ok(q) => q,
                    Err(e) => {
                        acc.errors.push(e.to_string());
                        continue;
                    }
                };
                let mut rng = RngStream::new(seed).substream(cell as u64);
                let t0 = cpu_time();
                let res = solve_subproblem(&q, &oracle, eps, &mut rng);
                let elapsed = cpu_time() - t0;
                let res = match res {
                    Ok(r) => r,
                    Err(e) => {
                        acc.errors.push(e.to_string());
                        continue;
                    }
                };
                if exact_ok {
                    match stqp_exact(&q, opts.exact_cap) {
                        Ok(ex) => acc.deviation.push(res.value - ex.value),
                        Err(e) => {
                            acc.errors.push(e.to_string());
                            continue;
                        }
                    }
                }
                if let Some(p) = res.m.or(res.r) {
                    acc.size_param.push(p as f64);
                }
                acc.objective.push(res.value);
                acc.time.push(elapsed);
            }
            rows.push(acc.finish(n, method, eps, alpha, opts.seeds.len()));
        }
    }
    rows
}

fn copp_table(opts: &TableOptions) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for &n in &opts.sizes {
        for (cell, &(method, eps_total)) in cells(opts).iter().enumerate() {
            let alpha = if method == StqpMethod::Exact { 0.0 } else { opts.alpha };
            let eps = eps_total / (1.0 + alpha);
            let oracle = opts.oracle(method, alpha);
            let mut acc = Acc::default();
            for &seed in &opts.seeds {
                let inst = match gen_copp_instance(n, &mut RngStream::new(seed)) {
                    Ok(i) => i,
                    Err(e) => {
                        acc.errors.push(e.to_string());
                        continue;
                    }
                };
                let bound = iteration_bound(estimate_L(&inst), (COPP_FAMILY_M as f64).sqrt(), eps);
                let mut max_iter = usize::try_from(bound).unwrap_or(usize::MAX);
                if let Some(cap) = opts.max_iterations {
                    max_iter = max_iter.min(cap);
                }
                let rng = RngStream::new(seed).substream(cell as u64);
                let t0 = cpu_time();
                let report = build_sip(&inst, oracle.clone(), eps, rng)
                    .and_then(|mut sip| run(&mut sip, &[1.0; COPP_FAMILY_M], SipConfig::new(eps, alpha, max_iter)));
                let elapsed = cpu_time() - t0;
                match report {
                    Ok(report) => {
                        acc.iterations.push(report.iterations.len() as f64);
                        match report.f_at_kstar {
                            Some(f) => acc.objective.push(f),
                            None => acc.errors.push(format!("seed {seed}: no iterate with g <= eps")),
                        }
                        if let Some(g) = report.g_check {
                            acc.audit.push(g);
                        }
                        acc.time.push(elapsed);
                    }
                    Err(e) => acc.errors.push(e.to_string()),
                }
            }
            rows.push(acc.finish(n, method, eps_total, alpha, opts.seeds.len()));
        }
    }
    rows
}

/// Three significant digits in scientific notation, e.g. `5.54E-03`.
pub fn sci3(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.2E}");
    match s.split_once('E') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().expect("exponent is an integer");
            format!("{mant}E{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => s,
    }
}

pub const CSV_HEADER: [&str; 12] =
    ["n", "method", "epsilon", "alpha", "M_or_r", "iterations", "objective", "deviation", "audit", "time_s", "runs", "status"];

pub fn write_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(sci3).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.method.name().to_string(),
            sci3(r.epsilon),
            sci3(r.alpha),
            opt(r.size_param),
            opt(r.iterations),
            opt(r.objective),
            opt(r.deviation),
            opt(r.audit),
            opt(r.cpu_time),
            r.runs.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(rows: &[TableRow], path: impl AsRef<Path>) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci3_format() {
        assert_eq!(sci3(5.54e-3), "5.54E-03");
        assert_eq!(sci3(-3.02), "-3.02E+00");
        assert_eq!(sci3(1300.0), "1.30E+03");
        assert_eq!(sci3(0.0), "0.00E+00");
    }

    #[test]
    fn grid_rows_respect_bound() {
        let mut opts = TableOptions::defaults(TableKind::Stqp);
        opts.sizes = vec![5];
        opts.seeds = (0..4).collect();
        opts.methods = vec![StqpMethod::Grid];
        let rows = reproduce_table(TableKind::Stqp, &opts);
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.status, "ok");
            assert_eq!(r.runs, 4);
            let dev = r.deviation.unwrap();
            assert!((0.0..=r.epsilon).contains(&dev));
        }
    }

    #[test]
    fn oversized_rows_are_errors() {
        let mut opts = TableOptions::defaults(TableKind::Stqp);
        opts.sizes = vec![100];
        opts.exact_cap = 22;
        opts.methods = vec![StqpMethod::Exact];
        let rows = reproduce_table(TableKind::Stqp, &opts);
        assert!(rows[0].status.starts_with("error"));
        assert_eq!(rows[0].runs, 0);
    }

    #[test]
    fn copp_rows_are_reproducible() {
        let mut opts = TableOptions::defaults(TableKind::Copp);
        opts.sizes = vec![5];
        opts.seeds = vec![0, 1];
        opts.epsilons = vec![2.0];
        let a = reproduce_table(TableKind::Copp, &opts);
        let b = reproduce_table(TableKind::Copp, &opts);
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.objective, y.objective);
            assert_eq!(x.iterations, y.iterations);
            assert_eq!(x.status, "ok");
        }
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,method,epsilon"));
        assert_eq!(text.lines().count(), 3);
    }
}
