use coposolve::copositive::{build_sip, estimate_L, CoppOracleConfig};
use coposolve::cptest::{test_cp, test_cp_with_report, CpTestConfig, Verdict};
use coposolve::generate::{gen_copp_instance, gen_cp_instance, gen_stqp_instance, CpKind, COPP_FAMILY_M};
use coposolve::sip::{iteration_bound, run, theorem_check, CheckStatus, SipConfig};
use coposolve::stqp::stqp_exact;
use coposolve::tables::{reproduce_table, write_csv, TableKind, TableOptions, CSV_HEADER};
use coposolve::{CoppInstance, RngStream, StqpMethod, SymMatrix};

fn chi_run(seed: u64, oracle: CoppOracleConfig, eps: f64, alpha: f64) -> coposolve::RunReport {
    let inst = gen_copp_instance(6, &mut RngStream::new(seed)).unwrap();
    let n_iter = iteration_bound(estimate_L(&inst), (COPP_FAMILY_M as f64).sqrt(), eps) as usize;
    let mut sip = build_sip(&inst, oracle, eps, RngStream::new(seed + 100)).unwrap();
    run(&mut sip, &[1.0; COPP_FAMILY_M], SipConfig::new(eps, alpha, n_iter)).unwrap()
}

#[test]
fn runs_are_reproducible() {
    let mut oracle = CoppOracleConfig::new(StqpMethod::SimplexSample, 1.0);
    oracle.m_cap = 2_000;
    let a = chi_run(3, oracle.clone(), 0.5, 1.0);
    let b = chi_run(3, oracle, 0.5, 1.0);
    assert_eq!(a.x_kstar, b.x_kstar);
    assert_eq!(a.iterations.len(), b.iterations.len());
    for (x, y) in a.iterations.iter().zip(&b.iterations) {
        assert_eq!((x.g_value, x.f_value, x.branch), (y.g_value, y.f_value, y.branch));
    }
    assert!(a.probabilistic);
}

#[test]
fn chi_family_grid_oracle_meets_guarantee() {
    for seed in 0..4 {
        let eps = 0.25;
        let report = chi_run(seed, CoppOracleConfig::new(StqpMethod::Grid, 1.0), eps, 1.0);
        // f* = 0 for the family.
        let check = theorem_check(&report, 0.0, eps, 1.0);
        assert_eq!(check.status, CheckStatus::Pass, "seed {seed}: {check:?}");
    }
}

#[test]
fn report_json_round_trip() {
    let report = chi_run(1, CoppOracleConfig::exact(), 0.5, 0.0);
    let json = report.to_json().unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["epsilon", "alpha", "lipschitz", "iterations", "k_star", "f_at_kstar", "G_check", "x_kstar"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let back: coposolve::RunReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn instance_file_round_trip_preserves_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_copp_instance(5, &mut RngStream::new(8)).unwrap();
    let path = dir.path().join("inst.json");
    inst.save(&path).unwrap();
    let loaded = CoppInstance::load(&path).unwrap();
    let mut s1 = build_sip(&inst, CoppOracleConfig::exact(), 0.5, RngStream::new(0)).unwrap();
    let mut s2 = build_sip(&loaded, CoppOracleConfig::exact(), 0.5, RngStream::new(0)).unwrap();
    let cfg = || SipConfig::new(0.5, 0.0, 200);
    assert_eq!(run(&mut s1, &[1.0; 5], cfg()).unwrap().x_kstar, run(&mut s2, &[1.0; 5], cfg()).unwrap().x_kstar);
}

#[test]
fn cp_test_certifies_non_cp_inputs() {
    // Horn-like matrix with a negative entry; not even doubly nonnegative.
    let c = SymMatrix::from_rows(&[vec![1.0, -1.0, 0.5], vec![-1.0, 1.0, 0.5], vec![0.5, 0.5, 1.0]]).unwrap();
    let (v, report) = test_cp_with_report(&c, &CpTestConfig::default().with_t(4.0), RngStream::new(0)).unwrap();
    assert_eq!(v.verdict, Verdict::NotCompletelyPositive);
    assert_eq!(v.exact_separation, Some(true));
    let report = report.unwrap();
    assert_eq!(report.iterations.len(), v.iterations_used);
}

#[test]
fn cp_test_never_certifies_products() {
    let mut rng = RngStream::new(31);
    for i in 0..10 {
        let c = gen_cp_instance(&CpKind::CpProduct { rows: 4, cols: 3 }, &mut rng).unwrap();
        let v = test_cp(&c, &CpTestConfig::default().with_t(3.0), rng.substream(i)).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }
}

#[test]
fn stqp_table_small() {
    let mut opts = TableOptions::defaults(TableKind::Stqp);
    opts.sizes = vec![5];
    opts.seeds = vec![0, 1, 2];
    let rows = reproduce_table(TableKind::Stqp, &opts);
    // Exact once, three methods at two accuracies.
    assert_eq!(rows.len(), 7);
    for row in &rows {
        assert_eq!(row.status, "ok", "{row:?}");
        assert_eq!(row.runs, 3);
        let dev = row.deviation.unwrap();
        assert!(dev >= -1e-12, "{row:?}");
        if row.method == StqpMethod::Exact {
            assert!(dev.abs() < 1e-12);
        }
    }
    let mean_exact: f64 = (0..3)
        .map(|s| stqp_exact(&gen_stqp_instance(5, &mut RngStream::new(s)).unwrap(), 22).unwrap().value)
        .sum::<f64>()
        / 3.0;
    assert!((rows[0].objective.unwrap() - mean_exact).abs() < 1e-12);

    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn stqp_table_refuses_large_without_flag() {
    let mut opts = TableOptions::defaults(TableKind::Stqp);
    opts.sizes = vec![70];
    opts.seeds = vec![0];
    opts.methods = vec![StqpMethod::SimplexSample];
    let rows = reproduce_table(TableKind::Stqp, &opts);
    assert!(rows[0].status.starts_with("error"));
}

#[test]
fn copp_table_small() {
    let mut opts = TableOptions::defaults(TableKind::Copp);
    opts.sizes = vec![5];
    opts.seeds = vec![0, 1];
    opts.epsilons = vec![2.0];
    let rows = reproduce_table(TableKind::Copp, &opts);
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row.status, "ok", "{row:?}");
        assert!(row.objective.unwrap() <= row.epsilon);
        assert!(row.audit.unwrap() <= row.epsilon + 1e-12);
    }
}
