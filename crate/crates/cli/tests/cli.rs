use std::path::Path;
use std::process::{Command, Output};

fn coposolve(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coposolve")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn generated_instances_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["stqp", "copp", "cp-product"] {
        let a = coposolve(&["gen-instance", "--kind", kind, "--n", "6", "--seed", "4"], dir.path());
        let b = coposolve(&["gen-instance", "--kind", kind, "--n", "6", "--seed", "4"], dir.path());
        let c = coposolve(&["gen-instance", "--kind", kind, "--n", "6", "--seed", "5"], dir.path());
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        assert_ne!(a.stdout, c.stdout);
    }
}

#[test]
fn seed_is_required_for_generation() {
    let dir = tempfile::tempdir().unwrap();
    let out = coposolve(&["gen-instance", "--kind", "stqp", "--n", "3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_stqp_methods_and_lp_export() {
    let dir = tempfile::tempdir().unwrap();
    assert!(coposolve(&["gen-instance", "--kind", "stqp", "--n", "5", "--seed", "1", "--out", "q.txt"], dir.path())
        .status
        .success());
    let exact = json(&coposolve(&["solve-stqp", "q.txt", "--export-lp", "q.lp"], dir.path()));
    let exact_value = exact["value"].as_f64().unwrap();
    let lp = std::fs::read_to_string(dir.path().join("q.lp")).unwrap();
    assert!(lp.contains("Binary") && lp.trim_end().ends_with("End"));

    let grid = json(&coposolve(&["solve-stqp", "q.txt", "--method", "grid", "--epsilon", "0.1"], dir.path()));
    let gap = grid["value"].as_f64().unwrap() - exact_value;
    assert!((-1e-12..=0.1).contains(&gap));

    let missing = coposolve(&["solve-stqp", "q.txt", "--method", "simplex-sample"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    let args = ["solve-stqp", "q.txt", "--method", "simplex-sample", "--epsilon", "0.5", "--seed", "9"];
    let a = coposolve(&args, dir.path());
    assert_eq!(a.stdout, coposolve(&args, dir.path()).stdout);
    assert!(json(&a)["M"].as_u64().unwrap() > 0);
}

#[test]
fn solve_copp_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert!(coposolve(&["gen-instance", "--kind", "copp", "--n", "5", "--seed", "0", "--out", "c.json"], dir.path())
        .status
        .success());
    let report = json(&coposolve(&["solve-copp", "c.json", "--epsilon", "1", "--max-iter", "400"], dir.path()));
    assert_eq!(report["iterations"].as_array().unwrap().len(), 400);
    assert!(report["f_at_kstar"].as_f64().unwrap() <= 1.0);
    assert!(report["G_check"].as_f64().unwrap() <= 1.0);

    let args = ["solve-copp", "c.json", "--epsilon", "1", "--alpha", "1", "--method", "grid-sample", "--max-iter", "50"];
    let no_seed = coposolve(&args, dir.path());
    assert_eq!(no_seed.status.code(), Some(1));
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "3", "--format", "csv"]);
    let a = coposolve(&seeded, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    // Everything but the wall-clock column repeats.
    let strip = |o: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(o).lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    assert_eq!(strip(&a.stdout), strip(&coposolve(&seeded, dir.path()).stdout));
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("k,branch,"));
    assert_eq!(text.lines().count(), 51);

    let no_cap = coposolve(&["solve-copp", "c.json", "--epsilon", "1"], dir.path());
    assert_eq!(no_cap.status.code(), Some(1));
}

#[test]
fn test_cp_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("swap.txt"), "2\n0 1\n1 0\n").unwrap();
    let out = coposolve(&["test-cp", "swap.txt", "--t", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["verdict"], "NotCompletelyPositive");
    assert_eq!(v["exact_separation"], true);
    for key in ["objective", "epsilon", "n", "t", "alpha", "iterations", "certificate"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    std::fs::write(dir.path().join("eye.txt"), "2\n1 0\n0 1\n").unwrap();
    let out = coposolve(&["test-cp", "eye.txt", "--t", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "Inconclusive");

    let out = coposolve(&["test-cp", "missing.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = coposolve(&["test-cp", "swap.txt", "--method", "grid"], dir.path());
    assert_eq!(out.status.code(), Some(1), "grid needs alpha > 0");
}

#[test]
fn reproduce_table_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = coposolve(
        &["reproduce-table", "--table", "stqp", "--seed", "0", "--runs", "2", "--sizes", "5", "--out", "t.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,method,epsilon"));
    assert_eq!(lines.len(), 8);
    assert!(lines[1..].iter().all(|l| l.ends_with(",2,ok")));

    let out = coposolve(
        &[
            "reproduce-table", "--table", "copp", "--seed", "0", "--runs", "1", "--sizes", "5", "--epsilons", "2",
            "--format", "json",
        ],
        dir.path(),
    );
    let rows = json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(coposolve(&["no-such-command"], dir.path()).status.code(), Some(1));
    assert_eq!(coposolve(&["--help"], dir.path()).status.code(), Some(0));
}
