//! End-to-end tests of the `bernwf` binary: documented example runs,
//! exit-code conventions, output formats, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bernwf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bernwf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Parses the numeric CSV cells of a column, skipping the header.
/// Only for tables without quoted fields.
fn column(csv: &str, index: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .nth(index)
                .expect("column exists")
                .parse()
                .expect("numeric cell")
        })
        .collect()
}

#[test]
fn iterate_deep_is_near_the_straight_line_limit() {
    let out = bernwf(&["iterate", "--n", "5", "--k", "100", "--fn", "xsq"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let csv = stdout_str(&out);
    let errors = column(&csv, 3);
    assert_eq!(errors.len(), 6);
    for e in errors {
        assert!(e <= 1e-9, "error {e} above 1e-9");
    }
}

#[test]
fn iterate_exact_mode_emits_rationals() {
    let out = bernwf(&["iterate", "--n", "4", "--k", "3", "--fn", "xsq", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout_str(&out);
    // B_4^3(x^2) at x = 1/4 is (27/64)(1/16) + (37/64)(1/4) = 175/1024.
    assert!(csv.contains("1/4,175/1024,1/4,81/1024"), "got:\n{csv}");
}

#[test]
fn identity_check_reports_all_triples() {
    let out = bernwf(&["identity-check", "--rmax", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout_str(&out);
    assert!(csv.contains("10,220,0,true"), "got:\n{csv}");
    assert!(
        stderr_str(&out).contains("220 triples, 0 failures"),
        "stderr: {}",
        stderr_str(&out)
    );
}

#[test]
fn chain_sim_recovers_the_start_point() {
    let out = bernwf(&[
        "chain-sim",
        "--n",
        "10",
        "--x",
        "0.3",
        "--replicas",
        "100000",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let csv = stdout_str(&out);
    let estimate = column(&csv, 6)[0];
    let censored = column(&csv, 5)[0];
    assert_eq!(censored, 0.0);
    assert!(
        (estimate - 0.3).abs() <= 0.0043,
        "estimate {estimate} outside 0.3 +- 0.0043"
    );
    assert!(csv.trim_end().ends_with("true"));
}

#[test]
fn same_config_same_bytes() {
    for args in [
        vec!["chain-sim", "--n", "8", "--x", "0.4", "--replicas", "20000"],
        vec![
            "diffusion-sim",
            "--x",
            "0.5",
            "--t",
            "0.25",
            "--replicas",
            "2000",
        ],
        vec!["kr-curve", "--n", "6", "--k", "12", "--fn", "abs"],
    ] {
        let a = bernwf(&args);
        let b = bernwf(&args);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "nondeterministic stdout for {args:?}");
    }
}

#[test]
fn explicit_seed_changes_the_sample() {
    let a = bernwf(&["chain-sim", "--n", "8", "--x", "0.4", "--replicas", "20000"]);
    let b = bernwf(&[
        "chain-sim",
        "--n",
        "8",
        "--x",
        "0.4",
        "--replicas",
        "20000",
        "--seed",
        "7",
    ]);
    assert_ne!(a.stdout, b.stdout, "seed flag had no effect");
}

#[test]
fn usage_and_domain_errors_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["iterate", "--n", "5", "--k", "3", "--fn", "cube"],
        vec!["iterate", "--n", "5", "--k", "3", "--fn", "xsq", "--bogus"],
        vec!["approx", "--n", "0", "--fn", "xsq"],
        vec!["approx", "--fn", "xsq"],
        vec!["moments", "--r", "0", "--t", "1.0"],
        vec!["chain-sim", "--n", "10", "--x", "1.5", "--replicas", "100"],
        vec![
            "diffusion-sim",
            "--x",
            "0.5",
            "--t",
            "0.5",
            "--dt",
            "0",
            "--replicas",
            "10",
        ],
        vec!["hoeffding", "--n", "20", "--eps", "1/0"],
        vec![
            "iterate",
            "--n",
            "5",
            "--k",
            "3",
            "--fn",
            "expneg:1.0",
            "--exact",
        ],
    ];
    for args in cases {
        let out = bernwf(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}, stderr: {}",
            stderr_str(&out)
        );
    }
}

#[test]
fn json_format_is_parseable() {
    let out = bernwf(&["moments", "--r", "2", "--t", "1.0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("valid JSON");
    let rows = value.as_array().expect("array of rows");
    assert_eq!(rows.len(), 21);
    // At x = 1: E[X_t^2] = 1 for every t, since 1 is absorbing.
    let last = &rows[20];
    assert_eq!(last["x"].as_f64(), Some(1.0));
    assert_eq!(last["moment"].as_f64(), Some(1.0));
}

#[test]
fn grid_file_functions_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "4\n0\n0.0625\n0.25\n0.5625\n1\n").unwrap();
    let spec = format!("grid:{}", path.display());

    let out = bernwf(&["approx", "--fn", &spec]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let csv = stdout_str(&out);
    // The file holds x^2 on a 4-interval grid; B_4 x^2 at 1/2 is
    // 1/4 + (1/4)/4 = 0.3125.
    let bn = column(&csv, 2);
    assert_eq!(bn.len(), 5);
    assert!((bn[2] - 0.3125).abs() < 1e-15);

    // A mismatched --n is a domain error.
    let out = bernwf(&["approx", "--n", "7", "--fn", &spec]);
    assert_eq!(out.status.code(), Some(2));

    // A truncated file is rejected.
    std::fs::write(&path, "4\n0\n0.0625\n").unwrap();
    let out = bernwf(&["approx", "--fn", &spec]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_table_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = bernwf(&[
        "moments",
        "--r",
        "1",
        "--t",
        "0.5",
        "--x",
        "0.25",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).is_empty());
    let written = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(written.starts_with("r,t,x,moment\n"));
    // E[X_t] = x for all t.
    assert!(written.contains("2.5000000000000000e-1,2.5000000000000000e-1"));
}

#[test]
fn verify_all_passes_and_the_corruption_hook_fails() {
    let ok = bernwf(&["verify-all"]);
    assert_eq!(ok.status.code(), Some(0), "stderr: {}", stderr_str(&ok));
    let csv = stdout_str(&ok);
    assert_eq!(csv.lines().count(), 12, "11 criteria plus header");
    assert!(!csv.contains("false"), "got:\n{csv}");
    assert!(stderr_str(&ok).contains("11/11 criteria passed"));

    let bad = bernwf(&["verify-all", "--corrupt-bound"]);
    assert_eq!(bad.status.code(), Some(1));
    let csv = stdout_str(&bad);
    let row6 = csv
        .lines()
        .find(|l| l.starts_with("6,"))
        .expect("criterion 6 row");
    assert!(
        row6.contains("false"),
        "corrupted bound still passed: {row6}"
    );
    assert!(stderr_str(&bad).contains("violated a bound"));
}
