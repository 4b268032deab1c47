use std::process::{Command, Output};

use serde_json::Value;

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-aux")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = hardy(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().unwrap(), v)
}

fn verdict<'a>(report: &'a Value, claim: &str) -> &'a Value {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["claim"] == claim)
        .unwrap_or_else(|| panic!("no verdict {claim}"))
}

#[test]
fn classic_knopp_instance_holds() {
    let (code, r) = json(&["check-knopp", "--p", "2", "--alpha", "0", "--U", "4", "--n-max", "10000"]);
    assert_eq!(code, 0);
    assert_eq!(r["command"], "check-knopp");
    assert_eq!(r["n_max"], 10000);
    let v = verdict(&r, "knopp_criterion");
    assert_eq!(v["holds"], true);
    assert_eq!(v["paper_ref"], "eq:7");
    assert!(v["min_slack"].as_f64().unwrap() >= 0.0);
}

#[test]
fn invalid_exponent_exits_two() {
    let out = hardy(&["check-knopp", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["no-such-command"][..],
        &["check-knopp"],
        &["check-knopp", "--p", "2", "--n-max", "0"],
        &["check-knopp", "--p", "2", "--tol-rel", "-1"],
        &["redheffer-solve", "--c", "-1"],
        &["check-reverse", "--p", "0.7"],
    ] {
        assert_eq!(hardy(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_verdict_exits_one() {
    let (code, r) = json(&["check-2-30", "--p", "1.05", "--n-max", "10"]);
    assert_eq!(code, 1);
    let v = verdict(&r, "inverse_root_weight");
    assert_eq!(v["holds"], false);
    assert_eq!(v["first_failure"], 1);

    // A target below the sharp constant fails at a finite index.
    let (code, _) = json(&["check-knopp", "--p", "2", "--U", "3.9", "--n-max", "1000"]);
    assert_eq!(code, 1);
}

#[test]
fn redheffer_solve_values() {
    let (code, r) = json(&["redheffer-solve", "--c", "2.5"]);
    assert_eq!(code, 0);
    let root = &verdict(&r, "balance_root")["values"];
    assert!((root["x"].as_f64().unwrap() - 0.2435).abs() < 5e-4);
    assert!((root["beta"].as_f64().unwrap() - 0.3912).abs() < 5e-4);
    let k = verdict(&r, "reciprocal_constant")["values"]["k"].as_f64().unwrap();
    assert!((k - 1.1151).abs() < 1e-3);
}

#[test]
fn redheffer_check_boundary_instance() {
    let beta = (3.0 - 2.0 * 2f64.sqrt()).to_string();
    let (code, r) = json(&["redheffer-check", "--p", "0.3333333333333333", "--c", "2", "--beta", &beta]);
    assert_eq!(code, 0, "{r}");
    let b = &verdict(&r, "branch_condition")["values"];
    assert!((b["two_branch"].as_f64().unwrap() - 1.972_017_310_201_215).abs() < 1e-9);
    assert_eq!(verdict(&r, "curvature_condition")["holds"], true);
}

#[test]
fn reports_are_deterministic_modulo_wall_time() {
    let args = ["norm-ratio", "--p", "2", "--family", "random", "--seed", "7", "--n-max", "500"];
    let (_, mut a) = json(&args);
    let (_, mut b) = json(&args);
    a.as_object_mut().unwrap().remove("wall_time");
    b.as_object_mut().unwrap().remove("wall_time");
    assert_eq!(a, b);
    let (_, mut c) = json(&["norm-ratio", "--p", "2", "--family", "random", "--seed", "8", "--n-max", "500"]);
    c.as_object_mut().unwrap().remove("wall_time");
    assert_ne!(a, c);
}

#[test]
fn verdicts_are_sorted_by_claim() {
    let (_, r) = json(&["redheffer-check", "--p", "0.25", "--c", "2", "--beta", "0.2"]);
    let claims: Vec<&str> = r["verdicts"].as_array().unwrap().iter().map(|v| v["claim"].as_str().unwrap()).collect();
    let mut sorted = claims.clone();
    sorted.sort();
    assert_eq!(claims, sorted);
}

#[test]
fn text_and_csv_formats() {
    let out = hardy(&["check-2-20", "--p", "2", "--alpha", "0.3", "--n-max", "1000", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS power_weight_criterion [(2.20)]")), "{text}");

    let out = hardy(&["check-2-20", "--p", "2", "--alpha", "0.3", "--n-max", "1000", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().get(0), Some("claim"));
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][2], "true");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = hardy(&["check-reverse", "--p", "0.25", "--n-max", "1000", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(verdict(&r, "reverse_criterion")["paper_ref"], "(3.1)");
}

#[test]
fn extremal_search_brackets_weighted_mean_constant() {
    let (code, r) = json(&[
        "extremal-search", "--operator", "weighted-mean", "--alpha", "2", "--p", "2", "--tail", "--n-max", "100000",
    ]);
    assert_eq!(code, 0);
    let best = verdict(&r, "extremal_search")["values"]["best_ratio"].as_f64().unwrap();
    assert!(best > 4.0 / 3.0 * 0.95 && best < 4.0 / 3.0, "{best}");
}

#[test]
fn scan_csv_has_one_row_per_point() {
    let out = hardy(&["redheffer-scan", "--p", "0.5", "--n-max", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["c", "beta", "k_min", "k", "route", "two_index", "direct", "feasible"]);
    assert!(rdr.records().count() > 100_000);
}

#[test]
fn verify_paper_passes() {
    let (code, r) = json(&["verify-paper"]);
    assert_eq!(code, 0, "{r}");
    let k = verdict(&r, "redheffer_k_half")["values"]["k"].as_f64().unwrap();
    assert!((k - 1.1151).abs() < 1e-3);
    assert_eq!(verdict(&r, "redheffer_p034_feasible")["holds"], true);
    for v in r["verdicts"].as_array().unwrap() {
        assert!(v["paper_ref"].as_str().is_some_and(|s| !s.is_empty()));
        assert!(v["exploratory"].is_boolean());
    }
}
