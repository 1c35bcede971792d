use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbc")).args(args).output().expect("qbc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cheat_random_fixture_matches_golden_bytes() {
    let o = qbc(&["cheat", path_str(&fixture("random-seed7.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read(fixture("random-seed7.golden.json")).unwrap();
    assert_eq!(o.stdout, golden);
}

#[test]
fn cheat_identical_and_permutation_reach_one() {
    for name in ["identical.json", "permutation.json"] {
        let o = qbc(&["cheat", path_str(&fixture(name)), "--format", "json"]);
        assert_eq!(code(&o), 0, "{name}");
        let v = stdout_json(&o);
        assert!((v["pAc"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{name}");
        assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{name}");
        assert_eq!(v["boundHolds"], Value::Bool(true));
    }
}

#[test]
fn cheat_exit_codes() {
    let o = qbc(&["cheat", path_str(&fixture("corrupted.json"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ensemble.probabilities_sum"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&qbc(&["cheat", path_str(&bad)])), 2);
    assert_eq!(code(&qbc(&["cheat", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&qbc(&["cheat"])), 2);
}

#[test]
fn concealing_rows() {
    let o = qbc(&["concealing", "--n", "1,3,25", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v[0]["closedForm"], 1.0);
    assert!(v[0]["lower"].is_null() && v[0]["insideBounds"].is_null());
    assert!((v[1]["closedForm"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(v[2]["insideBounds"], Value::Bool(true));

    let pretty = qbc(&["concealing", "--n", "1"]);
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("N/A"));
    assert_eq!(code(&qbc(&["concealing", "--n", "3,4"])), 2);
}

#[test]
fn csv_columns_are_fixed() {
    let o = qbc(&["concealing", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "protocol,params,metric,estimate,stderr,prediction,z");
    let o = qbc(&["simulate", path_str(&fixture("qbcp3m-n3.json")), "--trials", "2000", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "protocol,params,metric,estimate,stderr,prediction,z");
    assert!(text.contains("QBCp3m,n=3,babe_guess,"));
}

#[test]
fn simulate_swap_example_passes() {
    let o = qbc(&["simulate", path_str(&fixture("swap-example.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["passed"], Value::Bool(true));
}

#[test]
fn simulate_n3_agrees_with_closed_form() {
    let o = qbc(&["simulate", path_str(&fixture("qbcp3m-n3.json")), "--format", "json", "--strict"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let est = &v["estimates"]["babe_guess"];
    let (mean, se) = (est["mean"].as_f64().unwrap(), est["stderr"].as_f64().unwrap());
    assert!((mean - 0.75).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn simulate_seed_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("qbcp3m-n5.json");
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("r{k}.json"));
        let o = qbc(&[
            "simulate",
            path_str(&spec),
            "--seed",
            "42",
            "--trials",
            "20000",
            "--threads",
            threads,
            "--format",
            "json",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(code(&o), 0);
        // the summary goes to stdout when --out is given
        assert!(String::from_utf8_lossy(&o.stdout).contains("seed=42"));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn simulate_unknown_strategy_and_strict_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec: Value = serde_json::from_slice(&std::fs::read(fixture("qbcp3m-n3.json")).unwrap()).unwrap();
    spec["babeStrategy"]["id"] = "no-such-strategy".into();
    let p = dir.path().join("unknown.json");
    std::fs::write(&p, spec.to_string()).unwrap();
    let o = qbc(&["simulate", path_str(&p)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-strategy"));

    // a deliberately wrong optimal pA makes the bit-change estimate disagree
    let mut spec: Value = serde_json::from_slice(&std::fs::read(fixture("measure-resend-bb84.json")).unwrap()).unwrap();
    spec["pA"] = 0.1.into();
    spec["trials"] = 4000.into();
    let p = dir.path().join("wrong-pa.json");
    std::fs::write(&p, spec.to_string()).unwrap();
    assert_eq!(code(&qbc(&["simulate", path_str(&p)])), 0);
    assert_eq!(code(&qbc(&["simulate", path_str(&p), "--strict"])), 4);
}

#[test]
fn attack_rows_cover_sizes() {
    let o = qbc(&[
        "attack",
        path_str(&fixture("measure-resend-bb84.json")),
        "--sizes",
        "3,5",
        "--trials",
        "3000",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["estimate"]["mean"], rows[1]["estimate"]["mean"]);
}

#[test]
fn verify_filter_and_corrupted_fixture() {
    let o = qbc(&["verify", "--filter", "cheat"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 1);
    assert!(text.lines().all(|l| l.starts_with("PASS cheat/")), "{text}");

    let o = qbc(&["verify", "--filter", "cheat", path_str(&fixture("corrupted.json"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("invariant `ensemble.probabilities_sum`"));

    let o = qbc(&[
        "verify",
        "--filter",
        "qcore",
        path_str(&fixture("permutation.json")),
        path_str(&fixture("qbcp3m-n3.json")),
        path_str(&fixture("sweep-qbc3m2.json")),
        path_str(&fixture("swap-example.json")),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&qbc(&["verify", "--filter", "nope"])), 2);
}

#[test]
fn sweep_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let mut sw: Value = serde_json::from_slice(&std::fs::read(fixture("sweep-concealing.json")).unwrap()).unwrap();
    sw["template"]["trials"] = 2000.into();
    let spec = dir.path().join("sweep.json");
    std::fs::write(&spec, sw.to_string()).unwrap();
    let ck = dir.path().join("ck.json");
    let run = |extra: &[&str]| {
        let mut args = vec!["sweep", path_str(&spec), "--format", "json"];
        args.extend_from_slice(extra);
        let o = qbc(&args);
        assert_eq!(code(&o), 0);
        o.stdout
    };
    let plain = run(&[]);
    let first = run(&["--checkpoint", path_str(&ck)]);
    assert!(ck.exists());
    let resumed = run(&["--checkpoint", path_str(&ck)]);
    assert_eq!(plain, first);
    assert_eq!(plain, resumed);
}
