//! End-to-end runs of the `spectralpath` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectralpath"))
        .args(args)
        .env_remove("SPECTRALPATH_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    (code(&out), v)
}

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

const PATH3: &str = "3\n0 1 0\n1 0 1\n0 1 0\n";

#[test]
fn analyze_path() {
    let f = file(PATH3);
    let p = f.path().to_str().unwrap();
    let (c, v) = json(&["analyze", p]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["class"], "MultiplicityFree");
    assert_eq!(v["result"]["path"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["verdict"]["exit_code"], 0);
    let human = stdout(&run(&["analyze", p]));
    assert!(human.contains("endpoints {0, 2}"), "{human}");
    assert!(human.contains("(0,2): (1, 1, 1) deviation 0; constant 1"), "{human}");
}

#[test]
fn analyze_single_entry() {
    let f = file("1\n5\n");
    let (c, v) = json(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["d"], 0);
    assert_eq!(v["result"]["profiles"][0]["common_value"], 1.0);
}

#[test]
fn malformed_matrix_reports_line() {
    let f = file("# header\n2\n1 0\n0 oops\n");
    let out = run(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    let out = run(&["analyze", "/nonexistent/matrix.txt"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_exit_codes() {
    let f = file(PATH3);
    let p = f.path().to_str().unwrap();
    assert_eq!(code(&run(&["check", p, "--theorem", "mainsym", "--s", "0", "--t", "2"])), 0);
    assert_eq!(code(&run(&["check", p, "--theorem", "mainsym", "--s", "2", "--t", "0"])), 0);
    assert_eq!(code(&run(&["check", p, "--theorem", "mainsym", "--s", "0", "--t", "1"])), 1);
    assert_eq!(code(&run(&["check", p, "--theorem", "main", "--s", "2", "--t", "0"])), 0);
    assert_eq!(code(&run(&["check", p, "--theorem", "main", "--s", "0", "--t", "3"])), 2);
    let nil = file("3\n0 1 0\n0 0 1\n0 0 0\n");
    let n = nil.path().to_str().unwrap();
    assert_eq!(code(&run(&["check", n, "--theorem", "main", "--s", "0", "--t", "2"])), 1);
    let neg = file("2\n0 -1\n1 0\n");
    assert_eq!(code(&run(&["check", neg.path().to_str().unwrap(), "--theorem", "main", "--s", "0", "--t", "1"])), 2);
}

#[test]
fn check_report_carries_threshold() {
    let f = file(PATH3);
    let (c, v) = json(&["check", f.path().to_str().unwrap(), "--theorem", "mainsym", "--s", "0", "--t", "2"]);
    assert_eq!(c, 0);
    let profile = &v["result"]["condition_ii"]["profile"];
    assert!(profile["deviation"].as_f64().unwrap() <= profile["threshold"].as_f64().unwrap());
    assert_eq!(v["tolerance"]["residual_tol"], 1e-8);
}

#[test]
fn scheme_cube_p_poly() {
    let (c, v) = json(&["scheme", "builtin:hypercube(3)", "p-poly"]);
    assert_eq!(c, 0);
    let s = v["result"]["structures"].as_array().unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0]["generator"], 1);
    assert_eq!(s[0]["last"], 3);
}

#[test]
fn scheme_complete_info() {
    let (c, v) = json(&["scheme", "builtin:complete(5)", "info"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["p"], serde_json::json!([[1.0, 4.0], [1.0, -1.0]]));
    assert_eq!(v["seed"], 0);
    let human = stdout(&run(&["scheme", "builtin:complete(5)", "info"]));
    assert!(human.contains("Krein parameters: min"), "{human}");
}

#[test]
fn scheme_kn_checks() {
    let (c, v) = json(&["scheme", "builtin:hypercube(3)", "kn-p", "1", "3"]);
    assert_eq!(c, 0);
    let obs: Vec<f64> = v["result"]["observed"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (o, w) in obs.iter().zip([1.0, -3.0, 3.0, -1.0]) {
        assert!((o - w).abs() < 1e-9);
    }
    assert_eq!(code(&run(&["scheme", "builtin:hypercube(3)", "kn-p", "1", "2"])), 1);
    assert_eq!(code(&run(&["scheme", "builtin:hypercube(3)", "kn-q", "1", "3"])), 0);
    assert_eq!(code(&run(&["scheme", "builtin:hypercube(3)", "kn-q", "1", "2"])), 1);
    assert_eq!(code(&run(&["scheme", "builtin:complete(4)", "kn-p", "1", "1"])), 0);
    assert_eq!(code(&run(&["scheme", "builtin:complete(4)", "kn-q", "1", "1"])), 0);
    assert_eq!(code(&run(&["scheme", "builtin:hypercube(3)", "kn-q", "1", "9"])), 2);
}

#[test]
fn scheme_input_errors() {
    assert_eq!(code(&run(&["scheme", "builtin:hypercube(13)", "info"])), 2);
    assert_eq!(code(&run(&["scheme", "builtin:square(3)", "info"])), 2);
    let tournament =
        file("SCHEME X=3 D=2 FORM=RELATIONS\nREL 0\n100\n010\n001\nREL 1\n010\n001\n100\nREL 2\n001\n100\n010\n");
    let out = run(&["scheme", tournament.path().to_str().unwrap(), "info"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("axiom (iii)"));
    let truncated = file("SCHEME X=2 D=1 FORM=PTENSOR\nK 1 1\nP 0\n1 0\n");
    let out = run(&["scheme", truncated.path().to_str().unwrap(), "p-poly"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn scheme_from_ptensor_file() {
    let k3 = file("# K_3\nSCHEME X=3 D=1 FORM=PTENSOR\nK 1 2\nP 0\n1 0\n0 2\nP 1\n0 1\n1 1\n");
    let (c, v) = json(&["scheme", k3.path().to_str().unwrap(), "info"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["m"], serde_json::json!([1.0, 2.0]));
}

#[test]
fn degenerate_sizes() {
    let d1 = file("2\n0 3\n2 0\n");
    let p = d1.path().to_str().unwrap();
    assert_eq!(code(&run(&["analyze", p])), 0);
    assert_eq!(code(&run(&["check", p, "--theorem", "mainsym", "--s", "0", "--t", "1"])), 0);
    assert_eq!(code(&run(&["check", p, "--theorem", "main", "--s", "1", "--t", "0"])), 0);
    let d0 = file("1\n5\n");
    let p0 = d0.path().to_str().unwrap();
    assert_eq!(code(&run(&["check", p0, "--theorem", "mainsym", "--s", "0", "--t", "0"])), 0);
    assert_eq!(code(&run(&["check", p0, "--theorem", "main", "--s", "0", "--t", "0"])), 0);
    for action in [&["info"][..], &["p-poly"], &["q-poly"], &["kn-p", "1", "1"], &["kn-q", "1", "1"]] {
        let mut args = vec!["scheme", "builtin:complete(2)"];
        args.extend_from_slice(action);
        assert_eq!(code(&run(&args)), 0, "{action:?}");
    }
}

#[test]
fn selftest_runs() {
    assert_eq!(code(&run(&["selftest", "--d-max", "0", "--trials", "1"])), 0);
    assert_eq!(code(&run(&["selftest", "--d-max", "3", "--trials", "8", "--force-bug"])), 3);
    assert_eq!(code(&run(&["selftest", "--trials", "0"])), 2);
}

#[test]
fn selftest_spec_configuration() {
    assert_eq!(code(&run(&["selftest", "--d-max", "8", "--trials", "100", "--seed", "42"])), 0);
}

#[test]
fn seed_from_environment_and_stable_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_spectralpath"))
        .args(["scheme", "builtin:hypercube(3)", "info", "--json"])
        .env("SPECTRALPATH_SEED", "17")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 17);
    let bad = Command::new(env!("CARGO_BIN_EXE_spectralpath"))
        .args(["scheme", "builtin:hypercube(3)", "info"])
        .env("SPECTRALPATH_SEED", "seventeen")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let a = run(&["selftest", "--d-max", "4", "--trials", "10", "--seed", "5", "--json"]);
    let b = run(&["selftest", "--d-max", "4", "--trials", "10", "--seed", "5", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_flags_validated_and_echoed() {
    let f = file(PATH3);
    let p = f.path().to_str().unwrap();
    let (c, v) = json(&["analyze", p, "--residual-tol", "1e-6"]);
    assert_eq!(c, 0);
    assert_eq!(v["tolerance"]["residual_tol"], 1e-6);
    assert_eq!(code(&run(&["analyze", p, "--eig-tol", "-1"])), 2);
}
