//! End-to-end tests of the command-line surface: exit codes, report schema,
//! CSV format and byte-for-byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_translorentz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("translorentz-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn validate_builtin_exits_zero() {
    let out = run(&["validate", "builtin:flat"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["payload"]["valid"], true);
    assert_eq!(json["model"]["builtin"], "flat");
}

#[test]
fn validate_normal_form_violation_exits_two() {
    let dir = tmpdir("gm");
    let path = dir.join("bad_gm.toml");
    std::fs::write(
        &path,
        r#"
dimension = 3
box = [[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]]
g_screen = [["1"]]
g_mix = ["0"]
g_m = "3"
"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("g_m"), "{err}");
}

#[test]
fn validate_malformed_expression_exits_one_with_offset() {
    let dir = tmpdir("parse");
    let path = dir.join("bad_expr.toml");
    std::fs::write(
        &path,
        r#"
dimension = 3
box = [[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]]
g_screen = [["1 + ("]]
g_mix = ["0"]
g_m = "2"
"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("byte"), "{err}");
}

#[test]
fn validate_unknown_usage_exits_one() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["validate", "builtin:nonexistent"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sigma_report_hcurved_values() {
    let out = run(&["sigma-report", "builtin:hcurved", "--point", "0.8,0"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let payload = &json["payload"];
    assert_eq!(payload["flatness"]["ii_flat"], true);
    assert_eq!(payload["flatness"]["h_flat"], false);
    let h = payload["h_screen"][0][0].as_f64().unwrap();
    assert!((h + 0.4).abs() < 1e-12, "{h}");
}

#[test]
fn sigma_report_iicurved_values() {
    let out = run(&["sigma-report", "builtin:iicurved", "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ii = json["payload"]["ii_screen"][0][0].as_f64().unwrap();
    assert!((ii + 0.5).abs() < 1e-12, "{ii}");
    assert_eq!(json["payload"]["flatness"]["ii_flat"], false);
}

#[test]
fn sigma_report_flat_is_all_flat() {
    let out = run(&["sigma-report", "builtin:flat"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let f = &json["payload"]["flatness"];
    assert_eq!(f["ii_flat"], true);
    assert_eq!(f["h_flat"], true);
    assert_eq!(f["iii_flat"], true);
}

#[test]
fn limit_probe_ricci_nn_slope_and_csv() {
    let dir = tmpdir("csv");
    let csv_path = dir.join("probe.csv");
    let out = run(&[
        "limit-probe",
        "builtin:flat",
        "--quantity",
        "ric:NN",
        "--point",
        "0.2,-0.1",
        "--two-sided",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = json["payload"]["report"]["probe"]["slope"]
        .as_f64()
        .unwrap();
    assert!((slope + 2.0).abs() < 0.05, "{slope}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,value"));
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 2);
    fields[0].parse::<f64>().unwrap();
    fields[1].parse::<f64>().unwrap();
    // two-sided: negative-eps rows present
    assert!(csv.lines().any(|l| l.starts_with('-')), "{csv}");
}

#[test]
fn limit_probe_sectional_bounded() {
    let out = run(&[
        "limit-probe",
        "builtin:flat",
        "--quantity",
        "sec:N,V",
        "--point",
        "0.1,0.2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let class = &json["payload"]["report"]["classification"];
    assert_eq!(class["type"], "finite");
    assert!(class["value"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn limit_probe_covariant_iicurved_value() {
    let out = run(&[
        "limit-probe",
        "builtin:iicurved",
        "--quantity",
        "cov:N,V,V,R",
        "--point",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rep = &json["payload"]["report"];
    // Upsilon(N,V,V,R) = 1/2 here, so the quantity diverges at order -1
    assert_eq!(rep["classification"]["type"], "divergent");
    let extrap = rep["probe"]["extrapolated"].as_f64();
    assert!(extrap.is_some());
}

#[test]
fn verify_all_suites_exit_zero() {
    for suite in ["frames", "connections", "curvature", "all"] {
        let out = run(&["verify", "builtin:flat", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "suite {suite}");
    }
    let out = run(&["verify", "builtin:flat", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = [
        "verify",
        "builtin:twisted",
        "--suite",
        "frames",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "limit-probe",
        "builtin:hcurved",
        "--quantity",
        "ric:VW",
        "--point",
        "0.3,0.1",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_env_var_is_honored() {
    let out = bin()
        .args(["verify", "builtin:flat", "--suite", "curvature"])
        .env("TRANSLORENTZ_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["payload"]["threads"], 4);
    assert_eq!(json["payload"]["passed"], true);
}

#[test]
fn custom_config_roundtrip() {
    let dir = tmpdir("custom");
    let path = dir.join("warped.toml");
    std::fs::write(
        &path,
        r#"
dimension = 3
box = [[-0.3, 0.3], [-1.0, 1.0], [-1.0, 1.0]]
g_screen = [["1 + x1*x2"]]
g_mix = ["0"]
g_m = "2 + x1*x3"

[vector_fields.radial]
components = ["0", "0", "1"]
canonical = true
"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["model"]["sha256"].as_str().unwrap().len() == 64);
    // named field usable as a probe slot
    let out = run(&[
        "limit-probe",
        path.to_str().unwrap(),
        "--quantity",
        "cov:N,radial,N,radial",
        "--point",
        "0.2,0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        json["payload"]["report"]["classification"]["type"],
        "divergent"
    );
}
