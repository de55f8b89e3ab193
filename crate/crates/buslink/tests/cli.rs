use std::path::Path;
use std::process::{Command, Output};

fn buslink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_buslink")).args(args).env_remove("BUSLINK_LOG").output().unwrap()
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = write(&dir.path().join("c.json"), r#"{"scenario": "link_budget", "link_budget": {"cable_length_m": 2}}"#);
    let o = buslink(&["link_budget", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["metadata"]["seed"], 5);
    assert_eq!(summary["metadata"]["config"]["link_budget"]["cable_length_m"], 2.0);
    assert!(out.join("link_budget.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let bad = write(&dir.path().join("bad.json"), "{\"physics\": {\"g_khz\": }}");
    let o = buslink(&["transfer", "--config", &bad, "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(buslink(&["entangle_hom", "--set", "physics.kappa_b_khz=1e5", "--out", out]).status.code(), Some(2));
    assert_eq!(buslink(&["link_budget", "--threads", "0", "--out", out]).status.code(), Some(2));
    let other = write(&dir.path().join("other.json"), r#"{"scenario": "transfer"}"#);
    assert_eq!(buslink(&["link_budget", "--config", &other, "--out", out]).status.code(), Some(2));
    assert_eq!(buslink(&["no_such_scenario"]).status.code(), Some(2));
    assert!(!Path::new(out).exists());
}

#[test]
fn simulation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = buslink(&[
        "wigner_export",
        "--set",
        "wigner.reconstruct_dim=8",
        "--set",
        "wigner.mle_max_iterations=1",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(&dir.path().join("plain"), "x");
    let o = buslink(&["link_budget", "--out", &format!("{file}/sub")]);
    assert_eq!(o.status.code(), Some(4));
    let missing = dir.path().join("missing.json");
    assert_eq!(buslink(&["link_budget", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(buslink(&["validate", missing.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn validate_reports_derived_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(&dir.path().join("good.json"), r#"{"scenario": "entangle_single"}"#);
    let o = buslink(&["validate", &good]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["diagnostics"].as_array().unwrap().len(), 0);
    assert!((report["derived"]["t_swap_ns"].as_f64().unwrap() - 631.3).abs() < 0.1);
    assert!((report["derived"]["t50_ns"].as_f64().unwrap() - 546.8).abs() < 0.1);
    assert!(report["derived"]["eta"].as_f64().is_some());

    let bad = write(&dir.path().join("bad.json"), r#"{"physics": {"kappa_b_khz": 4000}}"#);
    let o = buslink(&["validate", &bad, "--scenario", "transfer"]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["diagnostics"][0]["field"], "physics.kappa_b_khz");
    assert!(report["derived"]["eta"].is_null());
    assert_eq!(buslink(&["validate", &bad]).status.code(), Some(2));
}

#[test]
fn gnuplot_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(&dir.path().join("t.csv"), "a [1],b [1],c [1]\n0,0,1\n1,0,2\n");
    let o = buslink(&["gnuplot", &csv]);
    assert_eq!(o.status.code(), Some(0));
    let dat = std::fs::read_to_string(dir.path().join("t.dat")).unwrap();
    assert_eq!(dat, "# \"a [1]\" \"b [1]\" \"c [1]\"\n0 0 1\n\n1 0 2\n");
}

#[test]
fn log_level_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_buslink"))
        .args(["link_budget", "--out", dir.path().to_str().unwrap()])
        .env("BUSLINK_LOG", "info")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains("running link_budget"));
    assert!(buslink(&["link_budget", "--out", dir.path().to_str().unwrap()]).stderr.is_empty());
}
