//! End-to-end exit-status and determinism checks against the built binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bpz() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bpz"))
}

fn workspace_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bpz().args(args).output().expect("spawn bpz")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_passes_with_exit_zero() {
    let out = run(&["verify", "--r", "2", "--chi", "gamma/2"]);
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    assert_eq!(report["all_zero"], serde_json::Value::Bool(true));
    assert_eq!(report["chi_mode"], "gamma/2");
}

#[test]
fn verify_both_modes_emits_two_reports() {
    let out = run(&["verify", "--r", "3", "--chi", "both"]);
    assert_code(&out, 0);
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.as_array().map(Vec::len), Some(2));
}

#[test]
fn invalid_order_is_operational_error() {
    assert_code(&run(&["verify", "--r", "1", "--chi", "both"]), 2);
    assert_code(&run(&["verify", "--r", "0", "--chi", "both", "--dry-run"]), 2);
    assert_code(&run(&["table", "--r", "1"]), 2);
}

#[test]
fn dry_run_validates_without_computing() {
    let out = run(&["verify", "--r", "3", "--chi", "both", "--dry-run"]);
    assert_code(&out, 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dry run"));
}

#[test]
fn unknown_flags_exit_two() {
    assert_code(&run(&["verify", "--r", "2", "--frobnicate"]), 2);
    assert_code(&run(&["no-such-subcommand"]), 2);
}

#[test]
fn table_csv_has_expected_header() {
    let out = run(&["table", "--r", "3", "--chi", "gamma/2", "--format", "csv"]);
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("p,q,value"), "got: {text}");
}

#[test]
fn verify_reports_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = run(&["verify", "--r", "4", "--chi", "both", "--out", p.to_str().unwrap()]);
        assert_code(&out, 0);
    }
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p1).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p2).unwrap()).unwrap();
    for v in [&mut a, &mut b] {
        for report in v.as_array_mut().unwrap() {
            report["elapsed_ms"] = serde_json::Value::Null;
        }
    }
    assert_eq!(a, b);
}

#[test]
fn jet_oracle_runs_and_is_bytewise_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = run(&[
            "oracle-jet",
            "--r", "2",
            "--chi", "2/gamma",
            "--n", "3",
            "--trials", "4",
            "--seed", "7",
            "--out", p.to_str().unwrap(),
        ]);
        assert_code(&out, 0);
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "jet reports must be byte-identical for a fixed seed");
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["all_zero"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], 7);
}

#[test]
fn jet_oracle_rejects_too_few_insertions() {
    let out = run(&["oracle-jet", "--r", "3", "--n", "2", "--trials", "1"]);
    assert_code(&out, 2);
}

#[test]
fn coulomb_oracle_passes_on_shipped_config() {
    let cfg = workspace_file("configs/coulomb_r2_l1.json");
    let out = run(&["oracle-coulomb", "--config", cfg.to_str().unwrap(), "--chi", "both"]);
    assert_code(&out, 0);
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in reports.as_array().unwrap() {
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn coulomb_oracle_findings_exit_one() {
    // An unreachable tolerance turns the pass into a mathematical finding.
    let cfg = workspace_file("configs/coulomb_r2_l1.json");
    let out = run(&[
        "oracle-coulomb",
        "--config", cfg.to_str().unwrap(),
        "--tol", "1e-18",
    ]);
    assert_code(&out, 1);
}

#[test]
fn coulomb_oracle_missing_config_exits_two() {
    assert_code(&run(&["oracle-coulomb", "--config", "/no/such/file.json"]), 2);
    // and a structurally invalid config as well
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"r\": 2}").unwrap();
    assert_code(&run(&["oracle-coulomb", "--config", bad.to_str().unwrap()]), 2);
}

#[test]
fn render_evaluates_point_config() {
    let cfg = workspace_file("configs/point_sphere.json");
    let out = run(&["render", "--config", cfg.to_str().unwrap(), "--n", "3"]);
    assert_code(&out, 0);
    let payload: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["p_values"].as_array().map(Vec::len), Some(3));
}

#[test]
fn bench_prints_timing_table() {
    let out = run(&["bench", "--r", "4", "--chi", "gamma/2"]);
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("compositions"));
}
