use std::path::Path;
use std::process::{Command, Output};

fn qfridge(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfridge"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("QFRIDGE_OUT")
        .output()
        .expect("spawn qfridge")
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn list_presets_names_catalog_and_aliases() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfridge(dir.path(), &["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["S1", "S2", "S3", "A1-S1", "A4-S2", "all-finite", "Q1", "Q2", "witness"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert!(text.contains("alias A1-S2"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = qfridge(dir.path(), &["--horizon", "10", "run", "single-qubit-N2", "S1"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["single-qubit-N2.csv", "single-qubit-N2_features.csv", "S1.csv", "S1_features.csv"] {
        assert_eq!(read(a.path().join(file)), read(b.path().join(file)), "{file}");
    }
}

#[test]
fn alias_matches_canonical_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(qfridge(a.path(), &["--horizon", "20", "run", "A1-S1"]).status.success());
    assert!(qfridge(b.path(), &["--horizon", "20", "run", "a1-s2"]).status.success());
    for file in ["A1-S1.csv", "A1-S1_features.csv"] {
        assert_eq!(read(a.path().join(file)), read(b.path().join(file)), "{file}");
    }
}

#[test]
fn trajectory_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qfridge(dir.path(), &["--horizon", "5", "run", "Q2"]).status.success());
    let text = String::from_utf8(read(dir.path().join("Q2.csv"))).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,T1,r1,valid,T2,T3,trace_residual,min_eig"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 8);
    assert_eq!(first[0], "0.00000000000e0");
    assert_eq!(first[3], "1");
    // two-qubit model: no third qubit
    assert_eq!(first[5], "NaN");
    // 12 significant digits
    assert_eq!(first[1].split('e').next().unwrap().len(), 13);

    let feats = String::from_utf8(read(dir.path().join("Q2_features.csv"))).unwrap();
    assert!(feats.starts_with("preset,quantity,value\n"));
    assert!(feats.contains("Q2,refrigerates,"));
    assert!(feats.contains("Q2,steady,NONE"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qfridge"))
        .args(["--horizon", "2", "run", "single-qubit-N1"])
        .env("QFRIDGE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("single-qubit-N1.csv").exists());
}

#[test]
fn json_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = qfridge_core::scenario::preset("single-qubit-N1").unwrap().with_horizon(3.0).unwrap();
    let path = dir.path().join("custom.json");
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    let out = qfridge(dir.path(), &["run", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("single-qubit-N1.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "no-such-preset"],
        vec!["--set", "model.qubits.0.energy=3", "run", "S1"],
        vec!["--set", "model.g", "run", "S1"],
        vec!["--horizon", "-1", "run", "S1"],
        vec!["--grid", "1", "run", "S1"],
        vec!["regress", "/nonexistent/targets.json"],
    ] {
        let out = qfridge(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn integration_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfridge(
        dir.path(),
        &["--horizon", "1", "--set", "solver.solver=\"adaptive\"", "--set", "solver.atol=1e-300", "run", "S1"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("S1.csv").exists());
}

#[test]
fn regression_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let empty = write("empty.json", r#"{"schema_version": 1, "targets": []}"#);
    let good = write(
        "good.json",
        r#"{"schema_version": 1, "targets": [
            {"preset": "single-qubit-N2", "quantity": "transient_min", "expected": 0.5, "tolerance": 0.05},
            {"preset": "single-qubit-N2", "quantity": "steady", "comparison": "absent"}]}"#,
    );
    let bad = write(
        "bad.json",
        r#"{"schema_version": 1, "targets": [
            {"preset": "single-qubit-N2", "quantity": "transient_min", "expected": 0.9, "tolerance": 0.01}]}"#,
    );
    let invalid = write("invalid.json", r#"{"schema_version": 1, "targets": [{"preset": "S1"}]}"#);

    assert_eq!(qfridge(dir.path(), &["regress", empty.to_str().unwrap()]).status.code(), Some(0));
    let out = qfridge(dir.path(), &["regress", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = qfridge(dir.path(), &["regress", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL") && text.contains("0.9"), "{text}");
    assert_eq!(qfridge(dir.path(), &["regress", invalid.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn witness_and_rhp_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfridge(dir.path(), &["witness"]);
    assert!(out.status.success());
    let csv = String::from_utf8(read(dir.path().join("witness.csv"))).unwrap();
    assert!(csv.starts_with("t,lambda_nm,T_nm,lambda_m_best,T_m_best,mc\n"));
    assert_eq!(csv.lines().count(), 202);

    let out = qfridge(dir.path(), &["rhp"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("non-monotonic: true"));
    assert!(dir.path().join("rhp.csv").exists());
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfridge(dir.path(), &["--horizon", "200", "sweep-noise", "I", "--strengths", "0.01,0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(read(dir.path().join("sweep_N1-A1-S3.csv"))).unwrap();
    assert!(csv.starts_with("strength,T1_half,T1_probe,delta_half,delta_probe,min_T1,ceased\n"));
    assert_eq!(csv.lines().count(), 3);

    let out = qfridge(dir.path(), &["sweep-noise", "I", "--strengths", "0.1,0.01"]);
    assert_eq!(out.status.code(), Some(2));
}
