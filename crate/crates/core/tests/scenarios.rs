use std::collections::BTreeMap;

use qfridge_core::observables::temperature_series;
use qfridge_core::scenario::{
    compare_regression, list_presets, parse_targets, preset, run_config, run_preset, FeatureValue, RunOutput,
};

fn s1_short() -> RunOutput {
    run_config(&preset("S1").unwrap().with_horizon(50.0).unwrap()).unwrap()
}

#[test]
fn regression_pass_fail_and_empty() {
    let mut reports = BTreeMap::new();
    reports.insert("S1".to_string(), s1_short());

    let empty = parse_targets(r#"{"schema_version": 1}"#).unwrap();
    assert!(compare_regression(&reports, &empty).unwrap().is_empty());

    let targets = parse_targets(
        r#"{"schema_version": 1, "targets": [
            {"preset": "S1", "quantity": "transient_min", "expected": 0.84, "tolerance": 0.02},
            {"preset": "S1", "quantity": "transient_min", "expected": 0.5, "tolerance": 0.01},
            {"preset": "S1", "quantity": "refrigerates", "comparison": "above", "expected": 0.5}]}"#,
    )
    .unwrap();
    let rows = compare_regression(&reports, &targets).unwrap();
    assert_eq!(rows.iter().map(|r| r.pass).collect::<Vec<_>>(), [true, false, true]);
    assert!(rows[1].message.contains("0.5"), "{}", rows[1].message);
    assert!(matches!(rows[1].computed, FeatureValue::Number(x) if (x - 0.8426).abs() < 1e-3));
}

#[test]
fn targets_schema_is_enforced() {
    for bad in [
        r#"{"schema_version": 2, "targets": []}"#,
        r#"{"schema_version": 1, "targets": [{"preset": "nope", "quantity": "steady"}]}"#,
        r#"{"schema_version": 1, "targets": [{"preset": "S1", "quantity": "steady", "tolerance": -1}]}"#,
        r#"{"schema_version": 1, "targets": [{"preset": "S1", "quantity": "steady", "extra": 1}]}"#,
        "not json",
    ] {
        assert!(parse_targets(bad).unwrap_err().is_config(), "{bad}");
    }
}

#[test]
fn aliases_resolve_to_identical_outputs() {
    for (alias, canonical) in [("A1-S2", "A1-S1"), ("A3-S2", "A3-S1"), ("A4-S3", "A4-S2")] {
        let a = run_preset(alias, &["grid.horizon=5"]).unwrap();
        let c = run_preset(canonical, &["grid.horizon=5"]).unwrap();
        assert_eq!(a.name(), canonical);
        assert_eq!(a.trajectory_csv().unwrap(), c.trajectory_csv().unwrap());
        assert_eq!(a.features_csv().unwrap(), c.features_csv().unwrap());
    }
    let listed = list_presets().unwrap();
    assert!(listed.iter().all(|p| !["A1-S2", "A3-S2", "A4-S3"].contains(&p.name)));
}

#[test]
fn halving_tolerance_moves_hybrid_temperature_by_under_1e_6() {
    let base = preset("A3-S1").unwrap().with_horizon(30.0).unwrap();
    let coarse = run_config(&base.apply_overrides(&["solver.atol=1e-11"]).unwrap()).unwrap();
    let fine = run_config(&base.apply_overrides(&["solver.atol=5e-12"]).unwrap()).unwrap();
    assert_eq!(coarse.simulation.trajectory.method, qfridge_core::dynamics::Method::Adaptive);
    let worst = coarse
        .cold_temperatures()
        .iter()
        .zip(fine.cold_temperatures())
        .filter_map(|(a, b)| Some((a.temperature? - b.temperature?).abs()))
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn every_preset_keeps_reduced_states_diagonal() {
    for p in list_presets().unwrap() {
        let run = run_preset(p.name, &["grid.horizon=3"]).unwrap();
        let traj = &run.simulation.trajectory;
        assert!(traj.max_coherence() <= 1e-9, "{}: {:e}", p.name, traj.max_coherence());
        assert!(traj.worst_diagnostics().within(1e-9, 1e-9, 1e-8), "{}", p.name);
        for q in 0..traj.qubits.len() {
            let e = run.energies[q];
            assert_eq!(temperature_series(traj, q, e).unwrap().len(), traj.len());
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let a = run_preset("all-finite", &["grid.horizon=2"]).unwrap();
    let b = run_preset("all-finite", &["grid.horizon=2"]).unwrap();
    assert_eq!(a.trajectory_csv().unwrap(), b.trajectory_csv().unwrap());
}

#[test]
fn override_whitelist() {
    assert!(run_preset("S1", &["model.qubits.0.tau=3"]).unwrap_err().is_config());
    assert!(run_preset("S1", &["grid.horizon=0"]).unwrap_err().is_config());
    let r = run_preset("S1", &["grid.horizon=4", "model.qubits.1.env.alpha=0.01"]).unwrap();
    assert_eq!(r.config.grid.horizon, 4.0);
    assert!(run_preset("S1", &["model.qubits.*.env.alpha=0.01"]).unwrap_err().is_config());
}
