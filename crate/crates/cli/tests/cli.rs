use std::path::Path;
use std::process::Command;

use preq_cli::{run, BasePoints, CliError, FamilySpec, HamiltonianSpec, Scenario, Task};
use serde_json::Value;

fn preq() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_preq"));
    c.env("PREQ_LOG", "quiet");
    c
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn results(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

#[test]
fn kappa_scenario_for_invariant_loop() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "task": "kappa", "hamiltonian": {"kind": "invariant", "a": 1, "b": 0}, "base_points": "auto:10"}"#,
    );
    let out = dir.path().join("out");
    let st = preq().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let r = results(&out);
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts.len(), 10);
    for p in pts {
        let ph = p["phase_rev"].as_f64().unwrap();
        assert!((0.0..1.0).contains(&ph));
        assert!((ph - 0.5).abs() < 1e-6);
    }
    assert!(r["spread"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["pass"], Value::Bool(true));
}

#[test]
fn zero_hamiltonian_has_trivial_phase() {
    let mut sc = Scenario::minimal(3, Task::Kappa);
    sc.hamiltonian = Some(HamiltonianSpec::Zero);
    sc.base_points = BasePoints::List(vec![[0.3, 0.2], [2.0, 5.0]]);
    let rec = run(&sc).unwrap();
    for p in &rec.points {
        assert_eq!(p.phase_rev, 0.0);
        assert_eq!(p.chart_transitions, 0);
    }
    assert!(rec.pass);
}

#[test]
fn mixed_and_scaled_hamiltonians() {
    let mut sc = Scenario::minimal(1, Task::Action);
    sc.hamiltonian = Some(HamiltonianSpec::Mix {
        weights: [0.6, 0.8],
        profile: preq_cli::config::Profile::CosineRamp,
    });
    let rec = run(&sc).unwrap();
    assert!(rec.points.iter().all(|p| (p.phase_rev - 0.5).abs() < 1e-6 && p.action.is_some()));
    // twice around: trivial for every n
    sc.hamiltonian = Some(HamiltonianSpec::Scaled {
        base: Box::new(HamiltonianSpec::Invariant { a: 0.0, b: 1.0, z: 0.0 }),
        factor: 2.0,
    });
    let rec = run(&sc).unwrap();
    assert!(rec.points.iter().all(|p| preq_core::circle_distance(p.phase_rev, 0.0) < 1e-6));
}

#[test]
fn winding_scenario_writes_unwrapped_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 2, "task": "winding", "family": {"kind": "subgroup-rotation"}, "s_samples": 64,
            "base_points": [[1.0, 0.5]]}"#,
    );
    let st = preq().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let r = results(dir.path());
    assert_eq!(r["deg"], Value::from(0));
    let csv = std::fs::read_to_string(dir.path().join("phases.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,phase_rev,kappa_re,kappa_im"));
    let phases: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(phases.len(), 65);
    assert!(phases.windows(2).all(|w| (w[1] - w[0]).abs() < 0.25));
}

#[test]
fn omega_scenario_reports_slopes() {
    let mut sc = Scenario::minimal(1, Task::Omega);
    sc.hamiltonian = Some(HamiltonianSpec::Invariant { a: 1.0, b: 0.0, z: 0.0 });
    sc.family = Some(FamilySpec::Offset { c: 0.25 });
    sc.base_points = BasePoints::Auto(4);
    sc.s_values = vec![0.5];
    let rec = run(&sc).unwrap();
    assert!(rec.omega[0].values.iter().all(|o| (o - 0.25).abs() < 1e-9));
    assert!(rec.pass);
    sc.family = Some(FamilySpec::TwoAxisMix);
    let rec = run(&sc).unwrap();
    assert!(rec.omega[0].values.iter().all(|o| o.abs() < 1e-6));
    assert!(rec.pass);
}

#[test]
fn config_errors_exit_with_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (body, field) in [
        (r#"{"n": 0, "task": "verify"}"#, "n"),
        (r#"{"n": 1, "task": "kappa"}"#, "hamiltonian"),
        (r#"{"n": 1, "task": "winding", "family": {"kind": "two-axis-mix"}}"#, "family"),
        (r#"{"n": 1, "task": "kappa", "hamiltonian": {"kind": "zero"}, "base_points": "auto:x"}"#, "config"),
        (r#"{"n": 1, "task": "nope"}"#, "config"),
    ] {
        let cfg = write_config(dir.path(), body);
        let out = preq().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{body}");
        let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(rec["error"], "config");
        assert_eq!(rec["element"], field);
    }
}

#[test]
fn open_loop_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "task": "kappa", "hamiltonian": {"kind": "invariant", "a": 0.5, "b": 0}}"#,
    );
    let out = preq().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["error"], "numerical");
    assert_eq!(rec["element"], "hamiltonian");

    let mut sc = Scenario::minimal(1, Task::Kappa);
    sc.hamiltonian = Some(HamiltonianSpec::Scaled {
        base: Box::new(HamiltonianSpec::Invariant { a: 1.0, b: 0.0, z: 0.0 }),
        factor: 1.5,
    });
    assert!(matches!(run(&sc), Err(CliError::Numerical { .. })));
}

#[test]
fn su2_demo_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let st = preq().args(["su2-demo", "--n", "2", "--out"]).arg(dir.path()).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let r = results(dir.path());
    let vals = r["demo"]["critical_values"].as_array().unwrap();
    let gap = (vals[0].as_f64().unwrap() - vals[1].as_f64().unwrap()).abs();
    assert!((gap - 2.0).abs() < 1e-9);
    assert!(dir.path().join("phases.csv").exists());

    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "task": "kappa", "hamiltonian": {"kind": "zero"}, "base_points": "auto:3",
            "output": {"format": "csv"}}"#,
    );
    let out = dir.path().join("csv");
    let st = preq().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("points.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn verify_verdicts_do_not_depend_on_seed() {
    let verdicts = |seed| {
        let mut sc = Scenario::minimal(5, Task::Verify);
        sc.seed = seed;
        run(&sc).unwrap().suite.iter().map(|e| (e.name.clone(), e.pass)).collect::<Vec<_>>()
    };
    let a = verdicts(7);
    assert_eq!(a, verdicts(11));
    assert!(a.iter().all(|(_, p)| *p));
}

#[test]
fn scenario_round_trips_through_json() {
    let text = r#"{"n": -2, "task": "omega", "family": {"kind": "perturbed-subgroup", "eps": 0.1},
                   "base_points": [[0.1, 0.2]], "tolerances": {"phase_tol": 1e-7}, "s_values": [0.3]}"#;
    let sc = Scenario::from_json(text).unwrap();
    assert_eq!(sc.tolerances.flow_rel_tol, 1e-10);
    let back = Scenario::from_json(&serde_json::to_string(&sc).unwrap()).unwrap();
    assert_eq!(sc, back);
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 5);
}
