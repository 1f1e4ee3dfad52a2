use std::path::Path;
use std::process::{Command, Output};

use symcenter::report::AnalysisReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symcenter"))
        .args(args)
        .env_remove("SYMCENTER_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(dir: &Path) -> AnalysisReport {
    AnalysisReport::read(&dir.join("report.toml")).unwrap()
}

#[test]
fn euler_examples() {
    for (expr, want) in [
        ("S[0;(2,1),(1,3)]", "I - 2·X(1) - X(3)"),
        ("X(2)*X(3)", "0"),
        ("(I - X(1))*(I + X(1))", "I"),
    ] {
        let o = run(&["euler", expr]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want);
    }
    let o = run(&["euler", "I + X("]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));
}

#[test]
fn analyze_lj2_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["analyze", "--preset", "lj2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    let orbit = &r.orbits[0];
    let com = orbit.spectra.iter().find(|s| s.betas.len() == 1).unwrap();
    assert_eq!(com.betas, vec![(12.0, 1)]);
    assert!(orbit.certificates[0].changed);
    let first = std::fs::read(dir.path().join("report.toml")).unwrap();
    run(&["analyze", "--preset", "lj2", "--out", out]);
    assert_eq!(first, std::fs::read(dir.path().join("report.toml")).unwrap());
}

#[test]
fn analyze_schwarzschild_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "analyze",
        "--preset",
        "schwarzschild-example",
        "--mode",
        "ambient",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    let amb = &r.orbits[0].spectra[0];
    let nonzero: Vec<f64> = amb.eigenvalues.iter().map(|c| c.value).filter(|v| v.abs() > 1e-8).collect();
    for (got, want) in nonzero.iter().zip([2.027, 3.475, 6.897]) {
        assert!((got - want).abs() < 1e-3, "{nonzero:?}");
    }
}

#[test]
fn malformed_config_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[problem]\ntype = \"lennard_jones\"\nn = 2\n\n[options]\ncluster_tol = \"small\"\n").unwrap();
    let o = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("options.cluster_tol"), "{}", stderr(&o));
    assert!(!dir.path().join("report.toml").exists());
}

#[test]
fn hypothesis_failure_exits_two_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("saddle.toml");
    let mut config = symcenter::presets::preset("lj3").unwrap();
    config.seeds.retain(|s| s.label == "q01");
    config.seeds[0].control = false;
    std::fs::write(&path, config.to_toml_string().unwrap()).unwrap();
    let o = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    let r = report(dir.path());
    assert!(!r.orbits[0].failures.is_empty());
    assert!(r.orbits[0].certificates.is_empty());
}

#[test]
fn orbits_lj3_second_frequency_has_two_branches() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["orbits", "--preset", "lj3", "--j0", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    let fams = &r.orbit("q04").unwrap().families;
    assert_eq!(fams.len(), 2);
    let limit = std::f64::consts::PI / (3.0 * 3f64.sqrt());
    for f in fams {
        assert!((f.samples[0].period - limit).abs() < 1e-3);
    }
    let traj = dir.path().join("trajectories");
    assert!(traj.join("q04_j2_b0_summary.csv").exists());
    assert!(traj.join("q04_j2_b1_a00.csv").exists());
}

#[test]
fn orbits_lj2_period_near_limit_at_small_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["orbits", "--preset", "lj2", "--j0", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    let fam = &r.orbits[0].families[0];
    let limit = std::f64::consts::PI / 6.0;
    assert!(fam.samples.iter().filter(|s| s.amplitude <= 5e-3).all(|s| (s.period - limit).abs() < 1e-3));
    let last = fam.samples.last().unwrap();
    assert!((last.period - limit).abs() < 3e-3);
}

#[test]
fn orbits_invalid_j0_lists_admissible() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["orbits", "--preset", "lj2", "--j0", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("admissible: [1]"), "{}", stderr(&o));
}

#[test]
fn validate_subset_runs_only_named_presets() {
    let o = run(&["validate", "--preset", "schwarzschild-example"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("schwarzschild-example"));
    assert!(!out.contains("lj2") && !out.contains("lj3"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn validate_reports_failed_rows() {
    let o = run(&["validate", "--preset", "lj2"]);
    let out = stdout(&o);
    let failed: Vec<&str> = out.lines().filter(|l| l.contains("FAIL")).collect();
    // the large-amplitude period row misses its tolerance
    assert_eq!(failed.len(), 1, "{out}");
    assert!(failed[0].contains("family-period"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_preset_and_missing_input_fail() {
    assert_eq!(run(&["analyze", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "--preset", "nope"]).status.code(), Some(1));
    assert_ne!(run(&["analyze"]).status.code(), Some(0));
}
