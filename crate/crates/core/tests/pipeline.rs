use symcenter::config::{AmplitudeConfig, ModeChoice};
use symcenter::pipeline::{analyze, export_families, run_families};
use symcenter::presets::preset;
use symcenter::report::AnalysisReport;
use symcenter::Error;

#[test]
fn lj2_report_and_roundtrip() {
    let a = analyze(&preset("lj2").unwrap()).unwrap();
    assert_eq!(a.exit_code(), 0);
    let o = &a.report.orbits[0];
    let com = o.spectra.iter().find(|s| s.mode == symcenter::spectral::SpectralMode::ComReduced).unwrap();
    assert_eq!(com.betas, vec![(12.0, 1)]);
    assert_eq!(o.certificates.len(), 1);
    assert!(o.certificates[0].changed);
    let text = a.report.to_toml_string().unwrap();
    assert_eq!(AnalysisReport::from_toml_str(&text).unwrap(), a.report);
    // identical input gives byte-identical output
    assert_eq!(analyze(&preset("lj2").unwrap()).unwrap().report.to_toml_string().unwrap(), text);
}

#[test]
fn lj3_controls_fail_without_certificate() {
    let a = analyze(&preset("lj3").unwrap()).unwrap();
    assert_eq!(a.exit_code(), 0);
    for label in ["q01", "q02", "q03"] {
        let o = a.report.orbit(label).unwrap();
        assert!(o.control);
        assert!(!o.hypotheses.minimality);
        assert!(o.failures.iter().any(|f| f.contains("(1)")));
        assert!(o.certificates.is_empty() && o.resonance.is_none());
    }
    let q04 = a.report.orbit("q04").unwrap();
    assert_eq!(q04.resonance.as_ref().unwrap().admissibility.admissible, vec![1, 2]);
    assert!(q04.certificates.iter().all(|c| c.changed));

    let mut failing = preset("lj3").unwrap();
    failing.seeds.iter_mut().for_each(|s| s.control = false);
    assert_eq!(analyze(&failing).unwrap().exit_code(), 2);
}

#[test]
fn ambient_and_reduced_certificates_agree() {
    for name in ["lj2", "lj3", "schwarzschild-example"] {
        let com = analyze(&preset(name).unwrap()).unwrap();
        let mut cfg = preset(name).unwrap();
        cfg.options.mode = ModeChoice::Ambient;
        let amb = analyze(&cfg).unwrap();
        let primary = |r: &AnalysisReport| r.orbits[0].certificates.iter().map(|c| (c.j0, c.changed, c.r_plus - c.r_minus)).collect::<Vec<_>>();
        assert_eq!(primary(&com.report), primary(&amb.report), "{name}");
    }
}

#[test]
fn schwarzschild_all_admissible_and_changed() {
    let a = analyze(&preset("schwarzschild-example").unwrap()).unwrap();
    let o = &a.report.orbits[0];
    assert_eq!(o.resonance.as_ref().unwrap().admissibility.admissible, vec![1, 2, 3]);
    assert_eq!(o.certificates.len(), 3);
    assert!(o.certificates.iter().all(|c| c.changed));
}

#[test]
fn families_and_csv_export() {
    let mut cfg = preset("lj2").unwrap();
    cfg.options.amplitudes = AmplitudeConfig::List(vec![1e-3, 2e-3]);
    cfg.options.n_modes = 8;
    let mut a = analyze(&cfg).unwrap();
    match run_families(&mut a, Some(2)) {
        Err(Error::Inadmissible { j0: 2, admissible }) => assert_eq!(admissible, vec![1]),
        other => panic!("{:?}", other.map(|f| f.len())),
    }
    let fams = run_families(&mut a, Some(1)).unwrap();
    assert_eq!(fams.len(), 1);
    let s = &a.report.orbits[0].families[0];
    assert_eq!(s.samples.len(), 2);
    assert!(s.samples.iter().all(|x| x.closure_error.unwrap() < 1e-8));
    let text = a.report.to_toml_string().unwrap();
    assert_eq!(AnalysisReport::from_toml_str(&text).unwrap(), a.report);

    let dir = tempfile::tempdir().unwrap();
    let files = export_families(&a.model, &fams, dir.path(), 32).unwrap();
    assert_eq!(files.len(), 3);
    let summary = std::fs::read_to_string(&files[0]).unwrap();
    assert!(summary.starts_with("amplitude,lambda,period,residual,closure_error,dist_to_orbit\n"));
    let traj = std::fs::read_to_string(&files[1]).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next().unwrap(), "t,q1x,q1y,q2x,q2y,energy");
    assert_eq!(lines.count(), 32);
}
