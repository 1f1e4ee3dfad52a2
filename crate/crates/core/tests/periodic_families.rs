use std::f64::consts::PI;
use std::time::Instant;

use symcenter::critical::{lj_equilibria, schwarzschild_equilibrium, CriticalOrbit};
use symcenter::periodic::{
    amplitude_grid, continue_all_branches, continue_family, verify_orbit, ContinuationOptions,
    OrbitFamily, VerifyOptions,
};
use symcenter::potential::PotentialModel;
use symcenter::spectral::{analyze_hessian, SpectralData, SpectralMode, DEFAULT_CLUSTER_TOL};
use symcenter::symmetry::rotate_configuration;

fn setup(model: &PotentialModel, orbit: &CriticalOrbit) -> SpectralData {
    analyze_hessian(model, orbit, SpectralMode::ComReduced, DEFAULT_CLUSTER_TOL).unwrap()
}

fn report(f: &OrbitFamily) {
    for s in &f.samples {
        eprintln!(
            "j0={} br={} a={:.2e} T={:.9} res={:.1e} it={} dist={:.3e} mu={:?}",
            f.j0, f.branch, s.amplitude, s.period, s.residual, s.newton_iterations, s.dist_to_orbit, s.unfolding
        );
    }
    if let Some(t) = &f.truncated {
        eprintln!("truncated: {t}");
    }
}

#[test]
fn lj3_equilateral_families() {
    let t0 = Instant::now();
    let model = PotentialModel::lennard_jones(3).unwrap();
    let orbit = lj_equilibria(3).unwrap().into_iter().find(|o| o.label == "q04").unwrap();
    let data = setup(&model, &orbit);
    let amps = amplitude_grid(1e-4, 1e-2, 5).unwrap();
    let opts = ContinuationOptions::default();
    let limits = [PI / (3.0 * 6f64.sqrt()), PI / (3.0 * 3f64.sqrt())];
    for (j0, limit) in [1, 2].into_iter().zip(limits) {
        for fam in continue_all_branches(&model, &orbit, &data, j0, &amps, &opts).unwrap() {
            report(&fam);
            assert!(fam.truncated.is_none());
            assert!((fam.limit_period - limit).abs() < 1e-9);
            let first = &fam.samples[0];
            assert!((first.period - limit).abs() < 1e-3);
            let checked = verify_orbit(&model, orbit.q0.coords(), first, &VerifyOptions::default()).unwrap();
            assert!(checked.closure_error.unwrap() < 1e-8, "{:?}", checked.closure_error);
            assert_eq!(checked.minimal_period_ok, Some(true));
        }
    }
    eprintln!("elapsed {:?}", t0.elapsed());
}

#[test]
fn schwarzschild_example_families() {
    let a = [-1.5, -1.0, -0.6];
    let b = [0.5, 1.0 / 3.0, 0.2];
    let model = PotentialModel::schwarzschild3(a, b).unwrap();
    let profiles = [model.pair(0, 1).clone(), model.pair(0, 2).clone(), model.pair(1, 2).clone()];
    let orbit = schwarzschild_equilibrium(&profiles, 0.0).unwrap();
    let data = setup(&model, &orbit);
    let amps = amplitude_grid(1e-4, 1e-2, 5).unwrap();
    for j0 in 1..=3 {
        let fam = continue_family(&model, &orbit, &data, j0, &amps, &ContinuationOptions::default()).unwrap();
        report(&fam);
        assert!(fam.truncated.is_none());
        for s in &fam.samples {
            let v = verify_orbit(&model, orbit.q0.coords(), s, &VerifyOptions::default()).unwrap();
            assert!(v.closure_error.unwrap() < 1e-8, "{:?}", v.closure_error);
        }
    }
    let fam = continue_family(&model, &orbit, &data, 3, &amps[..1], &ContinuationOptions::default()).unwrap();
    assert!((fam.samples[0].period - 2.0 * PI / 2.02768715f64.sqrt()).abs() < 1e-3);
}

#[test]
fn lj2_verification_and_rotation_covariance() {
    let model = PotentialModel::lennard_jones(2).unwrap();
    let orbit = lj_equilibria(2).unwrap().remove(0);
    let data = setup(&model, &orbit);
    let amps = amplitude_grid(1e-4, 1e-2, 5).unwrap();
    let fam = continue_family(&model, &orbit, &data, 1, &amps, &ContinuationOptions::default()).unwrap();
    let mut dists = Vec::new();
    for s in &fam.samples {
        let v = verify_orbit(&model, orbit.q0.coords(), s, &VerifyOptions::default()).unwrap();
        assert!(v.closure_error.unwrap() < 1e-8);
        assert_eq!(v.minimal_period_ok, Some(true));
        assert!(v.period < (7.0 * PI / 6.0) * (7.0f64 / 32.0).powf(1.0 / 6.0));
        dists.push(v.dist_to_orbit);
        let doubled = {
            let mut d = v.clone();
            d.trajectory = v.trajectory.with_doubled_modes();
            d
        };
        let dv = verify_orbit(&model, orbit.q0.coords(), &doubled, &VerifyOptions::default()).unwrap();
        assert_eq!(dv.minimal_period_ok, Some(false));
    }
    assert!(dists.windows(2).all(|w| w[0] < w[1]));
    assert!((dists[2] / 1e-3 - 1.0).abs() < 0.1, "{dists:?}");

    let theta = 0.7;
    let rotated = CriticalOrbit::from_critical_point(&model, "rot", rotate_configuration(&orbit.q0, theta), 1e-10).unwrap();
    let rdata = setup(&model, &rotated);
    let rfam = continue_family(&model, &rotated, &rdata, 1, &amps, &ContinuationOptions::default()).unwrap();
    for (s, r) in fam.samples.iter().zip(&rfam.samples) {
        assert!((s.lambda - r.lambda).abs() < 1e-12);
        let x = symcenter::symmetry::rotate_vector(&s.trajectory.eval(0.3), theta);
        let y = r.trajectory.eval(0.3);
        let y_shift = r.trajectory.eval(0.3 + PI);
        assert!((&x - &y).norm().min((&x - &y_shift).norm()) < 1e-10);
    }
}
