use nalgebra::DVector;

use super::continuation::OrbitFamilySample;
use super::fourier::FourierTrajectory;
use super::integrate::{integrate_ode, phase_point};
use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::symmetry::distance_mod_rotation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Verlet steps per period on the coarse run; the fine run halves the step.
    pub steps: usize,
    /// Relative tolerance on the first-return time.
    pub return_tol: f64,
    /// A mode is active if its norm exceeds this fraction of the largest mode.
    pub active_mode_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            steps: 4096,
            return_tol: 0.01,
            active_mode_tol: 1e-9,
        }
    }
}

/// `max_t min_theta |x(t) - R_theta q0|` over `samples` equally spaced loop times.
pub fn dist_to_orbit(traj: &FourierTrajectory, q0: &DVector<f64>, samples: usize) -> f64 {
    super::fourier::nodes(samples.max(1))
        .into_iter()
        .map(|t| distance_mod_rotation(q0, &traj.eval(t)))
        .fold(0.0, f64::max)
}

/// Modes `k >= 1` carrying non-negligible energy.
pub fn active_modes(traj: &FourierTrajectory, rel_tol: f64) -> Vec<usize> {
    let norms = traj.mode_norms();
    let top = norms.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Vec::new();
    }
    norms
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > rel_tol * top)
        .map(|(k, _)| k + 1)
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Integrates one period from the Fourier initial data and fills in
/// `closure_error`, `first_return`, `minimal_period_ok` and `dist_to_orbit`.
pub fn verify_orbit(
    model: &PotentialModel,
    q0: &DVector<f64>,
    sample: &OrbitFamilySample,
    opts: &VerifyOptions,
) -> Result<OrbitFamilySample> {
    if opts.steps < 2 {
        return Err(Error::InvalidArgument("verification needs at least 2 steps".into()));
    }
    let traj = &sample.trajectory;
    let period = traj.period();
    let (x0, v0) = traj.state(0.0);
    let z0 = phase_point(&x0, &v0);
    let h = period / opts.steps as f64;
    let coarse = integrate_ode(model, &x0, &v0, period, h)?;
    let fine = integrate_ode(model, &x0, &v0, period, h / 2.0)?;
    let (qc, pc) = coarse.final_state();
    let (qf, pf) = fine.final_state();
    let z = (phase_point(qf, pf) * 4.0 - phase_point(qc, pc)) / 3.0;
    let closure = distance_mod_rotation(&z, &z0);

    let dist = fine
        .q
        .iter()
        .map(|q| distance_mod_rotation(q0, q))
        .fold(0.0, f64::max);

    let modes = active_modes(traj, opts.active_mode_tol);
    let divisor = modes.iter().fold(0, |g, &k| gcd(g, k));
    let (first_return, minimal) = if divisor == 1 {
        let long = integrate_ode(model, &x0, &v0, 1.5 * period, h)?;
        let ok = long
            .first_return
            .is_some_and(|t| (t - period).abs() <= opts.return_tol * period);
        (long.first_return, ok)
    } else {
        (None, false)
    };

    let mut out = sample.clone();
    out.closure_error = Some(closure);
    out.first_return = first_return;
    out.minimal_period_ok = Some(minimal);
    out.dist_to_orbit = dist;
    Ok(out)
}
