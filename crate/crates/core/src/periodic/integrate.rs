use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::symmetry::distance_mod_rotation;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationResult {
    pub times: Vec<f64>,
    pub q: Vec<DVector<f64>>,
    pub qdot: Vec<DVector<f64>>,
    pub energy: Vec<f64>,
    /// `max |E(t) - E(0)|`.
    pub energy_drift: f64,
    pub first_return: Option<f64>,
}

impl IntegrationResult {
    pub fn final_state(&self) -> (&DVector<f64>, &DVector<f64>) {
        (self.q.last().expect("non-empty"), self.qdot.last().expect("non-empty"))
    }
}

pub fn energy(model: &PotentialModel, q: &DVector<f64>, qdot: &DVector<f64>) -> Result<f64> {
    Ok(0.5 * qdot.norm_squared() + model.potential_at(q)?)
}

pub(crate) fn phase_point(q: &DVector<f64>, qdot: &DVector<f64>) -> DVector<f64> {
    let mut z = DVector::zeros(q.len() + qdot.len());
    z.rows_mut(0, q.len()).copy_from(q);
    z.rows_mut(q.len(), qdot.len()).copy_from(qdot);
    z
}

/// Velocity-Verlet for `q'' = -grad U(q)` over `[0, t_final]`. The step is
/// shrunk so that a whole number of steps lands on `t_final`.
pub fn integrate_ode(
    model: &PotentialModel,
    q_init: &DVector<f64>,
    qdot_init: &DVector<f64>,
    t_final: f64,
    step: f64,
) -> Result<IntegrationResult> {
    if !(t_final > 0.0 && t_final.is_finite()) || !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need positive horizon and step, got T = {t_final}, h = {step}"
        )));
    }
    if q_init.len() != model.dim() || qdot_init.len() != model.dim() {
        return Err(Error::InvalidArgument("initial data has the wrong dimension".into()));
    }
    let n = (t_final / step).ceil().max(1.0) as usize;
    let h = t_final / n as f64;
    let mut q = q_init.clone();
    let mut p = qdot_init.clone();
    let mut g = model.gradient_at(&q)?;
    let e0 = energy(model, &q, &p)?;
    let mut out = IntegrationResult {
        times: Vec::with_capacity(n + 1),
        q: Vec::with_capacity(n + 1),
        qdot: Vec::with_capacity(n + 1),
        energy: Vec::with_capacity(n + 1),
        energy_drift: 0.0,
        first_return: None,
    };
    out.times.push(0.0);
    out.q.push(q.clone());
    out.qdot.push(p.clone());
    out.energy.push(e0);
    for i in 1..=n {
        p.axpy(-0.5 * h, &g, 1.0);
        q.axpy(h, &p, 1.0);
        g = model.gradient_at(&q)?;
        p.axpy(-0.5 * h, &g, 1.0);
        let e = energy(model, &q, &p)?;
        if !e.is_finite() {
            return Err(Error::Overflow);
        }
        out.energy_drift = out.energy_drift.max((e - e0).abs());
        out.times.push(i as f64 * h);
        out.q.push(q.clone());
        out.qdot.push(p.clone());
        out.energy.push(e);
    }
    out.first_return = first_return_time(&out);
    Ok(out)
}

/// First local minimum of the phase-space distance to the initial state,
/// modulo rotation, once the orbit has moved away from it. Velocities are
/// weighted by the ratio of position to velocity excursions. Refined by a
/// parabola through the neighbouring samples.
pub fn first_return_time(res: &IntegrationResult) -> Option<f64> {
    let (q0, p0) = (&res.q[0], &res.qdot[0]);
    let spread = |xs: &[DVector<f64>], x0: &DVector<f64>| xs.iter().map(|x| (x - x0).norm()).fold(0.0, f64::max);
    let (sq, sp) = (spread(&res.q, q0), spread(&res.qdot, p0));
    let w = if sp > 0.0 { sq / sp } else { 1.0 };
    let z0 = phase_point(q0, &(p0 * w));
    let d: Vec<f64> = res
        .q
        .iter()
        .zip(&res.qdot)
        .map(|(q, p)| distance_mod_rotation(&phase_point(q, &(p * w)), &z0))
        .collect();
    let mut far = 0.0f64;
    for i in 1..d.len().saturating_sub(1) {
        far = far.max(d[i]);
        if far <= 1e-12 * (1.0 + z0.norm()) {
            continue;
        }
        if d[i] <= d[i - 1] && d[i] <= d[i + 1] && d[i] < 0.25 * far {
            let (ym, y0, yp) = (d[i - 1], d[i], d[i + 1]);
            let h = res.times[i + 1] - res.times[i];
            let denom = ym - 2.0 * y0 + yp;
            let shift = if denom > 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
            return Some(res.times[i] + shift.clamp(-1.0, 1.0) * h);
        }
    }
    None
}
