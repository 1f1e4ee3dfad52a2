//! Winding number of a planar vector field along a closed loop.
//!
//! Used as an independent check that an isolated minimum has local degree 1
//! (the gradient of a function at an isolated minimum winds once).

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;
/// Largest accepted angle increment between neighbouring samples.
const MAX_STEP_ANGLE: f64 = std::f64::consts::FRAC_PI_2;
const MAX_REFINEMENTS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeOptions {
    pub samples: usize,
    /// Field norms below this on the loop are treated as zeros.
    pub min_norm: f64,
    /// Distance of the accumulated winding from an integer that is still accepted.
    pub integer_tol: f64,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self {
            samples: 256,
            min_norm: 1e-10,
            integer_tol: 1e-6,
        }
    }
}

fn angle_between(a: (f64, f64), b: (f64, f64)) -> f64 {
    let cross = a.0 * b.1 - a.1 * b.0;
    let dot = a.0 * b.0 + a.1 * b.1;
    cross.atan2(dot)
}

/// Winding number of `field(t)`, `t` in `[0, 1)`, around the origin.
///
/// Starts from `opts.samples` uniform samples and bisects every interval
/// whose angle increment exceeds a quarter turn.
pub fn winding_degree(field: impl Fn(f64) -> (f64, f64), opts: &DegreeOptions) -> Result<i64> {
    if opts.samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            opts.samples
        )));
    }
    let eval = |t: f64| -> Result<(f64, f64)> {
        let v = field(t);
        let norm = v.0.hypot(v.1);
        if !(norm > opts.min_norm) {
            return Err(Error::VanishingField { t, norm });
        }
        Ok(v)
    };
    let mut total = 0.0;
    for s in 0..opts.samples {
        let t0 = s as f64 / opts.samples as f64;
        let t1 = (s + 1) as f64 / opts.samples as f64;
        total += segment_angle(&eval, t0, eval(t0)?, t1, eval(t1 % 1.0)?, 0)?;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > opts.integer_tol {
        return Err(Error::AngularResolution {
            refinements: MAX_REFINEMENTS,
        });
    }
    Ok(rounded as i64)
}

fn segment_angle(
    eval: &impl Fn(f64) -> Result<(f64, f64)>,
    t0: f64,
    v0: (f64, f64),
    t1: f64,
    v1: (f64, f64),
    depth: usize,
) -> Result<f64> {
    let d = angle_between(v0, v1);
    if d.abs() <= MAX_STEP_ANGLE {
        return Ok(d);
    }
    if depth >= MAX_REFINEMENTS {
        return Err(Error::AngularResolution { refinements: depth });
    }
    let tm = 0.5 * (t0 + t1);
    let vm = eval(tm)?;
    Ok(segment_angle(eval, t0, v0, tm, vm, depth + 1)? + segment_angle(eval, tm, vm, t1, v1, depth + 1)?)
}

/// Winding number of a pre-sampled closed loop of field values (the last
/// sample connects back to the first). Fails if any increment reaches `pi`.
pub fn winding_degree_sampled(values: &[(f64, f64)], opts: &DegreeOptions) -> Result<i64> {
    if values.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            values.len()
        )));
    }
    let n = values.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (values[k], values[(k + 1) % n]);
        let norm = a.0.hypot(a.1);
        if !(norm > opts.min_norm) {
            return Err(Error::VanishingField { t: k as f64 / n as f64, norm });
        }
        let d = angle_between(a, b);
        if d.abs() >= std::f64::consts::PI * (1.0 - 1e-12) {
            return Err(Error::AngularResolution { refinements: 0 });
        }
        total += d;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > opts.integer_tol {
        return Err(Error::AngularResolution { refinements: 0 });
    }
    Ok(rounded as i64)
}

/// Point on the circle of `radius` around `center` at loop parameter `t`.
pub fn circle(center: (f64, f64), radius: f64, t: f64) -> (f64, f64) {
    let a = std::f64::consts::TAU * t;
    (center.0 + radius * a.cos(), center.1 + radius * a.sin())
}
