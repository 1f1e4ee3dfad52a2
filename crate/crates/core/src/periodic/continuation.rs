//! Gauged Newton continuation of a Liapunov family in the amplitude.
//!
//! Unknowns are the packed Fourier coefficients, `lambda` and two unfolding
//! multipliers `mu_t`, `mu_r` attached to `x'` and `J x`. On a true orbit both
//! multipliers vanish; they absorb the two residual directions that are
//! identically orthogonal to the range (energy and angular momentum).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fourier::{min_nodes, FourierTrajectory};
use super::galerkin::{linearize, Projector};
use super::verify::dist_to_orbit;
use crate::critical::CriticalOrbit;
use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::spectral::{Frequency, SpectralData};
use crate::symmetry::{infinitesimal_rotation, orthonormal_complement, standard_basis, translation_basis};

pub const DEFAULT_MODES: usize = 16;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationOptions {
    pub n_modes: usize,
    /// Quadrature nodes; `None` uses `4M + 4`.
    pub nodes: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    /// Index into the orthonormal basis of the `beta_j0` eigenspace.
    pub branch: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            n_modes: DEFAULT_MODES,
            nodes: None,
            tol: DEFAULT_NEWTON_TOL,
            max_iter: 40,
            branch: 0,
        }
    }
}

/// Logarithmic amplitude grid from `a_min` to `a_max`.
pub fn amplitude_grid(a_min: f64, a_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(a_min > 0.0 && a_max >= a_min) || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "amplitude grid needs 0 < a_min <= a_max and count > 0, got {a_min}, {a_max}, {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![a_min]);
    }
    let (l0, l1) = (a_min.ln(), a_max.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect();
    grid[0] = a_min;
    grid[count - 1] = a_max;
    Ok(grid)
}

pub fn default_amplitudes() -> Vec<f64> {
    amplitude_grid(1e-4, 1e-2, 9).expect("valid grid")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitFamilySample {
    pub amplitude: f64,
    #[serde(skip)]
    pub trajectory: FourierTrajectory,
    pub lambda: f64,
    pub residual: f64,
    pub period: f64,
    pub dist_to_orbit: f64,
    /// Filled by `verify_orbit`.
    pub closure_error: Option<f64>,
    pub minimal_period_ok: Option<bool>,
    pub first_return: Option<f64>,
    pub newton_iterations: usize,
    pub unfolding: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitFamily {
    pub label: String,
    pub j0: usize,
    pub branch: usize,
    pub beta: f64,
    pub multiplicity: usize,
    pub limit_period: f64,
    pub samples: Vec<OrbitFamilySample>,
    /// Set when Newton failed at some amplitude; later amplitudes are skipped.
    pub truncated: Option<String>,
    /// `C` in `lambda(a) - 1/beta ~ C a^2`, least squares over the samples.
    pub lambda_fit_c: Option<f64>,
    pub warnings: Vec<String>,
}

impl OrbitFamily {
    pub fn periods(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.period).collect()
    }
}

fn frequency(spectral: &SpectralData, j0: usize) -> Result<&Frequency> {
    if j0 == 0 || j0 > spectral.betas.len() {
        return Err(Error::Inadmissible {
            j0,
            admissible: (1..=spectral.betas.len()).collect(),
        });
    }
    Ok(&spectral.betas[j0 - 1])
}

/// Orthonormal basis of the eigenspace obtained by projecting the standard
/// basis vectors onto it in order. For a symmetric configuration the first
/// vector is then fixed by any coordinate symmetry that fixes `e_1`.
pub fn cluster_basis(freq: &Frequency) -> Vec<DVector<f64>> {
    let v = &freq.eigenvectors;
    let dim = v.nrows();
    let projected = standard_basis(dim).map(|e| v * (v.transpose() * e));
    let basis = orthonormal_complement(dim, &[], projected.take(dim));
    let mut out: Vec<DVector<f64>> = basis
        .column_iter()
        .take(freq.multiplicity)
        .map(|c| c.into_owned())
        .collect();
    for b in &mut out {
        let i = b.iamax();
        if b[i] < 0.0 {
            *b = -b.clone();
        }
    }
    out
}

/// `q0 + a v cos t` with `lambda = 1/beta_j0`.
pub fn kernel_predictor(
    orbit: &CriticalOrbit,
    spectral: &SpectralData,
    j0: usize,
    amplitude: f64,
    n_modes: usize,
    branch: usize,
) -> Result<FourierTrajectory> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("at least one Fourier mode is required".into()));
    }
    let freq = frequency(spectral, j0)?;
    let basis = cluster_basis(freq);
    let v = basis.get(branch).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "branch {branch} out of range for multiplicity {}",
            freq.multiplicity
        ))
    })?;
    let mut traj = FourierTrajectory::constant(orbit.q0.coords(), n_modes, 1.0 / freq.beta);
    traj.ak[0] = v * amplitude;
    Ok(traj)
}

struct Gauge {
    q0: DVector<f64>,
    /// COM-free part of mode 0 rows.
    mode0_rows: DMatrix<f64>,
    translations: [DVector<f64>; 2],
    rotation: DVector<f64>,
    v: DVector<f64>,
    amplitude: f64,
}

fn derivative_coeffs(packed: &DVector<f64>, m: usize, d: usize) -> DVector<f64> {
    let mut out = DVector::zeros(packed.len());
    for k in 1..=m {
        let kf = k as f64;
        let (ca, sb) = ((2 * k - 1) * d, 2 * k * d);
        out.rows_mut(ca, d).copy_from(&(packed.rows(sb, d) * kf));
        out.rows_mut(sb, d).copy_from(&(packed.rows(ca, d) * -kf));
    }
    out
}

fn rotate_coeffs(packed: &DVector<f64>) -> DVector<f64> {
    infinitesimal_rotation(packed)
}

/// Augmented residual and Jacobian on `z = [packed, lambda, mu_t, mu_r]`.
fn system(
    model: &PotentialModel,
    proj: &Projector,
    gauge: &Gauge,
    z: &DVector<f64>,
    d: usize,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let m = proj.n_modes;
    let p = (2 * m + 1) * d;
    let packed = z.rows(0, p).into_owned();
    let (lambda, mu_t, mu_r) = (z[p], z[p + 1], z[p + 2]);
    let lin = linearize(model, proj, &packed, d, lambda)?;
    let dx = derivative_coeffs(&packed, m, d);
    let jx = rotate_coeffs(&packed);
    let raw = &lin.residual + &dx * mu_t + &jx * mu_r;

    let mut raw_jac = lin.jacobian;
    for k in 1..=m {
        let kf = k as f64;
        let (ca, sb) = ((2 * k - 1) * d, 2 * k * d);
        for i in 0..d {
            raw_jac[(ca + i, sb + i)] += mu_t * kf;
            raw_jac[(sb + i, ca + i)] -= mu_t * kf;
        }
    }
    for i in 0..p / 2 {
        raw_jac[(2 * i, 2 * i + 1)] -= mu_r;
        raw_jac[(2 * i + 1, 2 * i)] += mu_r;
    }

    let n = p + 3;
    let mut f = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, n);
    let mut full = DMatrix::zeros(p, n);
    full.view_mut((0, 0), (p, p)).copy_from(&raw_jac);
    full.set_column(p, &lin.d_lambda);
    full.set_column(p + 1, &dx);
    full.set_column(p + 2, &jx);

    let b0 = &gauge.mode0_rows;
    let r0 = b0.ncols();
    f.rows_mut(0, r0).copy_from(&(b0.transpose() * raw.rows(0, d)));
    jac.view_mut((0, 0), (r0, n))
        .copy_from(&(b0.transpose() * full.rows(0, d)));
    let a0 = packed.rows(0, d).into_owned();
    let dev = &a0 - &gauge.q0;
    for (i, t) in gauge.translations.iter().enumerate() {
        f[r0 + i] = t.dot(&dev);
        jac.view_mut((r0 + i, 0), (1, d)).copy_from(&t.transpose());
    }
    f.rows_mut(d, p - d).copy_from(&raw.rows(d, p - d));
    jac.view_mut((d, 0), (p - d, n)).copy_from(&full.rows(d, p - d));

    f[p] = gauge.rotation.dot(&dev);
    jac.view_mut((p, 0), (1, d)).copy_from(&gauge.rotation.transpose());
    f[p + 1] = gauge.v.dot(&packed.rows(d, d)) - gauge.amplitude;
    jac.view_mut((p + 1, d), (1, d)).copy_from(&gauge.v.transpose());
    f[p + 2] = gauge.v.dot(&packed.rows(2 * d, d));
    jac.view_mut((p + 2, 2 * d), (1, d)).copy_from(&gauge.v.transpose());
    Ok((f, jac))
}

fn solve_linear(jac: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = jac.amax().max(1.0);
    let lu = jac.clone().lu();
    let u_min = (0..jac.nrows())
        .map(|i| lu.u()[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if u_min > 1e-13 * scale {
        if let Some(x) = lu.solve(rhs) {
            if x.iter().all(|v| v.is_finite()) {
                return Some(x);
            }
        }
    }
    let svd = jac.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-14 * smax {
        return None;
    }
    svd.solve(rhs, 0.0).ok()
}

struct Converged {
    z: DVector<f64>,
    residual: f64,
    iterations: usize,
}

fn newton(
    model: &PotentialModel,
    proj: &Projector,
    gauge: &Gauge,
    mut z: DVector<f64>,
    d: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Converged> {
    let (mut f, mut jac) = system(model, proj, gauge, &z, d)?;
    let mut norm = f.norm();
    for it in 0..max_iter {
        if norm < tol {
            return Ok(Converged {
                z,
                residual: norm,
                iterations: it,
            });
        }
        let step = solve_linear(jac.clone(), &f).ok_or(Error::RankDeficient {
            what: "augmented Galerkin Jacobian (gauge failure)".into(),
        })?;
        let mut t = 1.0;
        loop {
            let trial = &z - &step * t;
            match system(model, proj, gauge, &trial, d) {
                Ok((tf, tj)) if tf.norm() < norm || t < 1.0 / 64.0 => {
                    z = trial;
                    f = tf;
                    jac = tj;
                    norm = f.norm();
                    break;
                }
                Err(e) if t < 1.0 / 64.0 => return Err(e),
                _ => t *= 0.5,
            }
        }
    }
    if norm < tol {
        return Ok(Converged {
            z,
            residual: norm,
            iterations: max_iter,
        });
    }
    Err(Error::NonConvergence {
        what: "Galerkin Newton".into(),
        iterations: max_iter,
        residual: norm,
    })
}

/// Continues the family bifurcating from `orbit` at `beta_j0` over
/// increasing `amplitudes`. A Newton failure truncates the family with a
/// diagnostic; a singular gauge system or invalid input is an error.
pub fn continue_family(
    model: &PotentialModel,
    orbit: &CriticalOrbit,
    spectral: &SpectralData,
    j0: usize,
    amplitudes: &[f64],
    opts: &ContinuationOptions,
) -> Result<OrbitFamily> {
    if amplitudes.is_empty() || amplitudes.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidArgument("amplitudes must be positive".into()));
    }
    if amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("amplitudes must be increasing".into()));
    }
    let freq = frequency(spectral, j0)?;
    let d = orbit.q0.dim();
    let m = opts.n_modes;
    let proj = Projector::new(m, opts.nodes.unwrap_or(min_nodes(m)))?;
    let predictor = kernel_predictor(orbit, spectral, j0, 1.0, m, opts.branch)?;
    let v = predictor.ak[0].clone();
    let q0 = orbit.q0.coords().clone();
    let translations = translation_basis(orbit.n());
    let mode0_rows = orthonormal_complement(d, &translations, standard_basis(d));
    let mut gauge = Gauge {
        q0: q0.clone(),
        mode0_rows,
        translations,
        rotation: orbit.tangent_rotation.clone(),
        v: v.clone(),
        amplitude: amplitudes[0],
    };
    let lambda0 = 1.0 / freq.beta;
    let mut warnings = Vec::new();
    if freq.multiplicity > 1 {
        warnings.push(format!(
            "beta_{j0} has multiplicity {}; following basis vector {} of the eigenspace",
            freq.multiplicity, opts.branch
        ));
    }

    let p = (2 * m + 1) * d;
    let base = {
        let mut b = DVector::zeros(p);
        b.rows_mut(0, d).copy_from(&q0);
        b
    };
    let mut z = DVector::zeros(p + 3);
    z.rows_mut(0, p).copy_from(&(&base + predictor.pack() * amplitudes[0]));
    z[p] = lambda0;

    let mut samples: Vec<OrbitFamilySample> = Vec::new();
    let mut truncated = None;
    let mut prev_a = amplitudes[0];
    for &a in amplitudes {
        if !samples.is_empty() {
            let s = a / prev_a;
            let dev = z.rows(0, p) - &base;
            z.rows_mut(0, p).copy_from(&(&base + dev * s));
            z[p] = lambda0 + (z[p] - lambda0) * s * s;
        }
        gauge.amplitude = a;
        match newton(model, &proj, &gauge, z.clone(), d, opts.tol, opts.max_iter) {
            Ok(c) => {
                z = c.z;
                let lambda = z[p];
                let traj = FourierTrajectory::unpack(&z.rows(0, p).into_owned(), d, lambda)?;
                log::debug!("amplitude {a:e}: lambda {lambda} after {} iterations", c.iterations);
                samples.push(OrbitFamilySample {
                    amplitude: a,
                    dist_to_orbit: dist_to_orbit(&traj, &q0, 256),
                    period: traj.period(),
                    trajectory: traj,
                    lambda,
                    residual: c.residual,
                    closure_error: None,
                    minimal_period_ok: None,
                    first_return: None,
                    newton_iterations: c.iterations,
                    unfolding: [z[p + 1], z[p + 2]],
                });
                prev_a = a;
            }
            Err(e @ Error::RankDeficient { .. }) if samples.is_empty() => return Err(e),
            Err(e) => {
                truncated = Some(format!("stopped at amplitude {a:e}: {e}"));
                log::warn!("family j0={j0} truncated at amplitude {a:e}: {e}");
                break;
            }
        }
    }

    let lambda_fit_c = {
        let (num, den) = samples.iter().fold((0.0, 0.0), |(n, dd), s| {
            let a2 = s.amplitude * s.amplitude;
            (n + a2 * (s.lambda - lambda0), dd + a2 * a2)
        });
        (den > 0.0).then(|| num / den)
    };
    Ok(OrbitFamily {
        label: orbit.label.clone(),
        j0,
        branch: opts.branch,
        beta: freq.beta,
        multiplicity: freq.multiplicity,
        limit_period: std::f64::consts::TAU * lambda0,
        samples,
        truncated,
        lambda_fit_c,
        warnings,
    })
}

/// One family per basis vector of the `beta_j0` eigenspace.
pub fn continue_all_branches(
    model: &PotentialModel,
    orbit: &CriticalOrbit,
    spectral: &SpectralData,
    j0: usize,
    amplitudes: &[f64],
    opts: &ContinuationOptions,
) -> Result<Vec<OrbitFamily>> {
    let mult = frequency(spectral, j0)?.multiplicity;
    (0..mult)
        .map(|branch| {
            let o = ContinuationOptions {
                branch,
                ..opts.clone()
            };
            continue_family(model, orbit, spectral, j0, amplitudes, &o)
        })
        .collect()
}
