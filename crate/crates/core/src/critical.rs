//! Critical orbits (relative equilibria) of planar pair potentials.
//!
//! Closed-form constructions for the Lennard-Jones 2- and 3-body equilibria
//! and for Schwarzschild triangles, a gauge-fixed Newton refinement, and a
//! sampling test for isolation of the orbit inside a slice.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Configuration, PairProfile, PotentialModel};
use crate::symmetry::{
    infinitesimal_rotation, orthonormal_complement, rotate_vector, standard_basis, translation_basis,
};

/// A critical point `q0` of `U` standing for its whole SO(2)-orbit.
#[derive(Clone, Debug)]
pub struct CriticalOrbit {
    pub label: String,
    pub q0: Configuration,
    pub value: f64,
    pub grad_norm: f64,
    /// Unit vector along `J q0`.
    pub tangent_rotation: DVector<f64>,
    /// Unit rigid translations in x and y.
    pub translation_directions: [DVector<f64>; 2],
    /// Whether downstream analysis is restricted to the centre-of-mass-zero subspace.
    pub com_zero: bool,
}

impl CriticalOrbit {
    /// Packages `q` after checking the gradient is below `grad_tol`.
    pub fn from_critical_point(
        model: &PotentialModel,
        label: impl Into<String>,
        q: Configuration,
        grad_tol: f64,
    ) -> Result<Self> {
        let value = model.potential(&q)?;
        let grad_norm = model.gradient(&q)?.norm();
        if !(grad_norm <= grad_tol) {
            return Err(Error::NonConvergence {
                what: "critical point check",
                iterations: 0,
                residual: grad_norm,
            });
        }
        let jq = infinitesimal_rotation(q.coords());
        let tangent_rotation = jq.normalize();
        Ok(Self {
            label: label.into(),
            translation_directions: translation_basis(q.n()),
            q0: q,
            value,
            grad_norm,
            tangent_rotation,
            com_zero: true,
        })
    }

    pub fn with_com_zero(mut self, com_zero: bool) -> Self {
        self.com_zero = com_zero;
        self
    }

    pub fn n(&self) -> usize {
        self.q0.n()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    /// Convergence when `|grad U| <= tol * (1 + |U|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative singular-value floor for the rank check of the bordered Jacobian.
    pub rank_tol: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            rank_tol: 1e-12,
        }
    }
}

/// Gradient-norm bound used when packaging closed-form equilibria.
const EQUILIBRIUM_GRAD_TOL: f64 = 1e-10;

/// Newton iteration on
/// `[grad U(q) = 0, sum q_i = sum seed_i, <q - seed, J seed> = 0]`.
///
/// The stacked system has `2N + 3` rows for `2N` unknowns; three rows of the
/// gradient block are dependent (two translations and one rotation), so each
/// step is the least-squares solution of the bordered Jacobian.
pub fn refine_critical(
    model: &PotentialModel,
    seed: &Configuration,
    opts: &RefineOptions,
) -> Result<Configuration> {
    let dim = seed.dim();
    let n = seed.n();
    let [tx, ty] = translation_basis(n);
    let jseed = infinitesimal_rotation(seed.coords());
    let jseed_unit = jseed.normalize();
    let com_seed = [tx.dot(seed.coords()), ty.dot(seed.coords())];

    let mut q = seed.coords().clone();
    let mut residual = f64::INFINITY;
    for iter in 0..=opts.max_iter {
        let g = model.gradient_at(&q)?;
        let u = model.potential_at(&q)?;
        residual = g.norm();
        if residual <= opts.tol * (1.0 + u.abs()) {
            return Configuration::from_vector(q);
        }
        if iter == opts.max_iter {
            break;
        }
        let h = model.hessian_at(&q)?;
        let mut jac = nalgebra::DMatrix::zeros(dim + 3, dim);
        jac.rows_mut(0, dim).copy_from(&h);
        jac.row_mut(dim).copy_from(&tx.transpose());
        jac.row_mut(dim + 1).copy_from(&ty.transpose());
        jac.row_mut(dim + 2).copy_from(&jseed_unit.transpose());
        let mut rhs = DVector::zeros(dim + 3);
        rhs.rows_mut(0, dim).copy_from(&(-&g));
        rhs[dim] = com_seed[0] - tx.dot(&q);
        rhs[dim + 1] = com_seed[1] - ty.dot(&q);
        rhs[dim + 2] = -jseed_unit.dot(&(&q - seed.coords()));

        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= opts.rank_tol * smax {
            return Err(Error::RankDeficient {
                what: "refine_critical",
            });
        }
        let step = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        q += step;
    }
    Err(Error::NonConvergence {
        what: "refine_critical",
        iterations: opts.max_iter,
        residual,
    })
}

/// Refines `seed` and packages the result as a [`CriticalOrbit`].
pub fn refine_orbit(
    model: &PotentialModel,
    label: impl Into<String>,
    seed: &Configuration,
    opts: &RefineOptions,
) -> Result<CriticalOrbit> {
    let q = refine_critical(model, seed, opts)?;
    CriticalOrbit::from_critical_point(model, label, q, EQUILIBRIUM_GRAD_TOL)
}

/// Side length `a` of the collinear Lennard-Jones 3-body equilibria.
pub fn lj3_collinear_length() -> f64 {
    (2731.0f64 / 43.0).powf(1.0 / 6.0)
}

/// The explicit Lennard-Jones equilibria for two and three bodies.
///
/// * `n = 2`: the orbit of `(0, 1/2, 0, -1/2)`.
/// * `n = 3`: the collinear orbits `q01..q03` and the two equilateral
///   orbits `q04, q05` (circumradius `1/sqrt 3`, opposite orientations).
pub fn lj_equilibria(n: usize) -> Result<Vec<CriticalOrbit>> {
    let model = PotentialModel::lennard_jones(n)?;
    let seeds: Vec<(&str, Vec<f64>)> = match n {
        2 => vec![("q0", vec![0.0, 0.5, 0.0, -0.5])],
        3 => {
            let a = lj3_collinear_length();
            let s = 1.0 / 3f64.sqrt();
            let (alpha, beta) = (2.0 * std::f64::consts::PI / 3.0, 4.0 * std::f64::consts::PI / 3.0);
            vec![
                ("q01", vec![a / 2.0, 0.0, 0.0, 0.0, -a / 2.0, 0.0]),
                ("q02", vec![0.0, 0.0, a / 2.0, 0.0, -a / 2.0, 0.0]),
                ("q03", vec![a / 2.0, 0.0, -a / 2.0, 0.0, 0.0, 0.0]),
                (
                    "q04",
                    vec![s, 0.0, s * alpha.cos(), s * alpha.sin(), s * beta.cos(), s * beta.sin()],
                ),
                (
                    "q05",
                    vec![s, 0.0, s * beta.cos(), s * beta.sin(), s * alpha.cos(), s * alpha.sin()],
                ),
            ]
        }
        _ => return Err(Error::UnsupportedParticleCount(n)),
    };
    seeds
        .into_iter()
        .map(|(label, coords)| {
            let seed = Configuration::new(coords)?;
            refine_orbit(&model, label, &seed, &RefineOptions::default())
        })
        .collect()
}

/// Triangle with prescribed side lengths `(r12, r13, r23)`, centroid at the
/// origin, vertex 1 on the positive x-axis, then rotated by `orientation`.
pub fn triangle_with_sides(sides: [f64; 3], orientation: f64) -> Result<Configuration> {
    let names = ["r12", "r13", "r23"];
    for k in 0..3 {
        let others = [sides[(k + 1) % 3], sides[(k + 2) % 3]];
        if !(sides[k] > 0.0) || !(sides[k] < others[0] + others[1]) {
            return Err(Error::TriangleInequality {
                side: names[k],
                length: sides[k],
                others,
            });
        }
    }
    let [r12, r13, r23] = sides;
    let x3 = (r12 * r12 + r13 * r13 - r23 * r23) / (2.0 * r12);
    let y3 = (r13 * r13 - x3 * x3).max(0.0).sqrt();
    let pts = [[0.0, 0.0], [r12, 0.0], [x3, y3]];
    let cx = (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0;
    let cy = (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0;
    let centered = Configuration::from_points(&pts.map(|p| [p[0] - cx, p[1] - cy]))?;
    let v1 = centered.position(0);
    let align = -v1.y.atan2(v1.x);
    Configuration::from_vector(rotate_vector(centered.coords(), align + orientation))
}

/// Noncollinear Schwarzschild equilibrium with `|q_i - q_j| = sqrt(-3 B_ij / A_ij)`.
///
/// `profiles` are ordered `(12, 13, 23)` and must all be Schwarzschild.
pub fn schwarzschild_equilibrium(profiles: &[PairProfile; 3], orientation: f64) -> Result<CriticalOrbit> {
    let mut sides = [0.0; 3];
    for (k, p) in profiles.iter().enumerate() {
        sides[k] = p.schwarzschild_critical_distance().ok_or_else(|| {
            Error::InvalidProfile(format!("pair {k} is not a Schwarzschild profile"))
        })?;
    }
    let q = triangle_with_sides(sides, orientation)?;
    let model = PotentialModel::from_pairs(3, profiles.to_vec())?;
    let q = refine_critical(&model, &q, &RefineOptions::default())?;
    CriticalOrbit::from_critical_point(&model, "triangle", q, EQUILIBRIUM_GRAD_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationVerdict {
    IsolatedOnSlice,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    pub slice_radius: f64,
    pub samples: usize,
    pub threshold: f64,
    pub min_grad_norm_on_annulus: f64,
    pub verdict: IsolationVerdict,
}

pub const DEFAULT_ISOLATION_THRESHOLD: f64 = 1e-6;

/// Samples `|grad U|` on the sphere of radius `slice_radius` in the slice
/// normal to `J q0` (and to translations when `orbit.com_zero`).
///
/// The sample set contains `+-` every slice basis vector plus `samples`
/// random unit directions from a fixed-seed generator. When translations are
/// kept they lead the basis, so a translational critical direction is always
/// probed exactly.
pub fn isolation_scan(
    model: &PotentialModel,
    orbit: &CriticalOrbit,
    slice_radius: f64,
    samples: usize,
    threshold: f64,
) -> Result<IsolationReport> {
    if !(slice_radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "slice radius must be positive, got {slice_radius}"
        )));
    }
    let dim = orbit.q0.dim();
    let mut excluded = vec![orbit.tangent_rotation.clone()];
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    if orbit.com_zero {
        excluded.extend(orbit.translation_directions.iter().cloned());
    } else {
        candidates.extend(orbit.translation_directions.iter().cloned());
    }
    candidates.extend(standard_basis(dim));
    let basis = orthonormal_complement(dim, &excluded, candidates);
    let k = basis.ncols();

    let mut directions: Vec<DVector<f64>> = Vec::with_capacity(2 * k + samples);
    for c in 0..k {
        directions.push(basis.column(c).into_owned());
        directions.push(-basis.column(c).into_owned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1501a7e);
    for _ in 0..samples {
        let coeffs = DVector::from_fn(k, |_, _| rng.gen_range(-1.0..1.0));
        let v = &basis * coeffs;
        let nv = v.norm();
        if nv > 1e-12 {
            directions.push(v / nv);
        }
    }

    let mut min_norm = f64::INFINITY;
    for d in &directions {
        let q = orbit.q0.coords() + d * slice_radius;
        let g = model.gradient_at(&q)?;
        min_norm = min_norm.min(g.norm());
    }
    let verdict = if min_norm > threshold {
        IsolationVerdict::IsolatedOnSlice
    } else {
        IsolationVerdict::Inconclusive
    };
    Ok(IsolationReport {
        slice_radius,
        samples: directions.len(),
        threshold,
        min_grad_norm_on_annulus: min_norm,
        verdict,
    })
}
