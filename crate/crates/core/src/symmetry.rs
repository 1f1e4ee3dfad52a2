//! The SO(2) action on planar configurations and related projectors.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::potential::{Configuration, PotentialModel};

/// Rotates every `(x, y)` block of `v` by `theta` about the origin.
pub fn rotate_vector(v: &DVector<f64>, theta: f64) -> DVector<f64> {
    let (s, c) = theta.sin_cos();
    let mut out = v.clone();
    for k in 0..v.len() / 2 {
        let (x, y) = (v[2 * k], v[2 * k + 1]);
        out[2 * k] = c * x - s * y;
        out[2 * k + 1] = s * x + c * y;
    }
    out
}

pub fn rotate_configuration(q: &Configuration, theta: f64) -> Configuration {
    Configuration::from_vector(rotate_vector(q.coords(), theta))
        .expect("rotation preserves shape")
}

/// Generator of the rotation action: each `(x, y)` block maps to `(-y, x)`.
pub fn infinitesimal_rotation(q: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(q.len());
    for k in 0..q.len() / 2 {
        out[2 * k] = -q[2 * k + 1];
        out[2 * k + 1] = q[2 * k];
    }
    out
}

/// Unit vectors of rigid translations in x and y.
pub fn translation_basis(n: usize) -> [DVector<f64>; 2] {
    let s = 1.0 / (n as f64).sqrt();
    let mut tx = DVector::zeros(2 * n);
    let mut ty = DVector::zeros(2 * n);
    for k in 0..n {
        tx[2 * k] = s;
        ty[2 * k + 1] = s;
    }
    [tx, ty]
}

/// Orthogonal projector onto `{sum_i q_i = 0}`; symmetric, idempotent, rank `2N - 2`.
pub fn com_projector(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::identity(2 * n, 2 * n);
    for t in translation_basis(n) {
        p -= &t * t.transpose();
    }
    p
}

/// Rotation angle `theta` minimising `|R_theta x - y|`.
pub fn best_rotation(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let c = x.dot(y);
    let s = infinitesimal_rotation(x).dot(y);
    s.atan2(c)
}

/// `min_theta |R_theta x - y|`.
pub fn distance_mod_rotation(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (rotate_vector(x, best_rotation(x, y)) - y).norm()
}

/// Largest `|U(R_theta q) - U(q)|` over `sample_count` angles (the first is 0,
/// the rest are drawn from a fixed-seed generator).
pub fn invariance_audit(model: &PotentialModel, q: &Configuration, sample_count: usize) -> Result<f64> {
    let u0 = model.potential(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for s in 0..sample_count {
        let theta = if s == 0 {
            0.0
        } else {
            rng.gen_range(0.0..std::f64::consts::TAU)
        };
        let u = model.potential_at(&rotate_vector(q.coords(), theta))?;
        worst = worst.max((u - u0).abs());
    }
    Ok(worst)
}

/// Gram-Schmidt orthonormal basis (as columns) of the orthogonal complement of
/// `excluded` inside the span of `candidates`.
pub(crate) fn orthonormal_complement(
    dim: usize,
    excluded: &[DVector<f64>],
    candidates: impl IntoIterator<Item = DVector<f64>>,
) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut fixed: Vec<DVector<f64>> = Vec::new();
    for e in excluded {
        let mut v = e.clone();
        for b in &fixed {
            v -= b * b.dot(&v);
        }
        let nv = v.norm();
        if nv > 1e-12 {
            fixed.push(v / nv);
        }
    }
    for c in candidates {
        let mut v = c;
        // two passes for stability
        for _ in 0..2 {
            for b in fixed.iter().chain(basis.iter()) {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / nv);
        }
        if basis.len() + fixed.len() == dim {
            break;
        }
    }
    if basis.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    DMatrix::from_columns(&basis)
}

pub(crate) fn standard_basis(dim: usize) -> impl Iterator<Item = DVector<f64>> {
    (0..dim).map(move |k| {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        e
    })
}
