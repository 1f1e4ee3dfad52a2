//! Galerkin residual of `x'' + lambda^2 grad U(x) = 0` on a truncated Fourier basis.
//!
//! Mode projections use the uniform trapezoid rule, which is exact for
//! trigonometric polynomials of degree below the node count.

use nalgebra::{DMatrix, DVector};

use super::fourier::{min_nodes, nodes, FourierTrajectory};
use crate::error::{Error, Result};
use crate::potential::PotentialModel;

/// Projection of nodal values onto modes `0..=M` in the packed layout.
pub(crate) struct Projector {
    pub n_modes: usize,
    /// `weights[n][c]`: weight of node `n` in packed coefficient slot `c`
    /// (slot 0 = mean, `2k-1` = cos k, `2k` = sin k).
    pub weights: Vec<Vec<f64>>,
    /// `basis[n][c]`: value of basis function `c` at node `n`.
    pub basis: Vec<Vec<f64>>,
}

impl Projector {
    pub fn new(n_modes: usize, node_count: usize) -> Result<Self> {
        if node_count < min_nodes(n_modes) {
            return Err(Error::InvalidArgument(format!(
                "{node_count} quadrature nodes are too few for {n_modes} modes (need {})",
                min_nodes(n_modes)
            )));
        }
        let inv = 1.0 / node_count as f64;
        let slots = 2 * n_modes + 1;
        let mut weights = Vec::with_capacity(node_count);
        let mut basis = Vec::with_capacity(node_count);
        for t in nodes(node_count) {
            let mut w = vec![0.0; slots];
            let mut b = vec![0.0; slots];
            w[0] = inv;
            b[0] = 1.0;
            for k in 1..=n_modes {
                let (s, c) = (k as f64 * t).sin_cos();
                w[2 * k - 1] = 2.0 * inv * c;
                w[2 * k] = 2.0 * inv * s;
                b[2 * k - 1] = c;
                b[2 * k] = s;
            }
            weights.push(w);
            basis.push(b);
        }
        Ok(Self {
            n_modes,
            weights,
            basis,
        })
    }

    pub fn slots(&self) -> usize {
        2 * self.n_modes + 1
    }

    /// Nodal configurations `x(t_n)`.
    pub fn evaluate(&self, packed: &DVector<f64>, dim: usize) -> Vec<DVector<f64>> {
        self.basis
            .iter()
            .map(|b| {
                let mut x = DVector::zeros(dim);
                for (c, &bc) in b.iter().enumerate() {
                    x += packed.rows(c * dim, dim) * bc;
                }
                x
            })
            .collect()
    }

    /// Packed Fourier coefficients of nodal values.
    pub fn project(&self, values: &[DVector<f64>], dim: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.slots() * dim);
        for (w, v) in self.weights.iter().zip(values) {
            for (c, &wc) in w.iter().enumerate() {
                let mut block = out.rows_mut(c * dim, dim);
                block.axpy(wc, v, 1.0);
            }
        }
        out
    }
}

/// Linear part `x''` of a packed coefficient vector: mode `k` scaled by `-k^2`.
pub(crate) fn second_derivative(packed: &DVector<f64>, n_modes: usize, dim: usize) -> DVector<f64> {
    let mut out = DVector::zeros(packed.len());
    for k in 1..=n_modes {
        let k2 = (k * k) as f64;
        for slot in [2 * k - 1, 2 * k] {
            out.rows_mut(slot * dim, dim)
                .copy_from(&(packed.rows(slot * dim, dim) * -k2));
        }
    }
    out
}

/// Packed residual of `x'' + lambda^2 grad U(x)` over modes `0..=M`, using
/// `node_count` quadrature nodes (at least `4M + 4`).
pub fn galerkin_residual_with_nodes(
    model: &PotentialModel,
    traj: &FourierTrajectory,
    lambda: f64,
    node_count: usize,
) -> Result<DVector<f64>> {
    let dim = traj.dim();
    let proj = Projector::new(traj.n_modes(), node_count)?;
    let packed = traj.pack();
    let grads = proj
        .evaluate(&packed, dim)
        .iter()
        .map(|x| model.gradient_at(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(second_derivative(&packed, traj.n_modes(), dim) + proj.project(&grads, dim) * (lambda * lambda))
}

pub fn galerkin_residual(
    model: &PotentialModel,
    traj: &FourierTrajectory,
    lambda: f64,
) -> Result<DVector<f64>> {
    galerkin_residual_with_nodes(model, traj, lambda, min_nodes(traj.n_modes()))
}

/// Residual, its coefficient Jacobian and its `lambda` derivative at once.
pub(crate) struct Linearization {
    pub residual: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub d_lambda: DVector<f64>,
}

pub(crate) fn linearize(
    model: &PotentialModel,
    proj: &Projector,
    packed: &DVector<f64>,
    dim: usize,
    lambda: f64,
) -> Result<Linearization> {
    let slots = proj.slots();
    let xs = proj.evaluate(packed, dim);
    let mut grads = Vec::with_capacity(xs.len());
    let mut jacobian = DMatrix::zeros(slots * dim, slots * dim);
    let l2 = lambda * lambda;
    for (n, x) in xs.iter().enumerate() {
        grads.push(model.gradient_at(x)?);
        let h = model.hessian_at(x)? * l2;
        let w = &proj.weights[n];
        let b = &proj.basis[n];
        for (r, &wr) in w.iter().enumerate() {
            for (c, &bc) in b.iter().enumerate() {
                let s = wr * bc;
                if s != 0.0 {
                    let mut block = jacobian.view_mut((r * dim, c * dim), (dim, dim));
                    block += &h * s;
                }
            }
        }
    }
    for k in 1..=proj.n_modes {
        let k2 = (k * k) as f64;
        for slot in [2 * k - 1, 2 * k] {
            for i in 0..dim {
                jacobian[(slot * dim + i, slot * dim + i)] -= k2;
            }
        }
    }
    let pg = proj.project(&grads, dim);
    Ok(Linearization {
        residual: second_derivative(packed, proj.n_modes, dim) + &pg * l2,
        jacobian,
        d_lambda: pg * (2.0 * lambda),
    })
}
