use nalgebra::DVector;

use crate::error::{Error, Result};

/// Truncated Fourier series of a `2 pi`-periodic loop in configuration space:
///
/// ```text
/// x(t) = a0 + sum_{k=1..M} a_k cos(k t) + b_k sin(k t)
/// ```
///
/// The physical orbit is `q(s) = x(s / lambda)` with period `T = 2 pi lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTrajectory {
    pub a0: DVector<f64>,
    pub ak: Vec<DVector<f64>>,
    pub bk: Vec<DVector<f64>>,
    pub lambda: f64,
}

impl FourierTrajectory {
    pub fn constant(q: &DVector<f64>, n_modes: usize, lambda: f64) -> Self {
        let zero = DVector::zeros(q.len());
        Self {
            a0: q.clone(),
            ak: vec![zero.clone(); n_modes],
            bk: vec![zero; n_modes],
            lambda,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.ak.len()
    }

    pub fn dim(&self) -> usize {
        self.a0.len()
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU * self.lambda
    }

    /// Number of packed coefficients, `(2M + 1) d`.
    pub fn packed_len(&self) -> usize {
        (2 * self.n_modes() + 1) * self.dim()
    }

    /// Layout `[a0, a1, b1, a2, b2, ...]`.
    pub fn pack(&self) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(self.packed_len());
        out.rows_mut(0, d).copy_from(&self.a0);
        for k in 0..self.n_modes() {
            out.rows_mut((2 * k + 1) * d, d).copy_from(&self.ak[k]);
            out.rows_mut((2 * k + 2) * d, d).copy_from(&self.bk[k]);
        }
        out
    }

    pub fn unpack(packed: &DVector<f64>, dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 || packed.len() % dim != 0 || (packed.len() / dim) % 2 != 1 {
            return Err(Error::InvalidArgument(format!(
                "packed length {} is not (2M+1) x {dim}",
                packed.len()
            )));
        }
        let m = (packed.len() / dim - 1) / 2;
        Ok(Self {
            a0: packed.rows(0, dim).into_owned(),
            ak: (0..m).map(|k| packed.rows((2 * k + 1) * dim, dim).into_owned()).collect(),
            bk: (0..m).map(|k| packed.rows((2 * k + 2) * dim, dim).into_owned()).collect(),
            lambda,
        })
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        let mut x = self.a0.clone();
        for k in 0..self.n_modes() {
            let (s, c) = ((k + 1) as f64 * t).sin_cos();
            x += &self.ak[k] * c + &self.bk[k] * s;
        }
        x
    }

    /// `dx/dt` in loop time.
    pub fn derivative(&self, t: f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for k in 0..self.n_modes() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * t).sin_cos();
            v += (&self.bk[k] * c - &self.ak[k] * s) * kf;
        }
        v
    }

    /// Physical state `(q, dq/ds)` at loop time `t`.
    pub fn state(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        (self.eval(t), self.derivative(t) / self.lambda)
    }

    /// Norm of the `(a_k, b_k)` pair for `k = 1..=M`.
    pub fn mode_norms(&self) -> Vec<f64> {
        (0..self.n_modes())
            .map(|k| (self.ak[k].norm_squared() + self.bk[k].norm_squared()).sqrt())
            .collect()
    }

    /// Moves mode `k` to mode `2k`; the loop then closes after half the period.
    pub fn with_doubled_modes(&self) -> Self {
        let m = self.n_modes();
        let zero = DVector::zeros(self.dim());
        let mut ak = vec![zero.clone(); 2 * m];
        let mut bk = vec![zero; 2 * m];
        for k in 0..m {
            ak[2 * k + 1] = self.ak[k].clone();
            bk[2 * k + 1] = self.bk[k].clone();
        }
        Self {
            a0: self.a0.clone(),
            ak,
            bk,
            lambda: self.lambda,
        }
    }

    /// Time shift `t -> t + tau`.
    pub fn shifted(&self, tau: f64) -> Self {
        let mut out = self.clone();
        for k in 0..self.n_modes() {
            let (s, c) = ((k + 1) as f64 * tau).sin_cos();
            out.ak[k] = &self.ak[k] * c + &self.bk[k] * s;
            out.bk[k] = &self.bk[k] * c - &self.ak[k] * s;
        }
        out
    }
}

/// Uniform quadrature nodes `t_n = 2 pi n / count`.
pub fn nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|n| std::f64::consts::TAU * n as f64 / count as f64)
        .collect()
}

/// Smallest node count allowed for `M` modes.
pub fn min_nodes(n_modes: usize) -> usize {
    4 * n_modes + 4
}
