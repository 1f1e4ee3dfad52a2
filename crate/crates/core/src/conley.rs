//! Mode-wise Morse data of the Galerkin linearisation and the Euler-ring
//! bifurcation certificate.
//!
//! On the `k`-th Fourier mode the linearised operator is
//!
//! ```text
//! Q(k, lambda) = (k^2 Id - lambda^2 H) / (k^2 + 1),     H = hess U(q0)
//! ```
//!
//! with eigenvalues `(k^2 - lambda^2 mu)/(k^2 + 1)`, `mu` in the spectrum of
//! `H`. Crossing `lambda = 1/beta_j0` only changes the sign of the mode-1
//! eigenvalues belonging to `mu = beta_j0^2`; everything else (modes `k >= 2`
//! up to the truncation `n0`, and mode 0) contributes a shared invertible
//! factor that cancels when the two sides are compared.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{sphere_characteristic, EulerRingElement, S1RepDecomposition};
use crate::resonance::Window;
use crate::spectral::SpectralData;

pub const DEFAULT_MODE_ZERO_TOL: f64 = 1e-9;

/// `Q(k, lambda)` for a given Hessian.
pub fn mode_matrix(hessian: &DMatrix<f64>, k: usize, lambda: f64) -> DMatrix<f64> {
    let k2 = (k * k) as f64;
    let dim = hessian.nrows();
    (DMatrix::identity(dim, dim) * k2 - hessian * (lambda * lambda)) / (k2 + 1.0)
}

/// Real eigenvalue counts of `Q(k, lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeMorseData {
    pub k: usize,
    pub lambda: f64,
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

fn classify(k: usize, lambda: f64, values: impl Iterator<Item = (f64, usize)>, tol: f64) -> ModeMorseData {
    let mut out = ModeMorseData {
        k,
        lambda,
        neg: 0,
        zero: 0,
        pos: 0,
    };
    for (v, mult) in values {
        if v.abs() <= tol {
            out.zero += mult;
        } else if v < 0.0 {
            out.neg += mult;
        } else {
            out.pos += mult;
        }
    }
    out
}

/// Counts from the spectrum: `(k^2 - lambda^2 mu)/(k^2 + 1)` over every
/// eigenvalue `mu` of the Hessian (with multiplicity).
pub fn mode_morse(data: &SpectralData, k: usize, lambda: f64, tol: f64) -> ModeMorseData {
    let k2 = (k * k) as f64;
    let values = data
        .eigenvalues
        .iter()
        .map(|c| ((k2 - lambda * lambda * c.value) / (k2 + 1.0), c.multiplicity));
    classify(k, lambda, values, tol)
}

/// Counts from a direct eigen-decomposition of `Q(k, lambda)`.
pub fn mode_morse_from_hessian(hessian: &DMatrix<f64>, k: usize, lambda: f64, tol: f64) -> ModeMorseData {
    let q = mode_matrix(hessian, k, lambda);
    let eig = SymmetricEigen::new(q);
    classify(k, lambda, eig.eigenvalues.iter().map(|&v| (v, 1)), tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationChoice {
    pub n0: usize,
    /// `(j, floor(beta_j / beta_j0))` for `j < j0`.
    pub floors: Vec<(usize, u64)>,
    /// `min_j min_{lambda = lambda_pm} n0^2 - lambda^2 beta_j^2`.
    pub margin: f64,
}

/// Truncation level `n0`: 2 for `j0 = 1`, otherwise `floor(beta_1/beta_j0) + 1`.
pub fn n0_select(betas: &[f64], window: &Window) -> Result<TruncationChoice> {
    let j0 = window.j0;
    if j0 == 0 || j0 > betas.len() {
        return Err(Error::InvalidArgument(format!("j0 = {j0} out of range")));
    }
    let beta0 = betas[j0 - 1];
    let floors: Vec<(usize, u64)> = (0..j0 - 1)
        .map(|j| (j + 1, (betas[j] / beta0).floor() as u64))
        .collect();
    let n0 = match floors.first() {
        Some(&(_, k1)) => k1 as usize + 1,
        None => 2,
    };
    let n2 = (n0 * n0) as f64;
    let margin = betas
        .iter()
        .flat_map(|b| [window.lambda_minus, window.lambda_plus].map(|l| n2 - l * l * b * b))
        .fold(f64::INFINITY, f64::min);
    if !(margin > 0.0) {
        return Err(Error::TruncationMargin { n0, margin });
    }
    Ok(TruncationChoice { n0, floors, margin })
}

/// Weight-`k` multiplicity `d_k(lambda) = sum_j mult_j [k^2 < lambda^2 beta_j^2]`.
fn mode_count(betas: &[(f64, usize)], k: usize, lambda: f64, tol: f64) -> Result<u32> {
    let k2 = (k * k) as f64;
    let mut d = 0;
    for &(beta, mult) in betas {
        let gap = k2 - lambda * lambda * beta * beta;
        if gap.abs() <= tol * k2 {
            return Err(Error::DegenerateMode { k, lambda, gap });
        }
        if gap < 0.0 {
            d += mult as u32;
        }
    }
    Ok(d)
}

/// Decomposition `R[k0,0] + sum_k R[d_k, k]` over modes `k = 1..=n0`, with
/// `k0` the Morse index of the Hessian.
pub fn positive_rep(data: &SpectralData, lambda: f64, n0: usize, tol: f64) -> Result<S1RepDecomposition> {
    let betas = data.beta_values();
    let mut pieces = vec![(data.morse_index as u32, 0)];
    for k in 1..=n0 {
        pieces.push((mode_count(&betas, k, lambda, tol)?, k as u32));
    }
    Ok(S1RepDecomposition::from_pieces(pieces))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCertificate {
    pub j0: usize,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub eps: f64,
    pub n0: usize,
    pub n0_margin: f64,
    /// Complex dimensions of the weight-1 part at `lambda_minus` / `lambda_plus`.
    pub r_minus: u32,
    pub r_plus: u32,
    /// Kernel dimension beyond the symmetry tangent space.
    pub dim_n: usize,
    pub rep_minus: S1RepDecomposition,
    pub rep_plus: S1RepDecomposition,
    /// `chi` of the shared part (mode 0 and modes `2..=n0`), identical on both sides.
    pub shared_factor: EulerRingElement,
    pub chi_minus: EulerRingElement,
    pub chi_plus: EulerRingElement,
    /// `(1 - lambda_minus^2 beta_j0^2)(1 - lambda_plus^2 beta_j0^2)`.
    pub sign_product: f64,
    pub multiplicity_j0: usize,
    pub changed: bool,
}

fn weight_one_part(rep: &S1RepDecomposition) -> (u32, S1RepDecomposition) {
    let r = rep.multiplicity_of(1);
    let rest = S1RepDecomposition::from_pieces(
        rep.terms
            .iter()
            .copied()
            .filter(|t| t.1 != 1)
            .chain([(rep.k0, 0)]),
    );
    (r, rest)
}

/// Compares `chi_pm = (-1)^dim_N chi(S^{H_1,pm})` across the window.
///
/// The shared factor `chi(S^{W+})` is computed at both ends, checked equal,
/// reported, and left out of `chi_pm`.
pub fn bifurcation_certificate(
    data: &SpectralData,
    window: &Window,
    tol: f64,
) -> Result<BifurcationCertificate> {
    let betas = data.beta_values();
    let beta_values: Vec<f64> = betas.iter().map(|b| b.0).collect();
    let j0 = window.j0;
    if j0 == 0 || j0 > betas.len() {
        return Err(Error::InvalidArgument(format!("j0 = {j0} out of range")));
    }
    let trunc = n0_select(&beta_values, window)?;
    let rep_minus = positive_rep(data, window.lambda_minus, trunc.n0, tol)?;
    let rep_plus = positive_rep(data, window.lambda_plus, trunc.n0, tol)?;
    let (r_minus, rest_minus) = weight_one_part(&rep_minus);
    let (r_plus, rest_plus) = weight_one_part(&rep_plus);
    if rest_minus != rest_plus {
        return Err(Error::InvalidArgument(format!(
            "modes other than k = 1 change across the window: {rest_minus} vs {rest_plus}"
        )));
    }
    let shared_factor = sphere_characteristic(&rest_minus)?;
    let sign = if data.extra_kernel_dim % 2 == 0 { 1 } else { -1 };
    let h_minus = S1RepDecomposition::from_pieces([(r_minus, 1)]);
    let h_plus = S1RepDecomposition::from_pieces([(r_plus, 1)]);
    let chi_minus = sphere_characteristic(&h_minus)?.scale(sign)?;
    let chi_plus = sphere_characteristic(&h_plus)?.scale(sign)?;
    let beta0 = beta_values[j0 - 1];
    let sign_product = (1.0 - (window.lambda_minus * beta0).powi(2))
        * (1.0 - (window.lambda_plus * beta0).powi(2));
    let multiplicity_j0 = betas[j0 - 1].1;
    let changed = chi_minus != chi_plus;
    Ok(BifurcationCertificate {
        j0,
        lambda_minus: window.lambda_minus,
        lambda_plus: window.lambda_plus,
        eps: window.eps,
        n0: trunc.n0,
        n0_margin: trunc.margin,
        r_minus,
        r_plus,
        dim_n: data.extra_kernel_dim,
        rep_minus,
        rep_plus,
        shared_factor,
        chi_minus,
        chi_plus,
        sign_product,
        multiplicity_j0,
        changed,
    })
}
