//! Hessian spectra at critical orbits.
//!
//! Eigenvalues are clustered into multiplicities at a tolerance relative to
//! the spectral radius. The positive clusters give the frequencies
//! `beta_1 > ... > beta_m > 0` with `beta_j^2` the distinct positive eigenvalues.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::critical::{CriticalOrbit, IsolationReport, IsolationVerdict};
use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::symmetry::{orthonormal_complement, standard_basis};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;

/// Subspace on which the Hessian is analysed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMode {
    Ambient,
    ComReduced,
    NormalSlice,
}

impl SpectralMode {
    /// Dimension of the symmetry tangent space (rotation plus translations)
    /// that survives in this mode.
    pub fn symmetry_dim(self) -> usize {
        match self {
            SpectralMode::Ambient => 3,
            SpectralMode::ComReduced => 1,
            SpectralMode::NormalSlice => 0,
        }
    }
}

impl fmt::Display for SpectralMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectralMode::Ambient => "ambient",
            SpectralMode::ComReduced => "com_reduced",
            SpectralMode::NormalSlice => "normal_slice",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// A positive frequency `beta` with `beta^2` an eigenvalue of the Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequency {
    pub beta: f64,
    pub multiplicity: usize,
    /// Orthonormal eigenvectors of `beta^2` in ambient coordinates (columns).
    pub eigenvectors: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub mode: SpectralMode,
    pub dimension: usize,
    /// Ascending clusters.
    pub eigenvalues: Vec<Cluster>,
    pub raw_eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    /// Descending positive frequencies.
    pub betas: Vec<Frequency>,
    pub morse_index: usize,
    /// Kernel dimension beyond the symmetry tangent space.
    pub extra_kernel_dim: usize,
    /// Absolute clustering tolerance actually used.
    pub cluster_tol_abs: f64,
    pub warnings: Vec<String>,
}

impl SpectralData {
    /// `(beta_j, mult_j)` pairs, descending.
    pub fn beta_values(&self) -> Vec<(f64, usize)> {
        self.betas.iter().map(|f| (f.beta, f.multiplicity)).collect()
    }

    pub fn betas_only(&self) -> Vec<f64> {
        self.betas.iter().map(|f| f.beta).collect()
    }
}

fn subspace_basis(orbit: &CriticalOrbit, mode: SpectralMode) -> Option<DMatrix<f64>> {
    let dim = orbit.q0.dim();
    let mut excluded: Vec<DVector<f64>> = Vec::new();
    match mode {
        SpectralMode::Ambient => return None,
        SpectralMode::ComReduced => excluded.extend(orbit.translation_directions.iter().cloned()),
        SpectralMode::NormalSlice => {
            excluded.extend(orbit.translation_directions.iter().cloned());
            excluded.push(orbit.tangent_rotation.clone());
        }
    }
    Some(orthonormal_complement(dim, &excluded, standard_basis(dim)))
}

/// Eigen-analysis of `hess U(q0)`, restricted by orthogonal projection when
/// `mode` is not ambient. `cluster_tol` is relative to the spectral radius.
pub fn analyze_hessian(
    model: &PotentialModel,
    orbit: &CriticalOrbit,
    mode: SpectralMode,
    cluster_tol: f64,
) -> Result<SpectralData> {
    let h = model.hessian(&orbit.q0)?;
    let basis = subspace_basis(orbit, mode);
    let restricted = match &basis {
        Some(b) => b.transpose() * &h * b,
        None => h,
    };
    analyze_matrix(&restricted, basis.as_ref(), mode, cluster_tol)
}

/// Clusters the spectrum of a symmetric matrix. `basis` maps restricted
/// eigenvectors back to ambient coordinates.
pub fn analyze_matrix(
    matrix: &DMatrix<f64>,
    basis: Option<&DMatrix<f64>>,
    mode: SpectralMode,
    cluster_tol: f64,
) -> Result<SpectralData> {
    if !(cluster_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cluster_tol must be positive, got {cluster_tol}"
        )));
    }
    let dim = matrix.nrows();
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidArgument("symmetric eigensolver failed".into()))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let raw: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

    let radius = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = if radius > 0.0 { cluster_tol * radius } else { cluster_tol };

    // chain clustering over the sorted spectrum
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (pos, &v) in raw.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - raw[*g.last().unwrap()] <= tol => g.push(pos),
            _ => groups.push(vec![pos]),
        }
    }

    let mut warnings = Vec::new();
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&p| raw[p]).sum::<f64>() / g.len() as f64)
        .collect();
    for w in means.windows(2) {
        if w[1] - w[0] < 10.0 * tol {
            warnings.push(format!(
                "ambiguous clustering: clusters at {:.6e} and {:.6e} are closer than 10 x tol ({:.3e})",
                w[0],
                w[1],
                10.0 * tol
            ));
        }
    }
    for &v in &raw {
        if v.abs() > tol && v.abs() < 10.0 * tol {
            warnings.push(format!(
                "borderline eigenvalue {v:.6e} near the kernel threshold {tol:.3e}"
            ));
        }
    }

    let mut clusters = Vec::new();
    let mut kernel_dim = 0;
    let mut morse_index = 0;
    let mut betas = Vec::new();
    for (g, &mean) in groups.iter().zip(&means) {
        let value = if mean.abs() <= tol { 0.0 } else { mean };
        clusters.push(Cluster {
            value,
            multiplicity: g.len(),
        });
        if value == 0.0 {
            kernel_dim += g.len();
        } else if value < 0.0 {
            morse_index += g.len();
        } else {
            let cols: Vec<DVector<f64>> = g
                .iter()
                .map(|&p| {
                    let v = eig.eigenvectors.column(order[p]).into_owned();
                    match basis {
                        Some(b) => b * v,
                        None => v,
                    }
                })
                .collect();
            betas.push(Frequency {
                beta: value.sqrt(),
                multiplicity: g.len(),
                eigenvectors: DMatrix::from_columns(&cols),
            });
        }
    }
    betas.reverse();

    let sym_dim = mode.symmetry_dim();
    if kernel_dim < sym_dim {
        warnings.push(format!(
            "kernel dimension {kernel_dim} is below the symmetry tangent dimension {sym_dim}"
        ));
    }

    Ok(SpectralData {
        mode,
        dimension: dim,
        eigenvalues: clusters,
        raw_eigenvalues: raw,
        kernel_dim,
        betas,
        morse_index,
        extra_kernel_dim: kernel_dim.saturating_sub(sym_dim),
        cluster_tol_abs: tol,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// No negative eigenvalues.
    pub minimality: bool,
    pub isolation: bool,
    /// Always true: SO(2) acts freely on the collision-free set.
    pub free_action: bool,
    /// At least one positive frequency.
    pub has_frequency: bool,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.minimality && self.isolation && self.free_action && self.has_frequency
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.minimality {
            out.push("(1) minimality");
        }
        if !self.isolation {
            out.push("(2) isolation");
        }
        if !self.free_action {
            out.push("(3) free action");
        }
        if !self.has_frequency {
            out.push("(4) positive frequency");
        }
        out
    }
}

pub fn check_hypotheses(data: &SpectralData, isolation: &IsolationReport) -> HypothesisReport {
    HypothesisReport {
        minimality: data.morse_index == 0,
        isolation: isolation.verdict == IsolationVerdict::IsolatedOnSlice,
        free_action: true,
        has_frequency: !data.betas.is_empty(),
    }
}

/// Monic characteristic polynomial `prod (x - e_k)`, coefficients in
/// descending powers.
pub fn characteristic_polynomial(eigenvalues: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &e in eigenvalues {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= e * c;
        }
        coeffs = next;
    }
    coeffs
}

/// Largest coefficient deviation between the characteristic polynomial of
/// the computed spectrum and `expected_coeffs` (descending powers, any
/// nonzero leading coefficient). A lower-degree expectation is padded with
/// the kernel factor `x^(d - deg)`.
pub fn characteristic_polynomial_check(data: &SpectralData, expected_coeffs: &[f64]) -> Result<f64> {
    let computed = characteristic_polynomial(&data.raw_eigenvalues);
    let lead = *expected_coeffs
        .first()
        .filter(|c| **c != 0.0)
        .ok_or_else(|| Error::InvalidArgument("expected polynomial needs a nonzero leading coefficient".into()))?;
    let mut expected: Vec<f64> = expected_coeffs.iter().map(|c| c / lead).collect();
    if expected.len() > computed.len() {
        return Err(Error::InvalidArgument(format!(
            "expected polynomial degree {} exceeds matrix dimension {}",
            expected.len() - 1,
            computed.len() - 1
        )));
    }
    expected.resize(computed.len(), 0.0);
    Ok(computed
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
