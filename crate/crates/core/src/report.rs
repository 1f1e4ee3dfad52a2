//! Machine-readable analysis report, written as TOML.
//!
//! Every float is rounded to 15 significant digits when the report is built,
//! so writing and re-reading a report gives back an identical value.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{ModeChoice, ProblemConfig};
use crate::conley::BifurcationCertificate;
use crate::critical::IsolationReport;
use crate::error::{Error, Result};
use crate::periodic::{OrbitFamily, OrbitFamilySample};
use crate::resonance::ResonanceReport;
use crate::spectral::{Cluster, HypothesisReport, SpectralData, SpectralMode};

pub const REPORT_DIGITS: usize = 15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub mode: ModeChoice,
    pub problem: ProblemConfig,
    pub warnings: Vec<String>,
    pub orbits: Vec<OrbitReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub label: String,
    /// Negative controls are expected to fail and do not set the exit code.
    pub control: bool,
    pub q0: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub hypotheses: HypothesisReport,
    pub isolation: IsolationReport,
    pub spectra: Vec<SpectrumSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ResonanceReport>,
    #[serde(default)]
    pub certificates: Vec<BifurcationCertificate>,
    #[serde(default)]
    pub families: Vec<FamilySummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub mode: SpectralMode,
    pub dimension: usize,
    pub kernel_dim: usize,
    pub morse_index: usize,
    pub extra_kernel_dim: usize,
    /// `(beta, multiplicity)`, descending.
    pub betas: Vec<(f64, usize)>,
    pub warnings: Vec<String>,
    pub eigenvalues: Vec<Cluster>,
}

impl From<&SpectralData> for SpectrumSummary {
    fn from(d: &SpectralData) -> Self {
        Self {
            mode: d.mode,
            dimension: d.dimension,
            kernel_dim: d.kernel_dim,
            morse_index: d.morse_index,
            extra_kernel_dim: d.extra_kernel_dim,
            betas: d.beta_values(),
            warnings: d.warnings.clone(),
            eigenvalues: d.eigenvalues.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub j0: usize,
    pub branch: usize,
    pub beta: f64,
    pub multiplicity: usize,
    pub limit_period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_fit_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    pub warnings: Vec<String>,
    pub samples: Vec<SampleSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub amplitude: f64,
    pub lambda: f64,
    pub period: f64,
    pub residual: f64,
    pub dist_to_orbit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_return: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_period_ok: Option<bool>,
}

impl From<&OrbitFamilySample> for SampleSummary {
    fn from(s: &OrbitFamilySample) -> Self {
        Self {
            amplitude: s.amplitude,
            lambda: s.lambda,
            period: s.period,
            residual: s.residual,
            dist_to_orbit: s.dist_to_orbit,
            closure_error: s.closure_error,
            first_return: s.first_return,
            minimal_period_ok: s.minimal_period_ok,
        }
    }
}

impl From<&OrbitFamily> for FamilySummary {
    fn from(f: &OrbitFamily) -> Self {
        Self {
            j0: f.j0,
            branch: f.branch,
            beta: f.beta,
            multiplicity: f.multiplicity,
            limit_period: f.limit_period,
            lambda_fit_c: f.lambda_fit_c,
            truncated: f.truncated.clone(),
            warnings: f.warnings.clone(),
            samples: f.samples.iter().map(SampleSummary::from).collect(),
        }
    }
}

/// `x` rounded to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut toml::Value) {
    match v {
        toml::Value::Float(f) => *f = round_significant(*f, REPORT_DIGITS),
        toml::Value::Array(a) => a.iter_mut().for_each(round_value),
        toml::Value::Table(t) => t.iter_mut().for_each(|(_, v)| round_value(v)),
        _ => {}
    }
}

/// Rounds every float inside a serializable value.
pub fn normalize<T: Serialize + DeserializeOwned>(value: &T) -> Result<T> {
    let mut v = toml::Value::try_from(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    round_value(&mut v);
    v.try_into().map_err(|e: toml::de::Error| Error::InvalidArgument(e.to_string()))
}

impl AnalysisReport {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            position: e.span().map(|s| s.start).unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn orbit(&self, label: &str) -> Option<&OrbitReport> {
        self.orbits.iter().find(|o| o.label == label)
    }
}
