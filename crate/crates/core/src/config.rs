//! TOML configuration of an analysis run.
//!
//! ```toml
//! [problem]
//! type = "schwarzschild"        # lennard_jones | schwarzschild | custom
//! a = [-1.5, -1.0, -0.6]        # per pair, order (1,2), (1,3), (2,3), ...
//! b = [0.5, 0.333333333333333, 0.2]
//!
//! [[seeds]]                     # optional; built-in seeds otherwise
//! label = "triangle"
//! coords = [0.57735, 0.0, -0.288675, 0.5, -0.288675, -0.5]
//! control = false               # controls do not affect the exit code
//!
//! [options]
//! mode = "com_reduced"          # or "ambient"
//! n_modes = 16
//!
//! [options.amplitudes]
//! min = 1e-4
//! max = 1e-2
//! count = 9
//!
//! [outputs]
//! report = "report.toml"
//! trajectories = "trajectories"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::critical::{lj_equilibria, schwarzschild_equilibrium, CriticalOrbit};
use crate::error::{Error, Result};
use crate::potential::{pair_index, PairProfile, PotentialModel, PowerSum};
use crate::spectral::SpectralMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<SeedConfig>,
    #[serde(default)]
    pub options: OptionsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    LennardJones {
        n: usize,
    },
    /// `A_ij / r + B_ij / r^3` per pair.
    Schwarzschild {
        #[serde(default = "three")]
        n: usize,
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// `sum_k c_k r^(-p_k)` with the same terms for every pair.
    Custom {
        n: usize,
        terms: Vec<[f64; 2]>,
    },
}

fn three() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub label: String,
    pub coords: Vec<f64>,
    #[serde(default)]
    pub control: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Ambient,
    ComReduced,
}

impl ModeChoice {
    pub fn spectral_mode(self) -> SpectralMode {
        match self {
            ModeChoice::Ambient => SpectralMode::Ambient,
            ModeChoice::ComReduced => SpectralMode::ComReduced,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeConfig {
    List(Vec<f64>),
    Grid { min: f64, max: f64, count: usize },
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        AmplitudeConfig::Grid {
            min: 1e-4,
            max: 1e-2,
            count: 9,
        }
    }
}

impl AmplitudeConfig {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AmplitudeConfig::List(v) => Ok(v.clone()),
            AmplitudeConfig::Grid { min, max, count } => crate::periodic::amplitude_grid(*min, *max, *count),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsConfig {
    pub grad_tol: f64,
    pub cluster_tol: f64,
    pub int_tol: f64,
    pub residual_tol: f64,
    pub eps_cap: f64,
    /// Upper end of the enumerated resonance set; `1.5 / beta_min` when absent.
    pub lambda_max: Option<f64>,
    pub n_modes: usize,
    pub amplitudes: AmplitudeConfig,
    pub mode: ModeChoice,
    pub isolation_radius: f64,
    pub isolation_samples: usize,
    pub verify_steps: usize,
    /// Rows per exported trajectory CSV.
    pub csv_rows: usize,
}

impl Default for OptionsConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            cluster_tol: crate::spectral::DEFAULT_CLUSTER_TOL,
            int_tol: crate::resonance::DEFAULT_INT_TOL,
            residual_tol: crate::periodic::DEFAULT_NEWTON_TOL,
            eps_cap: crate::resonance::DEFAULT_EPS_CAP,
            lambda_max: None,
            n_modes: crate::periodic::DEFAULT_MODES,
            amplitudes: AmplitudeConfig::default(),
            mode: ModeChoice::ComReduced,
            isolation_radius: 1e-3,
            isolation_samples: 64,
            verify_steps: 4096,
            csv_rows: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsConfig {
    pub report: PathBuf,
    pub trajectories: PathBuf,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            report: "report.toml".into(),
            trajectories: "trajectories".into(),
        }
    }
}

impl OutputsConfig {
    /// Relative paths are taken relative to `base`.
    pub fn resolve(&self, base: &Path) -> (PathBuf, PathBuf) {
        (base.join(&self.report), base.join(&self.trajectories))
    }
}

fn field_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

impl AnalysisConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.message().to_string();
            let location = inner
                .span()
                .map(|s| {
                    let line = text[..s.start].matches('\n').count() + 1;
                    format!(" (line {line})")
                })
                .unwrap_or_default();
            field_error(&path, format!("{message}{location}"))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| field_error(&path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn n(&self) -> usize {
        match &self.problem {
            ProblemConfig::LennardJones { n } => *n,
            ProblemConfig::Schwarzschild { n, .. } => *n,
            ProblemConfig::Custom { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(field_error("problem.n", format!("need at least 2 particles, got {n}")));
        }
        let pairs = n * (n - 1) / 2;
        match &self.problem {
            ProblemConfig::Schwarzschild { a, b, .. } => {
                for (name, v) in [("a", a), ("b", b)] {
                    if v.len() != pairs {
                        return Err(field_error(
                            &format!("problem.{name}"),
                            format!("expected {pairs} pair coefficients, got {}", v.len()),
                        ));
                    }
                }
                for (k, (&ak, &bk)) in a.iter().zip(b).enumerate() {
                    if !(ak < 0.0 && bk > 0.0) {
                        return Err(field_error(
                            &format!("problem.a[{k}]"),
                            format!("need A < 0 < B, got A = {ak}, B = {bk}"),
                        ));
                    }
                }
            }
            ProblemConfig::Custom { terms, .. } => {
                if terms.is_empty() {
                    return Err(field_error("problem.terms", "at least one term is required"));
                }
                if terms.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(field_error("problem.terms", "terms must be finite"));
                }
            }
            ProblemConfig::LennardJones { .. } => {}
        }
        for (k, s) in self.seeds.iter().enumerate() {
            if s.coords.len() != 2 * n {
                return Err(field_error(
                    &format!("seeds[{k}].coords"),
                    format!("expected {} coordinates, got {}", 2 * n, s.coords.len()),
                ));
            }
        }
        let o = &self.options;
        for (name, v) in [
            ("grad_tol", o.grad_tol),
            ("cluster_tol", o.cluster_tol),
            ("int_tol", o.int_tol),
            ("residual_tol", o.residual_tol),
            ("isolation_radius", o.isolation_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field_error(&format!("options.{name}"), format!("must be positive, got {v}")));
            }
        }
        if !(o.eps_cap > 0.0 && o.eps_cap < 1.0) {
            return Err(field_error("options.eps_cap", format!("must lie in (0, 1), got {}", o.eps_cap)));
        }
        if let Some(l) = o.lambda_max {
            if !(l > 0.0 && l.is_finite()) {
                return Err(field_error("options.lambda_max", format!("must be positive, got {l}")));
            }
        }
        for (name, v, min) in [
            ("n_modes", o.n_modes, 1),
            ("isolation_samples", o.isolation_samples, 1),
            ("verify_steps", o.verify_steps, 2),
            ("csv_rows", o.csv_rows, 1),
        ] {
            if v < min {
                return Err(field_error(&format!("options.{name}"), format!("must be at least {min}, got {v}")));
            }
        }
        let amps = o
            .amplitudes
            .values()
            .map_err(|e| field_error("options.amplitudes", e.to_string()))?;
        if amps.is_empty() || amps.iter().any(|a| !(*a > 0.0)) || amps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(field_error("options.amplitudes", "must be positive and strictly increasing"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<PotentialModel> {
        let n = self.n();
        match &self.problem {
            ProblemConfig::LennardJones { n } => PotentialModel::lennard_jones(*n),
            ProblemConfig::Schwarzschild { a, b, .. } => {
                let mut pairs = Vec::with_capacity(a.len());
                for i in 0..n {
                    for j in i + 1..n {
                        let k = pair_index(n, i, j);
                        pairs.push(PairProfile::schwarzschild(a[k], b[k])?);
                    }
                }
                PotentialModel::from_pairs(n, pairs)
            }
            ProblemConfig::Custom { terms, .. } => {
                let profile = PowerSum::new(terms.iter().map(|t| (t[0], t[1])).collect())?;
                PotentialModel::uniform(n, PairProfile::custom(profile))
            }
        }
    }

    /// Seeds from the config, or the built-in equilibria of the problem.
    /// Returns `(orbit label, configuration, is_control)` before refinement.
    pub fn seeds(&self, model: &PotentialModel) -> Result<Vec<(String, Vec<f64>, bool)>> {
        if !self.seeds.is_empty() {
            return Ok(self
                .seeds
                .iter()
                .map(|s| (s.label.clone(), s.coords.clone(), s.control))
                .collect());
        }
        let builtin: Vec<CriticalOrbit> = match &self.problem {
            ProblemConfig::LennardJones { n: 2 } => lj_equilibria(2)?,
            ProblemConfig::LennardJones { n: 3 } => lj_equilibria(3)?
                .into_iter()
                .filter(|o| o.label == "q04")
                .collect(),
            ProblemConfig::Schwarzschild { n: 3, .. } => {
                let p = model.pairs();
                vec![schwarzschild_equilibrium(&[p[0].clone(), p[1].clone(), p[2].clone()], 0.0)?]
            }
            _ => {
                return Err(field_error(
                    "seeds",
                    "no built-in equilibrium for this problem; give [[seeds]] explicitly",
                ))
            }
        };
        Ok(builtin
            .into_iter()
            .map(|o| (o.label.clone(), o.q0.to_vec(), false))
            .collect())
    }
}
