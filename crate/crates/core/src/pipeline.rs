//! Orbit → spectra → hypotheses → resonance → certificates, and the optional
//! continuation of the certified families.

use std::path::{Path, PathBuf};

use crate::config::AnalysisConfig;
use crate::conley::{bifurcation_certificate, DEFAULT_MODE_ZERO_TOL};
use crate::critical::{isolation_scan, refine_critical, CriticalOrbit, RefineOptions, DEFAULT_ISOLATION_THRESHOLD};
use crate::error::{Error, Result};
use crate::periodic::{
    continue_all_branches, verify_orbit, write_family_csv, write_trajectory_csv, ContinuationOptions,
    OrbitFamily, VerifyOptions,
};
use crate::potential::{Configuration, PotentialModel};
use crate::report::{normalize, AnalysisReport, FamilySummary, OrbitReport, SpectrumSummary};
use crate::resonance::{resonance_report, ResonanceOptions, DEFAULT_PERIOD_K_MAX};
use crate::spectral::{analyze_hessian, check_hypotheses, SpectralData, SpectralMode};

pub struct AnalyzedOrbit {
    pub orbit: CriticalOrbit,
    /// Spectral data in the configured mode.
    pub spectral: SpectralData,
    pub control: bool,
}

pub struct Analysis {
    pub config: AnalysisConfig,
    pub model: PotentialModel,
    pub orbits: Vec<AnalyzedOrbit>,
    pub report: AnalysisReport,
}

impl Analysis {
    /// True when every non-control orbit satisfies the hypotheses.
    pub fn hypotheses_hold(&self) -> bool {
        self.report
            .orbits
            .iter()
            .filter(|o| !o.control)
            .all(|o| o.hypotheses.all_hold())
    }

    pub fn exit_code(&self) -> i32 {
        if self.hypotheses_hold() {
            0
        } else {
            2
        }
    }

    fn orbit_index(&self, label: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.orbit.label == label)
    }
}

fn analyze_orbit(
    config: &AnalysisConfig,
    model: &PotentialModel,
    label: &str,
    coords: &[f64],
    control: bool,
) -> Result<(AnalyzedOrbit, OrbitReport)> {
    let o = &config.options;
    let seed = Configuration::new(coords.to_vec())?;
    let q = refine_critical(model, &seed, &RefineOptions::default())?;
    let com_zero = q.center_of_mass().norm() <= 1e-12 * (1.0 + q.coords().amax());
    let orbit = CriticalOrbit::from_critical_point(model, label, q, o.grad_tol)?.with_com_zero(com_zero);
    let mode = config.options.mode.spectral_mode();
    let spectra = [SpectralMode::Ambient, SpectralMode::ComReduced]
        .into_iter()
        .map(|m| analyze_hessian(model, &orbit, m, o.cluster_tol))
        .collect::<Result<Vec<_>>>()?;
    let spectral = spectra
        .iter()
        .find(|d| d.mode == mode)
        .cloned()
        .expect("mode is analysed");
    let isolation = isolation_scan(
        model,
        &orbit,
        o.isolation_radius,
        o.isolation_samples,
        DEFAULT_ISOLATION_THRESHOLD,
    )?;
    let hypotheses = check_hypotheses(&spectral, &isolation);
    let failures: Vec<String> = hypotheses.failures().iter().map(|s| s.to_string()).collect();
    let mut warnings: Vec<String> = spectral.warnings.clone();
    let (mut resonance, mut certificates) = (None, Vec::new());
    if hypotheses.all_hold() {
        let betas = spectral.beta_values();
        let beta_min = betas.last().map(|b| b.0).unwrap_or(1.0);
        let res = resonance_report(
            &betas,
            &ResonanceOptions {
                lambda_max: o.lambda_max.unwrap_or(1.5 / beta_min),
                int_tol: o.int_tol,
                eps_cap: o.eps_cap,
                period_k_max: DEFAULT_PERIOD_K_MAX,
            },
        )?;
        warnings.extend(res.warnings.iter().cloned());
        for f in &res.per_frequency {
            certificates.push(bifurcation_certificate(&spectral, &f.window, DEFAULT_MODE_ZERO_TOL)?);
        }
        resonance = Some(res);
    } else {
        warnings.push(format!(
            "hypotheses fail ({}); no certificate produced",
            failures.join(", ")
        ));
    }
    let report = OrbitReport {
        label: label.to_string(),
        control,
        q0: orbit.q0.to_vec(),
        value: orbit.value,
        grad_norm: orbit.grad_norm,
        failures,
        warnings,
        hypotheses,
        isolation,
        spectra: spectra.iter().map(SpectrumSummary::from).collect(),
        resonance,
        certificates,
        families: Vec::new(),
    };
    Ok((
        AnalyzedOrbit {
            orbit,
            spectral,
            control,
        },
        report,
    ))
}

pub fn analyze(config: &AnalysisConfig) -> Result<Analysis> {
    config.validate()?;
    let model = config.model()?;
    let mut orbits = Vec::new();
    let mut reports = Vec::new();
    for (label, coords, control) in config.seeds(&model)? {
        log::info!("analysing orbit {label}");
        let (a, r) = analyze_orbit(config, &model, &label, &coords, control)?;
        orbits.push(a);
        reports.push(r);
    }
    let report = normalize(&AnalysisReport {
        tool: format!("symcenter {}", env!("CARGO_PKG_VERSION")),
        mode: config.options.mode,
        problem: config.problem.clone(),
        warnings: Vec::new(),
        orbits: reports,
    })?;
    Ok(Analysis {
        config: config.clone(),
        model,
        orbits,
        report,
    })
}

/// Continues and verifies every branch for the requested `j0` (all certified
/// `j0` when `None`) on each non-control orbit whose hypotheses hold. The
/// families are also recorded in `analysis.report`.
pub fn run_families(analysis: &mut Analysis, j0: Option<usize>) -> Result<Vec<(String, OrbitFamily)>> {
    let o = &analysis.config.options;
    let amplitudes = o.amplitudes.values()?;
    let copts = ContinuationOptions {
        n_modes: o.n_modes,
        tol: o.residual_tol,
        ..Default::default()
    };
    let vopts = VerifyOptions {
        steps: o.verify_steps,
        ..Default::default()
    };
    let mut jobs = Vec::new();
    for r in analysis.report.orbits.iter().filter(|r| !r.control) {
        if !r.hypotheses.all_hold() {
            return Err(Error::InvalidArgument(format!(
                "orbit {} fails hypotheses ({}); families are not continued",
                r.label,
                r.failures.join(", ")
            )));
        }
        let certified: Vec<usize> = r.certificates.iter().filter(|c| c.changed).map(|c| c.j0).collect();
        let admissible = r
            .resonance
            .as_ref()
            .map(|res| res.admissibility.admissible.clone())
            .unwrap_or_default();
        let targets = match j0 {
            Some(j) if admissible.contains(&j) => {
                if !certified.contains(&j) {
                    log::warn!("continuing j0 = {j} on {} without a changed certificate", r.label);
                }
                vec![j]
            }
            Some(j) => return Err(Error::Inadmissible { j0: j, admissible }),
            None => certified,
        };
        let idx = analysis.orbit_index(&r.label).expect("orbit analysed");
        jobs.extend(targets.into_iter().map(|j| (idx, j)));
    }

    let model = &analysis.model;
    let orbits = &analysis.orbits;
    let results: Vec<Result<Vec<OrbitFamily>>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(idx, j)| {
                let (copts, vopts, amplitudes) = (&copts, &vopts, &amplitudes);
                s.spawn(move || {
                    let a = &orbits[idx];
                    let mut fams = continue_all_branches(model, &a.orbit, &a.spectral, j, amplitudes, copts)?;
                    for fam in &mut fams {
                        for sample in &mut fam.samples {
                            *sample = verify_orbit(model, a.orbit.q0.coords(), sample, vopts)?;
                        }
                    }
                    Ok(fams)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("family worker panicked")).collect()
    });

    let mut out = Vec::new();
    for (&(idx, _), fams) in jobs.iter().zip(results) {
        let label = analysis.orbits[idx].orbit.label.clone();
        for fam in fams? {
            let summary = normalize(&FamilySummary::from(&fam))?;
            let report = analysis
                .report
                .orbits
                .iter_mut()
                .find(|r| r.label == label)
                .expect("orbit reported");
            report.families.retain(|f| !(f.j0 == summary.j0 && f.branch == summary.branch));
            report.families.push(summary);
            out.push((label.clone(), fam));
        }
    }
    Ok(out)
}

/// Per-sample trajectory CSVs and one summary CSV per family.
pub fn export_families(
    model: &PotentialModel,
    families: &[(String, OrbitFamily)],
    dir: &Path,
    rows: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (label, fam) in families {
        let stem = format!("{label}_j{}_b{}", fam.j0, fam.branch);
        let summary = dir.join(format!("{stem}_summary.csv"));
        write_family_csv(std::fs::File::create(&summary)?, fam)?;
        written.push(summary);
        for (k, s) in fam.samples.iter().enumerate() {
            let path = dir.join(format!("{stem}_a{k:02}.csv"));
            write_trajectory_csv(std::fs::File::create(&path)?, model, s, rows)?;
            written.push(path);
        }
    }
    Ok(written)
}
