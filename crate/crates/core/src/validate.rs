//! Regression table of the built-in presets against their reference values.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::{analyze, run_families, Analysis};
use crate::presets::{preset, PRESETS};
use crate::report::{FamilySummary, OrbitReport, SpectrumSummary};
use crate::spectral::SpectralMode;

/// Reference values checked by `validate`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectations {
    pub lj2_ambient: Vec<(f64, usize)>,
    pub lj2_value: f64,
    pub lj2_period: f64,
    pub lj2_max_amplitude: f64,
    /// Lower bound on the periods of the relative-equilibrium family.
    pub relative_equilibrium_bound: f64,
    pub lj3_ambient: Vec<(f64, usize)>,
    pub lj3_value: f64,
    pub lj3_admissible: Vec<usize>,
    /// Limit periods for `j0 = 1, 2`.
    pub lj3_periods: Vec<f64>,
    pub lj3_controls: Vec<String>,
    pub schwarzschild_side: f64,
    /// Coefficients, descending, of the polynomial whose roots are the nonzero eigenvalues.
    pub schwarzschild_poly: Vec<f64>,
    pub schwarzschild_admissible: Vec<usize>,
    pub spectrum_tol_lj2: f64,
    pub spectrum_tol: f64,
    pub period_tol: f64,
    pub closure_tol: f64,
}

impl Default for Expectations {
    fn default() -> Self {
        Self {
            lj2_ambient: vec![(0.0, 3), (144.0, 1)],
            lj2_value: -1.0,
            lj2_period: PI / 6.0,
            lj2_max_amplitude: 1e-2,
            relative_equilibrium_bound: 7.0 * PI / 6.0 * (7.0f64 / 32.0).powf(1.0 / 6.0),
            lj3_ambient: vec![(0.0, 3), (108.0, 2), (216.0, 1)],
            lj3_value: -3.0,
            lj3_admissible: vec![1, 2],
            lj3_periods: vec![PI / (3.0 * 6f64.sqrt()), PI / (3.0 * 3f64.sqrt())],
            lj3_controls: vec!["q01".into(), "q02".into(), "q03".into()],
            schwarzschild_side: 1.0,
            schwarzschild_poly: vec![5.0, -62.0, 225.0, -243.0],
            schwarzschild_admissible: vec![1, 2, 3],
            spectrum_tol_lj2: 1e-8,
            spectrum_tol: 1e-6,
            period_tol: 1e-3,
            closure_tol: 100.0 * crate::periodic::DEFAULT_NEWTON_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub preset: String,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationTable {
    pub rows: Vec<RowResult>,
}

impl ValidationTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, preset: &str, check: &str) -> Option<&RowResult> {
        self.rows.iter().find(|r| r.preset == preset && r.check == check)
    }
}

impl fmt::Display for ValidationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wp = self.rows.iter().map(|r| r.preset.len()).max().unwrap_or(6).max(6);
        let wc = self.rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<wp$}  {:<wc$}  result  detail", "preset", "check")?;
        for r in &self.rows {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{:<wp$}  {:<wc$}  {verdict:<6}  {}", r.preset, r.check, r.detail)?;
        }
        let failed = self.rows.iter().filter(|r| !r.pass).count();
        write!(f, "{} rows, {failed} failed", self.rows.len())
    }
}

struct Rows<'a> {
    preset: &'a str,
    out: Vec<RowResult>,
}

impl Rows<'_> {
    fn push(&mut self, check: &str, pass: bool, detail: impl Into<String>) {
        self.out.push(RowResult {
            preset: self.preset.to_string(),
            check: check.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    fn push_result(&mut self, check: &str, r: Result<(bool, String)>) {
        match r {
            Ok((pass, detail)) => self.push(check, pass, detail),
            Err(e) => self.push(check, false, format!("error: {e}")),
        }
    }
}

fn spectrum<'a>(o: &'a OrbitReport, mode: SpectralMode) -> Result<&'a SpectrumSummary> {
    o.spectra
        .iter()
        .find(|s| s.mode == mode)
        .ok_or_else(|| Error::InvalidArgument(format!("no {mode} spectrum")))
}

fn spectrum_matches(s: &SpectrumSummary, expected: &[(f64, usize)], tol: f64) -> (bool, String) {
    let got: Vec<(f64, usize)> = s.eigenvalues.iter().map(|c| (c.value, c.multiplicity)).collect();
    let ok = got.len() == expected.len()
        && got
            .iter()
            .zip(expected)
            .all(|(g, e)| g.1 == e.1 && (g.0 - e.0).abs() <= tol);
    (ok, format!("{got:?} vs {expected:?}"))
}

fn primary(a: &Analysis) -> Result<&OrbitReport> {
    a.report
        .orbits
        .iter()
        .find(|o| !o.control)
        .ok_or_else(|| Error::InvalidArgument("no primary orbit".into()))
}

fn certificate_rows(rows: &mut Rows, o: &OrbitReport) {
    let mut ok = !o.certificates.is_empty();
    let mut details = Vec::new();
    for c in &o.certificates {
        let dim_ok = c.r_plus as i64 - c.r_minus as i64 == c.multiplicity_j0 as i64;
        ok &= c.changed && dim_ok && c.sign_product < 0.0;
        details.push(format!(
            "j0={} changed={} r+-r-={} mult={} sign={:.3e}",
            c.j0,
            c.changed,
            c.r_plus as i64 - c.r_minus as i64,
            c.multiplicity_j0,
            c.sign_product
        ));
    }
    rows.push("certificates", ok, details.join("; "));
}

fn family_period_rows(
    rows: &mut Rows,
    families: &[FamilySummary],
    j0: usize,
    limit: f64,
    period_tol: f64,
    closure_tol: f64,
) {
    let fams: Vec<&FamilySummary> = families.iter().filter(|f| f.j0 == j0).collect();
    let reach = !fams.is_empty()
        && fams.iter().all(|f| {
            f.truncated.is_none()
                && f.samples
                    .first()
                    .is_some_and(|s| (s.period - limit).abs() <= period_tol)
        });
    let firsts: Vec<String> = fams
        .iter()
        .map(|f| {
            f.samples
                .first()
                .map(|s| format!("branch {}: T = {:.9}", f.branch, s.period))
                .unwrap_or_else(|| format!("branch {}: no samples", f.branch))
        })
        .collect();
    rows.push(
        &format!("family-j{j0}-limit"),
        reach,
        format!("{} (target {limit:.9})", firsts.join(", ")),
    );
    let closure_ok = !fams.is_empty()
        && fams.iter().flat_map(|f| &f.samples).all(|s| {
            s.closure_error.is_some_and(|c| c < closure_tol) && s.minimal_period_ok == Some(true)
        });
    let worst = fams
        .iter()
        .flat_map(|f| &f.samples)
        .filter_map(|s| s.closure_error)
        .fold(0.0, f64::max);
    rows.push(
        &format!("family-j{j0}-closure"),
        closure_ok,
        format!("max closure {worst:.2e}, minimal periods checked"),
    );
}

fn polynomial_roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let n = coeffs.len() - 1;
    let mut c = DMatrix::zeros(n, n);
    for j in 0..n {
        c[(0, j)] = -coeffs[j + 1] / coeffs[0];
    }
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<(f64, f64)> = c.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
}

fn validate_lj2(exp: &Expectations) -> Result<Vec<RowResult>> {
    let mut rows = Rows {
        preset: "lj2",
        out: Vec::new(),
    };
    let mut a = analyze(&preset("lj2")?)?;
    let o = primary(&a)?.clone();
    rows.push_result(
        "spectrum",
        spectrum(&o, SpectralMode::Ambient).map(|s| spectrum_matches(s, &exp.lj2_ambient, exp.spectrum_tol_lj2)),
    );
    rows.push(
        "potential",
        (o.value - exp.lj2_value).abs() <= 1e-12,
        format!("U(q0) = {}", o.value),
    );
    certificate_rows(&mut rows, &o);
    run_families(&mut a, Some(1))?;
    let fams = primary(&a)?.families.clone();
    let samples: Vec<_> = fams
        .iter()
        .flat_map(|f| &f.samples)
        .filter(|s| s.amplitude <= exp.lj2_max_amplitude)
        .collect();
    let (worst_dev, worst_amp) = samples
        .iter()
        .map(|s| ((s.period - exp.lj2_period).abs(), s.amplitude))
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    rows.push(
        "family-period",
        !samples.is_empty() && worst_dev <= exp.period_tol,
        format!("max |T - pi/6| = {worst_dev:.3e} at amplitude {worst_amp:.1e}"),
    );
    let dists: Vec<f64> = samples.iter().map(|s| s.dist_to_orbit).collect();
    rows.push(
        "family-distance",
        dists.len() >= 2 && dists.windows(2).all(|w| w[0] < w[1]),
        format!("dist_to_orbit {:.2e} .. {:.2e}", dists.first().unwrap_or(&0.0), dists.last().unwrap_or(&0.0)),
    );
    let longest = samples.iter().map(|s| s.period).fold(0.0, f64::max);
    rows.push(
        "family-distinct",
        longest < exp.relative_equilibrium_bound,
        format!("max period {longest:.6} < {:.4}", exp.relative_equilibrium_bound),
    );
    family_period_rows(&mut rows, &fams, 1, exp.lj2_period, f64::INFINITY, exp.closure_tol);
    rows.out.retain(|r| r.check != "family-j1-limit");
    Ok(rows.out)
}

fn validate_lj3(exp: &Expectations) -> Result<Vec<RowResult>> {
    let mut rows = Rows {
        preset: "lj3",
        out: Vec::new(),
    };
    let mut a = analyze(&preset("lj3")?)?;
    let o = primary(&a)?.clone();
    rows.push_result(
        "spectrum",
        spectrum(&o, SpectralMode::Ambient).map(|s| spectrum_matches(s, &exp.lj3_ambient, exp.spectrum_tol)),
    );
    rows.push(
        "potential",
        (o.value - exp.lj3_value).abs() <= 1e-12,
        format!("U(q04) = {}", o.value),
    );
    let admissible = o
        .resonance
        .as_ref()
        .map(|r| r.admissibility.admissible.clone())
        .unwrap_or_default();
    rows.push(
        "admissible",
        admissible == exp.lj3_admissible,
        format!("{admissible:?}"),
    );
    certificate_rows(&mut rows, &o);
    for label in &exp.lj3_controls {
        let c = a.report.orbit(label);
        let ok = c.is_some_and(|c| !c.hypotheses.minimality && c.certificates.is_empty());
        let detail = c
            .map(|c| format!("morse index {}, failures {:?}", spectrum(c, SpectralMode::ComReduced).map(|s| s.morse_index).unwrap_or(0), c.failures))
            .unwrap_or_else(|| "orbit missing".into());
        rows.push(&format!("control-{label}"), ok, detail);
    }
    run_families(&mut a, None)?;
    let fams = primary(&a)?.families.clone();
    for (j0, &limit) in exp.lj3_periods.iter().enumerate() {
        family_period_rows(&mut rows, &fams, j0 + 1, limit, exp.period_tol, exp.closure_tol);
    }
    Ok(rows.out)
}

fn validate_schwarzschild(exp: &Expectations) -> Result<Vec<RowResult>> {
    let mut rows = Rows {
        preset: "schwarzschild-example",
        out: Vec::new(),
    };
    let a = analyze(&preset("schwarzschild-example")?)?;
    let o = primary(&a)?.clone();
    let q = &o.q0;
    let side = |i: usize, j: usize| (q[2 * i] - q[2 * j]).hypot(q[2 * i + 1] - q[2 * j + 1]);
    let sides = [side(0, 1), side(0, 2), side(1, 2)];
    rows.push(
        "sides",
        sides.iter().all(|s| (s - exp.schwarzschild_side).abs() <= 1e-9),
        format!("{sides:?}"),
    );
    let roots = polynomial_roots(&exp.schwarzschild_poly);
    rows.push_result(
        "spectrum",
        spectrum(&o, SpectralMode::Ambient).map(|s| {
            let nonzero: Vec<f64> = s
                .eigenvalues
                .iter()
                .filter(|c| c.value.abs() > 1e-8)
                .flat_map(|c| std::iter::repeat(c.value).take(c.multiplicity))
                .collect();
            let real = roots.iter().all(|r| r.1.abs() <= 1e-9);
            let ok = real
                && nonzero.len() == roots.len()
                && nonzero.iter().zip(&roots).all(|(e, r)| (e - r.0).abs() <= exp.spectrum_tol);
            (ok, format!("eigenvalues {nonzero:?}, roots {roots:?}"))
        }),
    );
    let admissible = o
        .resonance
        .as_ref()
        .map(|r| r.admissibility.admissible.clone())
        .unwrap_or_default();
    rows.push(
        "admissible",
        admissible == exp.schwarzschild_admissible,
        format!("{admissible:?}"),
    );
    certificate_rows(&mut rows, &o);
    Ok(rows.out)
}

/// Runs the named presets (all when `selection` is empty).
pub fn validate(selection: &[String], exp: &Expectations) -> Result<ValidationTable> {
    for s in selection {
        if !PRESETS.contains(&s.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown preset `{s}` (known: {})",
                PRESETS.join(", ")
            )));
        }
    }
    let wanted = |name: &str| selection.is_empty() || selection.iter().any(|s| s == name);
    let mut table = ValidationTable::default();
    for name in PRESETS.into_iter().filter(|n| wanted(n)) {
        let rows = match name {
            "lj2" => validate_lj2(exp),
            "lj3" => validate_lj3(exp),
            _ => validate_schwarzschild(exp),
        };
        match rows {
            Ok(r) => table.rows.extend(r),
            Err(e) => table.rows.push(RowResult {
                preset: name.into(),
                check: "pipeline".into(),
                pass: false,
                detail: format!("error: {e}"),
            }),
        }
    }
    Ok(table)
}
