//! Resonance set, admissible frequencies and bifurcation windows.
//!
//! Frequencies are passed in descending order `beta_1 > ... > beta_m > 0` and
//! indexed from 1, so `j0 = 1` is the largest frequency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_INT_TOL: f64 = 1e-9;
pub const DEFAULT_EPS_CAP: f64 = 1e-2;
pub const EPS_FLOOR: f64 = 1e-12;
pub const DEFAULT_PERIOD_K_MAX: usize = 16;

/// One element `k / beta_j` of the resonance set with every `(k, j)` producing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub value: f64,
    pub provenance: Vec<(u64, usize)>,
}

fn validate_betas(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("no positive frequencies".into()));
    }
    if betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::InvalidArgument(format!("frequencies must be positive: {betas:?}")));
    }
    Ok(())
}

fn check_j0(betas: &[f64], j0: usize) -> Result<()> {
    if j0 == 0 || j0 > betas.len() {
        return Err(Error::InvalidArgument(format!(
            "j0 = {j0} out of range 1..={}",
            betas.len()
        )));
    }
    Ok(())
}

/// All `k / beta_j <= lambda_max`, `k >= 1`, ascending with coincident values merged.
pub fn lambda_set(betas: &[f64], lambda_max: f64) -> Result<Vec<LambdaPoint>> {
    validate_betas(betas)?;
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let mut raw: Vec<(f64, u64, usize)> = Vec::new();
    for (idx, &beta) in betas.iter().enumerate() {
        let kmax = (lambda_max * beta * (1.0 + 1e-15)).floor() as u64;
        for k in 1..=kmax {
            raw.push((k as f64 / beta, k, idx + 1));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<LambdaPoint> = Vec::new();
    for (value, k, j) in raw {
        match out.last_mut() {
            Some(last) if (value - last.value).abs() <= 1e-12 * value => last.provenance.push((k, j)),
            _ => out.push(LambdaPoint {
                value,
                provenance: vec![(k, j)],
            }),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// Admissible indices `j0` (1-based).
    pub admissible: Vec<usize>,
    /// `ratios[j][j0] = beta_j / beta_j0` (0-based storage).
    pub ratios: Vec<Vec<f64>>,
    /// `(j0, j, ratio)` for every ratio within `int_tol` of a positive integer.
    pub near_integer: Vec<(usize, usize, f64)>,
}

fn near_positive_integer(x: f64, int_tol: f64) -> bool {
    let r = x.round();
    r >= 1.0 && (x - r).abs() <= int_tol
}

/// `j0` is admissible iff no `beta_j / beta_j0` (`j != j0`) is a positive integer.
pub fn admissible_frequencies(betas: &[f64], int_tol: f64) -> Result<Admissibility> {
    validate_betas(betas)?;
    if !(int_tol > 0.0 && int_tol < 0.5) {
        return Err(Error::InvalidArgument(format!("int_tol must lie in (0, 0.5), got {int_tol}")));
    }
    let m = betas.len();
    let ratios: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..m).map(|j0| betas[j] / betas[j0]).collect())
        .collect();
    let mut admissible = Vec::new();
    let mut near_integer = Vec::new();
    for j0 in 0..m {
        let mut ok = true;
        for j in (0..m).filter(|&j| j != j0) {
            if near_positive_integer(ratios[j][j0], int_tol) {
                ok = false;
                near_integer.push((j0 + 1, j + 1, ratios[j][j0]));
            }
        }
        if ok {
            admissible.push(j0 + 1);
        }
    }
    Ok(Admissibility {
        admissible,
        ratios,
        near_integer,
    })
}

fn require_admissible(betas: &[f64], j0: usize, int_tol: f64) -> Result<()> {
    check_j0(betas, j0)?;
    let adm = admissible_frequencies(betas, int_tol)?;
    if !adm.admissible.contains(&j0) {
        return Err(Error::Inadmissible {
            j0,
            admissible: adm.admissible,
        });
    }
    Ok(())
}

/// The bifurcation window `[lambda_minus, lambda_plus]` around `1/beta_j0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub j0: usize,
    pub lambda0: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub eps: f64,
}

/// True when the closed window contains no element of the resonance set
/// other than `1/beta_j0`.
pub fn window_is_clean(betas: &[f64], j0: usize, lo: f64, hi: f64) -> bool {
    let beta_max = betas.iter().cloned().fold(0.0, f64::max);
    let kmax = (hi * beta_max).ceil() as u64 + 1;
    for (idx, &beta) in betas.iter().enumerate() {
        for k in 1..=kmax {
            if idx + 1 == j0 && k == 1 {
                continue;
            }
            let v = k as f64 / beta;
            if v >= lo && v <= hi {
                return false;
            }
        }
    }
    true
}

/// `lambda_pm = (1 +- eps)/beta_j0` with `eps <= eps_cap` halved until the
/// window is free of other resonances.
pub fn choose_window(betas: &[f64], j0: usize, eps_cap: f64, int_tol: f64) -> Result<Window> {
    require_admissible(betas, j0, int_tol)?;
    if !(eps_cap > 0.0 && eps_cap < 1.0) {
        return Err(Error::InvalidArgument(format!("eps_cap must lie in (0, 1), got {eps_cap}")));
    }
    let beta = betas[j0 - 1];
    let mut eps = eps_cap;
    while eps >= EPS_FLOOR {
        let lo = (1.0 - eps) / beta;
        let hi = (1.0 + eps) / beta;
        if window_is_clean(betas, j0, lo, hi) {
            return Ok(Window {
                j0,
                lambda0: 1.0 / beta,
                lambda_minus: lo,
                lambda_plus: hi,
                eps,
            });
        }
        eps *= 0.5;
    }
    Err(Error::ResonanceCrowding { j0, floor: EPS_FLOOR })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalPeriodWitness {
    pub holds: bool,
    pub k_min: usize,
    pub k_max: usize,
    /// `(k, k', j)` with `1/(k beta_j0) = k'/beta_j`.
    pub violations: Vec<(usize, u64, usize)>,
}

/// Checks `1/(k beta_j0)` is not in the resonance set for `k = 2..=k_max`,
/// so orbits bifurcating at `1/beta_j0` cannot have period `2 pi/(k beta_j0)`.
pub fn minimal_period_guarantee(
    betas: &[f64],
    j0: usize,
    k_max: usize,
    int_tol: f64,
) -> Result<MinimalPeriodWitness> {
    require_admissible(betas, j0, int_tol)?;
    let beta0 = betas[j0 - 1];
    let mut violations = Vec::new();
    for k in 2..=k_max {
        for (idx, &beta) in betas.iter().enumerate() {
            // 1/(k beta0) = k'/beta  <=>  k' = beta / (k beta0)
            let kp = beta / (k as f64 * beta0);
            if near_positive_integer(kp, int_tol) {
                violations.push((k, kp.round() as u64, idx + 1));
            }
        }
    }
    Ok(MinimalPeriodWitness {
        holds: violations.is_empty(),
        k_min: 2,
        k_max,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResonance {
    pub window: Window,
    /// `2 pi / beta_j0`.
    pub predicted_period: f64,
    pub minimal_period: MinimalPeriodWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub betas: Vec<(f64, usize)>,
    pub lambda_max: f64,
    pub lambda_set: Vec<LambdaPoint>,
    pub admissibility: Admissibility,
    pub per_frequency: Vec<FrequencyResonance>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonanceOptions {
    pub lambda_max: f64,
    pub int_tol: f64,
    pub eps_cap: f64,
    pub period_k_max: usize,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            lambda_max: 1.0,
            int_tol: DEFAULT_INT_TOL,
            eps_cap: DEFAULT_EPS_CAP,
            period_k_max: DEFAULT_PERIOD_K_MAX,
        }
    }
}

/// Full resonance analysis for frequencies `(beta_j, mult_j)`, descending.
pub fn resonance_report(betas: &[(f64, usize)], opts: &ResonanceOptions) -> Result<ResonanceReport> {
    let values: Vec<f64> = betas.iter().map(|b| b.0).collect();
    let lambda_set = lambda_set(&values, opts.lambda_max)?;
    let admissibility = admissible_frequencies(&values, opts.int_tol)?;
    let mut warnings: Vec<String> = admissibility
        .near_integer
        .iter()
        .map(|(j0, j, r)| format!("beta_{j}/beta_{j0} = {r:.12} is within int_tol of an integer; j0 = {j0} inadmissible"))
        .collect();
    let mut per_frequency = Vec::new();
    for &j0 in &admissibility.admissible {
        match choose_window(&values, j0, opts.eps_cap, opts.int_tol) {
            Ok(window) => {
                let minimal_period =
                    minimal_period_guarantee(&values, j0, opts.period_k_max, opts.int_tol)?;
                per_frequency.push(FrequencyResonance {
                    window,
                    predicted_period: std::f64::consts::TAU / values[j0 - 1],
                    minimal_period,
                });
            }
            Err(e) => warnings.push(format!("j0 = {j0}: {e}")),
        }
    }
    Ok(ResonanceReport {
        betas: betas.to_vec(),
        lambda_max: opts.lambda_max,
        lambda_set,
        admissibility,
        per_frequency,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lj3() -> Vec<f64> {
        vec![6.0 * 6f64.sqrt(), 6.0 * 3f64.sqrt()]
    }

    fn schwarzschild_betas() -> Vec<f64> {
        // sqrt of the roots of 5x^3 - 62x^2 + 225x - 243
        vec![6.897303385f64.sqrt(), 3.475009459f64.sqrt(), 2.027687150f64.sqrt()]
    }

    #[test]
    fn lambda_set_lj2() {
        let s = lambda_set(&[12.0], 0.3).unwrap();
        let values: Vec<f64> = s.iter().map(|p| p.value).collect();
        assert_eq!(values.len(), 3);
        for (v, k) in values.iter().zip(1..) {
            assert_relative_eq!(*v, k as f64 / 12.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn lambda_set_unit_beta() {
        let s = lambda_set(&[1.0], 3.5).unwrap();
        assert_eq!(s.iter().map(|p| p.value).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn lambda_set_lj3_smallest() {
        let s = lambda_set(&lj3(), 0.2).unwrap();
        assert_relative_eq!(s[0].value, 1.0 / (6.0 * 6f64.sqrt()), epsilon = 1e-15);
        assert_relative_eq!(s[1].value, 1.0 / (6.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert_eq!(s[0].provenance, vec![(1, 1)]);
        assert_eq!(s[1].provenance, vec![(1, 2)]);
    }

    #[test]
    fn duplicates_merge_with_provenance() {
        let s = lambda_set(&[2.0, 1.0], 2.0).unwrap();
        let one = s.iter().find(|p| (p.value - 1.0).abs() < 1e-12).unwrap();
        assert_eq!(one.provenance.len(), 2);
    }

    #[test]
    fn admissibility_examples() {
        assert_eq!(admissible_frequencies(&[12.0], DEFAULT_INT_TOL).unwrap().admissible, vec![1]);
        assert_eq!(admissible_frequencies(&lj3(), DEFAULT_INT_TOL).unwrap().admissible, vec![1, 2]);
        assert_eq!(
            admissible_frequencies(&schwarzschild_betas(), DEFAULT_INT_TOL).unwrap().admissible,
            vec![1, 2, 3]
        );
        let adm = admissible_frequencies(&[2.0, 1.0], DEFAULT_INT_TOL).unwrap();
        assert_eq!(adm.admissible, vec![1]);
        assert_eq!(adm.near_integer, vec![(2, 1, 2.0)]);
    }

    #[test]
    fn window_lj2() {
        let w = choose_window(&[12.0], 1, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
        assert_eq!(w.eps, 0.01);
        assert_relative_eq!(w.lambda_minus, 0.99 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(w.lambda_plus, 1.01 / 12.0, epsilon = 1e-15);
        let inside: Vec<_> = lambda_set(&[12.0], 1.0)
            .unwrap()
            .into_iter()
            .filter(|p| p.value >= w.lambda_minus && p.value <= w.lambda_plus)
            .collect();
        assert_eq!(inside.len(), 1);
    }

    #[test]
    fn window_two_to_one() {
        let w = choose_window(&[2.0, 1.0], 1, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
        assert!(w.lambda_minus < 0.5 && 0.5 < w.lambda_plus);
        assert!(window_is_clean(&[2.0, 1.0], 1, w.lambda_minus, w.lambda_plus));
        assert!(matches!(
            choose_window(&[2.0, 1.0], 2, DEFAULT_EPS_CAP, DEFAULT_INT_TOL),
            Err(Error::Inadmissible { j0: 2, .. })
        ));
    }

    #[test]
    fn window_shrinks_when_crowded() {
        // 1/1.0 and 1/0.995: the default cap would capture both
        let betas = [1.0, 0.995];
        let w = choose_window(&betas, 1, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
        assert!(w.eps < 0.01);
        assert!(window_is_clean(&betas, 1, w.lambda_minus, w.lambda_plus));
    }

    #[test]
    fn crowding_error_below_floor() {
        // only reachable when int_tol is below the eps floor
        let betas = [1.0, 1.0 - 1e-13];
        assert!(matches!(
            choose_window(&betas, 1, DEFAULT_EPS_CAP, 1e-15),
            Err(Error::ResonanceCrowding { .. })
        ));
    }

    #[test]
    fn minimal_period_examples() {
        assert!(minimal_period_guarantee(&[12.0], 1, 16, DEFAULT_INT_TOL).unwrap().holds);
        assert!(minimal_period_guarantee(&lj3(), 2, 16, DEFAULT_INT_TOL).unwrap().holds);
        assert!(minimal_period_guarantee(&[2.0, 1.0], 2, 16, DEFAULT_INT_TOL).is_err());
    }

    #[test]
    fn report_predicted_period_times_beta_is_tau() {
        let rep = resonance_report(&[(6.0 * 6f64.sqrt(), 1), (6.0 * 3f64.sqrt(), 2)], &Default::default())
            .unwrap();
        assert_eq!(rep.per_frequency.len(), 2);
        for f in &rep.per_frequency {
            let beta = 1.0 / f.window.lambda0;
            assert_relative_eq!(f.predicted_period * beta, std::f64::consts::TAU, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn lambda_set_sorted_and_complete(b1 in 0.5f64..20.0, b2 in 0.5f64..20.0, lmax in 0.1f64..3.0) {
            let betas = [b1, b2];
            let s = lambda_set(&betas, lmax).unwrap();
            for w in s.windows(2) {
                prop_assert!(w[0].value < w[1].value);
            }
            let total: usize = s.iter().map(|p| p.provenance.len()).sum();
            let expected: usize = betas.iter().map(|b| (lmax * b * (1.0 + 1e-15)).floor() as usize).sum();
            prop_assert_eq!(total, expected);
        }

        #[test]
        fn scaling_covariance(b1 in 1.0f64..20.0, r in 0.05f64..0.95, c in 0.1f64..10.0) {
            let betas = [b1, b1 * r];
            let scaled = [c * b1, c * b1 * r];
            let a = admissible_frequencies(&betas, DEFAULT_INT_TOL).unwrap();
            let b = admissible_frequencies(&scaled, DEFAULT_INT_TOL).unwrap();
            prop_assert_eq!(&a.admissible, &b.admissible);
            for (ra, rb) in a.ratios.iter().flatten().zip(b.ratios.iter().flatten()) {
                prop_assert!((ra - rb).abs() <= 1e-12 * ra.abs());
            }
            for &j0 in &a.admissible {
                let wa = choose_window(&betas, j0, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
                let wb = choose_window(&scaled, j0, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
                prop_assert_eq!(wa.eps, wb.eps);
                prop_assert!((wa.lambda_minus / c - wb.lambda_minus).abs() <= 1e-12 * wa.lambda_minus);
                prop_assert!((wa.lambda_plus / c - wb.lambda_plus).abs() <= 1e-12 * wa.lambda_plus);
            }
        }

        #[test]
        fn window_is_clean_under_reenumeration(b1 in 1.0f64..20.0, r in 0.05f64..0.95) {
            let betas = [b1, b1 * r];
            for j0 in admissible_frequencies(&betas, DEFAULT_INT_TOL).unwrap().admissible {
                let w = choose_window(&betas, j0, DEFAULT_EPS_CAP, DEFAULT_INT_TOL).unwrap();
                let set = lambda_set(&betas, w.lambda_plus * 1.5).unwrap();
                let inside: Vec<_> = set.iter().filter(|p| p.value >= w.lambda_minus && p.value <= w.lambda_plus).collect();
                prop_assert_eq!(inside.len(), 1);
                prop_assert!((inside[0].value - w.lambda0).abs() <= 1e-12 * w.lambda0);
            }
        }
    }
}
