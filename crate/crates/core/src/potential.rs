//! Planar N-body pairwise potentials.
//!
//! A [`PotentialModel`] assigns a radial profile `f_ij(r)` to every unordered
//! pair of particles and evaluates
//!
//! ```text
//! U(q) = sum_{i<j} f_ij(|q_i - q_j|)
//! ```
//!
//! together with its gradient and Hessian. Every model built from radial
//! profiles is invariant under rotations and translations of the plane.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance below which a pair is treated as a collision.
pub const DEFAULT_MIN_DISTANCE: f64 = 1e-8;

/// N planar particles stored as `(x_1, y_1, ..., x_N, y_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    coords: DVector<f64>,
}

impl Configuration {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(coords: DVector<f64>) -> Result<Self> {
        if coords.len() % 2 != 0 {
            return Err(Error::InvalidConfiguration(format!(
                "coordinate vector has odd length {}",
                coords.len()
            )));
        }
        if coords.len() < 4 {
            return Err(Error::InvalidConfiguration(format!(
                "need at least 2 particles, got {}",
                coords.len() / 2
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfiguration("non-finite coordinate".into()));
        }
        Ok(Self { coords })
    }

    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(points.iter().flat_map(|p| [p[0], p[1]]).collect())
    }

    /// Number of particles.
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }

    pub fn position(&self, i: usize) -> Vector2<f64> {
        Vector2::new(self.coords[2 * i], self.coords[2 * i + 1])
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.position(i) - self.position(j)).norm()
    }

    /// Smallest pairwise distance and the pair realising it.
    pub fn min_distance(&self) -> (usize, usize, f64) {
        let mut best = (0, 1, f64::INFINITY);
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let r = self.distance(i, j);
                if r < best.2 {
                    best = (i, j, r);
                }
            }
        }
        best
    }

    pub fn center_of_mass(&self) -> Vector2<f64> {
        let mut c = Vector2::zeros();
        for i in 0..self.n() {
            c += self.position(i);
        }
        c / self.n() as f64
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A radial pair profile `f(r)` with analytic first and second derivatives.
pub trait RadialProfile: fmt::Debug + Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;
}

/// `f(r) = sum_k c_k r^(-p_k)`.
///
/// Covers Lennard-Jones (`[(1, 12), (-2, 6)]`) and Schwarzschild
/// (`[(A, 1), (B, 3)]`) as special cases, and is the form accepted for
/// custom profiles in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSum {
    pub terms: Vec<(f64, f64)>,
}

impl PowerSum {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProfile("power sum has no terms".into()));
        }
        if terms.iter().any(|(c, p)| !c.is_finite() || !p.is_finite()) {
            return Err(Error::InvalidProfile("non-finite power-sum term".into()));
        }
        Ok(Self { terms })
    }
}

impl RadialProfile for PowerSum {
    fn value(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * r.powf(-p)).sum()
    }

    fn d1(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| -p * c * r.powf(-p - 1.0)).sum()
    }

    fn d2(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, p)| p * (p + 1.0) * c * r.powf(-p - 2.0))
            .sum()
    }
}

/// Interaction profile for one unordered pair.
#[derive(Clone, Debug)]
pub enum PairProfile {
    /// `r^-12 - 2 r^-6` (unit depth, minimum at r = 1).
    LennardJones,
    /// `A/r + B/r^3` with `A < 0 < B`.
    Schwarzschild { a: f64, b: f64 },
    Custom(Arc<dyn RadialProfile>),
}

impl PairProfile {
    pub fn schwarzschild(a: f64, b: f64) -> Result<Self> {
        if !(a < 0.0 && b > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "Schwarzschild profile needs A < 0 < B, got A = {a}, B = {b}"
            )));
        }
        Ok(PairProfile::Schwarzschild { a, b })
    }

    pub fn custom(profile: impl RadialProfile + 'static) -> Self {
        PairProfile::Custom(Arc::new(profile))
    }

    /// `(f(r), f'(r), f''(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match self {
            PairProfile::LennardJones => {
                let inv = 1.0 / r;
                let inv2 = inv * inv;
                let inv6 = inv2 * inv2 * inv2;
                let inv12 = inv6 * inv6;
                (
                    inv12 - 2.0 * inv6,
                    12.0 * (inv6 - inv12) * inv,
                    (156.0 * inv12 - 84.0 * inv6) * inv2,
                )
            }
            PairProfile::Schwarzschild { a, b } => {
                let inv = 1.0 / r;
                let inv2 = inv * inv;
                let inv3 = inv2 * inv;
                (
                    a * inv + b * inv3,
                    -a * inv2 - 3.0 * b * inv3 * inv,
                    2.0 * a * inv3 + 12.0 * b * inv3 * inv2,
                )
            }
            PairProfile::Custom(p) => (p.value(r), p.d1(r), p.d2(r)),
        }
    }

    /// Critical distance `sqrt(-3B/A)` of a Schwarzschild profile.
    pub fn schwarzschild_critical_distance(&self) -> Option<f64> {
        match *self {
            PairProfile::Schwarzschild { a, b } => Some((-3.0 * b / a).sqrt()),
            _ => None,
        }
    }
}

/// Symmetric table of pair profiles over all `N(N-1)/2` unordered pairs.
#[derive(Clone, Debug)]
pub struct PotentialModel {
    n: usize,
    pairs: Vec<PairProfile>,
    min_distance: f64,
}

/// Index of the unordered pair `{i, j}`, `i < j`, in row-major upper-triangular order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl PotentialModel {
    pub fn from_pairs(n: usize, pairs: Vec<PairProfile>) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedParticleCount(n));
        }
        let expected = n * (n - 1) / 2;
        if pairs.len() != expected {
            return Err(Error::InvalidProfile(format!(
                "pair table has {} entries, expected {expected} for n = {n}",
                pairs.len()
            )));
        }
        Ok(Self {
            n,
            pairs,
            min_distance: DEFAULT_MIN_DISTANCE,
        })
    }

    pub fn uniform(n: usize, profile: PairProfile) -> Result<Self> {
        let count = n.saturating_sub(1) * n / 2;
        Self::from_pairs(n, vec![profile; count])
    }

    pub fn lennard_jones(n: usize) -> Result<Self> {
        Self::uniform(n, PairProfile::LennardJones)
    }

    /// Three-body Schwarzschild model; coefficients ordered `(12, 13, 23)`.
    pub fn schwarzschild3(a: [f64; 3], b: [f64; 3]) -> Result<Self> {
        let pairs = a
            .iter()
            .zip(b.iter())
            .map(|(&a, &b)| PairProfile::schwarzschild(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(3, pairs)
    }

    pub fn with_min_distance(mut self, floor: f64) -> Self {
        self.min_distance = floor;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn pair(&self, i: usize, j: usize) -> &PairProfile {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        &self.pairs[pair_index(self.n, i, j)]
    }

    pub fn pairs(&self) -> &[PairProfile] {
        &self.pairs
    }

    fn check_len(&self, q: &DVector<f64>) -> Result<()> {
        if q.len() != 2 * self.n {
            return Err(Error::InvalidConfiguration(format!(
                "model has {} particles, configuration has length {}",
                self.n,
                q.len()
            )));
        }
        Ok(())
    }

    /// Calls `visit(i, j, d, r, profile)` for every pair, with `d = q_i - q_j`.
    fn for_each_pair(
        &self,
        q: &DVector<f64>,
        mut visit: impl FnMut(usize, usize, Vector2<f64>, f64, &PairProfile),
    ) -> Result<()> {
        self.check_len(q)?;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = Vector2::new(q[2 * i] - q[2 * j], q[2 * i + 1] - q[2 * j + 1]);
                let r = d.norm();
                if !(r >= self.min_distance) {
                    return Err(Error::Collision {
                        i,
                        j,
                        distance: r,
                        floor: self.min_distance,
                    });
                }
                visit(i, j, d, r, &self.pairs[k]);
                k += 1;
            }
        }
        Ok(())
    }

    /// Checks membership in the collision-free set.
    pub fn check_domain(&self, q: &DVector<f64>) -> Result<()> {
        self.for_each_pair(q, |_, _, _, _, _| {})
    }

    pub fn potential(&self, q: &Configuration) -> Result<f64> {
        self.potential_at(q.coords())
    }

    pub fn potential_at(&self, q: &DVector<f64>) -> Result<f64> {
        let mut u = 0.0;
        self.for_each_pair(q, |_, _, _, r, p| u += p.eval(r).0)?;
        Ok(u)
    }

    pub fn gradient(&self, q: &Configuration) -> Result<DVector<f64>> {
        self.gradient_at(q.coords())
    }

    /// `dU/dq_i = sum_{j != i} f'(r_ij)/r_ij (q_i - q_j)`.
    pub fn gradient_at(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        let mut g = DVector::zeros(q.len());
        self.for_each_pair(q, |i, j, d, r, p| {
            let s = p.eval(r).1 / r;
            g[2 * i] += s * d.x;
            g[2 * i + 1] += s * d.y;
            g[2 * j] -= s * d.x;
            g[2 * j + 1] -= s * d.y;
        })?;
        Ok(g)
    }

    pub fn hessian(&self, q: &Configuration) -> Result<DMatrix<f64>> {
        self.hessian_at(q.coords())
    }

    /// Pair blocks `f'' u u^T + (f'/r)(I - u u^T)` with `u = (q_i - q_j)/r`.
    pub fn hessian_at(&self, q: &DVector<f64>) -> Result<DMatrix<f64>> {
        let dim = q.len();
        let mut h = DMatrix::zeros(dim, dim);
        self.for_each_pair(q, |i, j, d, r, p| {
            let (_, f1, f2) = p.eval(r);
            let u = d / r;
            let uu = u * u.transpose();
            let block: Matrix2<f64> = uu * f2 + (Matrix2::identity() - uu) * (f1 / r);
            for (a, b, sign) in [(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)] {
                for x in 0..2 {
                    for y in 0..2 {
                        h[(2 * a + x, 2 * b + y)] += sign * block[(x, y)];
                    }
                }
            }
        })?;
        Ok(h)
    }
}
