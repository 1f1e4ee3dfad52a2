//! Exact arithmetic in the Euler ring `U(S^1)`.
//!
//! `U(S^1)` is the free abelian group on the unit `I = chi(S^1/S^1+)` and the
//! generators `X(m) = chi(S^1/Z_m+)`, `m >= 1`. The product has `I` as unit
//! and kills every product of two generators:
//!
//! ```text
//! X(m) * X(m') = 0          for all m, m' >= 1
//! ```
//!
//! With this rule `(I - sum k_i X(m_i)) * (I + sum k_i X(m_i)) = I`, which is
//! the inverse formula for sphere characteristics. The rule is the one stated
//! for `U(S^1)` in the literature on S^1-equivariant degree theory and is
//! taken here as an assumption rather than derived.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct EulerRingElement {
    unit: i64,
    generators: BTreeMap<u32, i64>,
}

impl EulerRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_unit(1)
    }

    pub fn from_unit(c: i64) -> Self {
        Self {
            unit: c,
            generators: BTreeMap::new(),
        }
    }

    /// `c * X(m)`.
    pub fn generator(m: u32, c: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("generator weight must be >= 1".into()));
        }
        let mut g = BTreeMap::new();
        if c != 0 {
            g.insert(m, c);
        }
        Ok(Self {
            unit: 0,
            generators: g,
        })
    }

    pub fn unit_coeff(&self) -> i64 {
        self.unit
    }

    pub fn generator_coeff(&self, m: u32) -> i64 {
        self.generators.get(&m).copied().unwrap_or(0)
    }

    /// Nonzero generator coefficients in ascending weight.
    pub fn generators(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.generators.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0 && self.generators.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let unit = self.unit.checked_add(other.unit).ok_or(Error::Overflow)?;
        let mut generators = self.generators.clone();
        for (&m, &c) in &other.generators {
            let e = generators.entry(m).or_insert(0);
            *e = e.checked_add(c).ok_or(Error::Overflow)?;
            if *e == 0 {
                generators.remove(&m);
            }
        }
        Ok(Self { unit, generators })
    }

    pub fn neg(&self) -> Result<Self> {
        let unit = self.unit.checked_neg().ok_or(Error::Overflow)?;
        let generators = self
            .generators
            .iter()
            .map(|(&m, &c)| c.checked_neg().map(|c| (m, c)).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self { unit, generators })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    /// `(a I + sum a_m X(m)) (b I + sum b_m X(m)) = ab I + sum (a b_m + b a_m) X(m)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let unit = self.unit.checked_mul(other.unit).ok_or(Error::Overflow)?;
        let mut out = Self::from_unit(unit);
        for (&m, &c) in &other.generators {
            let c = self.unit.checked_mul(c).ok_or(Error::Overflow)?;
            out = out.add(&Self::generator(m, c)?)?;
        }
        for (&m, &c) in &self.generators {
            let c = other.unit.checked_mul(c).ok_or(Error::Overflow)?;
            out = out.add(&Self::generator(m, c)?)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: i64) -> Result<Self> {
        self.mul(&Self::from_unit(s))
    }

    /// The units are exactly `e I + g` with `e = +-1`; their inverse is `e I - g`.
    pub fn inverse(&self) -> Option<Self> {
        match self.unit {
            1 | -1 => {
                let e = self.unit;
                let generators = self.generators.iter().map(|(&m, &c)| (m, -c)).collect();
                Some(Self { unit: e, generators })
            }
            _ => None,
        }
    }
}

pub fn ring_add(a: &EulerRingElement, b: &EulerRingElement) -> Result<EulerRingElement> {
    a.add(b)
}

pub fn ring_mul(a: &EulerRingElement, b: &EulerRingElement) -> Result<EulerRingElement> {
    a.mul(b)
}

pub fn ring_neg(a: &EulerRingElement) -> Result<EulerRingElement> {
    a.neg()
}

impl fmt::Display for EulerRingElement {
    /// Canonical form, e.g. `I - 2·X(1) - X(3)`; zero prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: i64, name: String| -> fmt::Result {
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            if mag == 1 {
                f.write_str(&name)
            } else {
                write!(f, "{mag}·{name}")
            }
        };
        if self.unit != 0 {
            term(f, self.unit, "I".into())?;
        }
        for (&m, &c) in &self.generators {
            term(f, c, format!("X({m})"))?;
        }
        Ok(())
    }
}

impl From<EulerRingElement> for String {
    fn from(e: EulerRingElement) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for EulerRingElement {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for EulerRingElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::expr::evaluate(s)
    }
}

/// `R[k0, 0] + R[k_1, m_1] + ... + R[k_r, m_r]` with `m_1 < ... < m_r`.
///
/// `k0` is the real dimension of the trivial summand; `k_i` counts complex
/// lines on which `S^1` acts with weight `m_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct S1RepDecomposition {
    pub k0: u32,
    pub terms: Vec<(u32, u32)>,
}

impl S1RepDecomposition {
    /// Validates `terms = [(k_i, m_i)]`: every `k_i, m_i >= 1`, weights strictly increasing.
    pub fn new(k0: u32, terms: Vec<(u32, u32)>) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::InvalidArgument(format!(
                    "weights must be strictly increasing, got {} then {}",
                    w[0].1, w[1].1
                )));
            }
        }
        if let Some(&(k, m)) = terms.iter().find(|(k, m)| *k == 0 || *m == 0) {
            return Err(Error::InvalidArgument(format!(
                "term R[{k},{m}] needs positive multiplicity and weight"
            )));
        }
        Ok(Self { k0, terms })
    }

    /// Builds a decomposition from unsorted `(k, m)` pieces, merging equal
    /// weights; `m = 0` pieces add to `k0` and `k = 0` pieces are dropped.
    pub fn from_pieces(pieces: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut k0 = 0;
        let mut by_weight: BTreeMap<u32, u32> = BTreeMap::new();
        for (k, m) in pieces {
            if m == 0 {
                k0 += k;
            } else if k > 0 {
                *by_weight.entry(m).or_insert(0) += k;
            }
        }
        Self {
            k0,
            terms: by_weight.into_iter().map(|(m, k)| (k, m)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let pieces = self
            .terms
            .iter()
            .chain(&other.terms)
            .copied()
            .chain([(self.k0 + other.k0, 0)]);
        Self::from_pieces(pieces)
    }

    /// Complex dimension of the nontrivial part.
    pub fn complex_dim(&self) -> u32 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub fn multiplicity_of(&self, m: u32) -> u32 {
        self.terms.iter().find(|t| t.1 == m).map_or(0, |t| t.0)
    }
}

impl fmt::Display for S1RepDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{};", self.k0)?;
        for (i, (k, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({k},{m})")?;
        }
        f.write_str("]")
    }
}

/// `chi(S^V) = (-1)^k0 (I - sum k_i X(m_i))`.
pub fn sphere_characteristic(rep: &S1RepDecomposition) -> Result<EulerRingElement> {
    let mut e = EulerRingElement::one();
    for &(k, m) in &rep.terms {
        e = e.sub(&EulerRingElement::generator(m, i64::from(k))?)?;
    }
    if rep.k0 % 2 == 1 {
        e = e.neg()?;
    }
    Ok(e)
}

/// `(-1)^k0 (I + sum k_i X(m_i))`, the inverse of [`sphere_characteristic`].
pub fn sphere_characteristic_inverse(rep: &S1RepDecomposition) -> Result<EulerRingElement> {
    let mut e = EulerRingElement::one();
    for &(k, m) in &rep.terms {
        e = e.add(&EulerRingElement::generator(m, i64::from(k))?)?;
    }
    if rep.k0 % 2 == 1 {
        e = e.neg()?;
    }
    Ok(e)
}
