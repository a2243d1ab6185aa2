//! Weight systems, hypersurface families and monomials.
//!
//! A [`WeightSystem`] is the ambient `P(a_0, ..., a_n)` with its weights in
//! ascending order. A [`HypersurfaceFamily`] adds a degree `d`; the general
//! member of `|O(d)|` is what every other module reasons about.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ascending list of positive weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSystem {
    weights: Vec<u64>,
}

/// gcd of an iterator of weights, `0` for an empty iterator.
pub fn gcd_all<I: IntoIterator<Item = u64>>(it: I) -> u64 {
    it.into_iter().fold(0, |g, a| g.gcd(&a))
}

/// First index `i` (in the given order) such that the weights other than
/// `weights[i]` share a common factor, together with that factor.
pub fn well_formedness_defect(weights: &[u64]) -> Option<(usize, u64)> {
    if weights.len() < 2 {
        return None;
    }
    // prefix[i] = gcd(w[..i]), suffix[i] = gcd(w[i..])
    let n = weights.len();
    let mut prefix = vec![0u64; n + 1];
    let mut suffix = vec![0u64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i].gcd(&weights[i]);
        suffix[n - 1 - i] = suffix[n - i].gcd(&weights[n - 1 - i]);
    }
    (0..n).find_map(|i| {
        let g = prefix[i].gcd(&suffix[i + 1]);
        (g > 1).then_some((i, g))
    })
}

impl WeightSystem {
    /// Sorts the weights ascending and rejects systems that are not
    /// well-formed (some `n` of the `n + 1` weights share a factor).
    pub fn canonicalize(raw: &[u64]) -> Result<Self> {
        let ws = Self::sorted(raw)?;
        if let Some((index, gcd)) = well_formedness_defect(&ws.weights) {
            return Err(Error::NotWellFormed { index, gcd });
        }
        Ok(ws)
    }

    /// Sorts without the well-formedness requirement. Used for auxiliary
    /// ambient spaces (e.g. the base `P(b_1, b_2, b_3)` of a series).
    pub fn sorted(raw: &[u64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyWeights);
        }
        if raw.contains(&0) {
            return Err(Error::NonPositiveWeight);
        }
        let mut weights = raw.to_vec();
        weights.sort_unstable();
        Ok(WeightSystem { weights })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn is_well_formed(&self) -> bool {
        well_formedness_defect(&self.weights).is_none()
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Relation between the degree and the weight sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `d = sum - 1`, anticanonically embedded Fano.
    Fano,
    /// `d = sum`, trivial canonical class.
    #[serde(rename = "cy")]
    CalabiYau,
    /// `d = sum + k` with `k > 0`.
    GeneralType,
    /// Anything else (`d < sum - 1`).
    Other,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Fano => "fano",
            FamilyKind::CalabiYau => "cy",
            FamilyKind::GeneralType => "general_type",
            FamilyKind::Other => "other",
        }
    }
}

/// A weight system together with the degree of the hypersurface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypersurfaceFamily {
    pub ws: WeightSystem,
    pub degree: u64,
}

impl HypersurfaceFamily {
    pub fn new(ws: WeightSystem, degree: u64) -> Self {
        HypersurfaceFamily { ws, degree }
    }

    /// Anticanonically embedded: `d = sum(a) - 1`.
    pub fn fano(ws: WeightSystem) -> Self {
        let degree = ws.sum() - 1;
        HypersurfaceFamily { ws, degree }
    }

    /// Trivial canonical class: `d = sum(a)`.
    pub fn calabi_yau(ws: WeightSystem) -> Self {
        let degree = ws.sum();
        HypersurfaceFamily { ws, degree }
    }

    pub fn weights(&self) -> &[u64] {
        self.ws.weights()
    }

    pub fn dim(&self) -> usize {
        self.ws.dim()
    }

    pub fn kind(&self) -> FamilyKind {
        let s = self.ws.sum();
        match self.degree.cmp(&s) {
            std::cmp::Ordering::Equal => FamilyKind::CalabiYau,
            std::cmp::Ordering::Greater => FamilyKind::GeneralType,
            std::cmp::Ordering::Less if self.degree + 1 == s => FamilyKind::Fano,
            std::cmp::Ordering::Less => FamilyKind::Other,
        }
    }
}

impl fmt::Display for HypersurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{} in P{}", self.degree, self.ws)
    }
}

/// Exponent vector `b_0, ..., b_n` of `x_0^{b_0} ... x_n^{b_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    pub exponents: Vec<u64>,
}

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Self {
        Monomial { exponents }
    }

    pub fn one(len: usize) -> Self {
        Monomial {
            exponents: vec![0; len],
        }
    }

    /// `x_i^m x_j` (which is `x_i^{m+1}` when `i == j`).
    pub fn vertex(len: usize, i: usize, m: u64, j: usize) -> Self {
        let mut exponents = vec![0; len];
        exponents[i] += m;
        exponents[j] += 1;
        Monomial { exponents }
    }

    /// Weighted degree `sum b_i a_i`; overflow is an error, never a wrap.
    pub fn degree(&self, ws: &WeightSystem) -> Result<u64> {
        degree(self, ws)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.exponents.len())
            .filter(|&i| self.exponents[i] > 0)
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &b) in self.exponents.iter().enumerate() {
            if b == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if b == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{b}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Weighted degree of `m` against `ws`.
pub fn degree(m: &Monomial, ws: &WeightSystem) -> Result<u64> {
    if m.exponents.len() != ws.len() {
        return Err(Error::LengthMismatch {
            expected: ws.len(),
            got: m.exponents.len(),
        });
    }
    m.exponents
        .iter()
        .zip(ws.weights())
        .try_fold(0u64, |acc, (&b, &a)| {
            b.checked_mul(a).and_then(|t| acc.checked_add(t))
        })
        .ok_or(Error::Overflow("monomial degree"))
}
