//! Arithmetic over the integer ring Z_q, the indicator embedding of ring
//! symbols into {0,1}^(q-1), and the soft-minimum operator.
//!
//! Nonzero ring elements are always indexed in ascending residue order
//! `1, 2, ..., q-1`. A vector "indexed by the nonzero elements" therefore has
//! length `q - 1` and entry `k` belongs to element `k + 1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("soft-min of an empty set")]
    EmptySoftMin,
    #[error("invalid kappa: {0}")]
    BadKappa(String),
}

/// The ring Z_q. Symbols handled by the decoders are plain `usize` residues
/// interpreted through this context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zq {
    q: usize,
}

impl Zq {
    pub fn new(q: usize) -> Result<Self, RingError> {
        if q < 2 || q > u32::MAX as usize {
            return Err(RingError::BadModulus(q as u32));
        }
        Ok(Zq { q })
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        (self.q - a) % self.q
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        (a * b) % self.q
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: usize) -> Option<usize> {
        (1..self.q).find(|&x| self.mul(a, x) == 1)
    }

    pub fn is_unit(&self, a: usize) -> bool {
        gcd(a % self.q, self.q) == 1
    }

    pub fn element(&self, value: usize) -> RingElement {
        RingElement {
            value: (value % self.q) as u32,
            modulus: self.q as u32,
        }
    }

    /// All ring elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.q).map(move |v| self.element(v))
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An element of Z_q carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    value: u32,
    modulus: u32,
}

impl RingElement {
    pub fn new(value: u32, modulus: u32) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::BadModulus(modulus));
        }
        Ok(RingElement {
            value: value % modulus,
            modulus,
        })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<u64, RingError> {
        if self.modulus != other.modulus {
            return Err(RingError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.modulus as u64)
    }

    // checked: the operator traits cannot report a modulus mismatch
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Self) -> Result<Self, RingError> {
        let q = self.check(&rhs)?;
        Ok(RingElement {
            value: ((self.value as u64 + rhs.value as u64) % q) as u32,
            modulus: self.modulus,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Result<Self, RingError> {
        let q = self.check(&rhs)?;
        Ok(RingElement {
            value: ((self.value as u64 * rhs.value as u64) % q) as u32,
            modulus: self.modulus,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        RingElement {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The image of a ring element under the indicator embedding: a 0/1 vector
/// indexed by the nonzero elements, with at most one entry set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorVector {
    bits: Vec<u8>,
}

impl IndicatorVector {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Inner product with a real vector indexed by the nonzero elements.
    pub fn dot(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.bits.len());
        self.bits
            .iter()
            .zip(w)
            .filter(|(&b, _)| b == 1)
            .map(|(_, &x)| x)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}

/// Indicator embedding: entry `rho` is 1 iff `rho == alpha`; zero maps to the
/// all-zero vector.
pub fn xi(alpha: RingElement) -> IndicatorVector {
    let q = alpha.modulus as usize;
    let mut bits = vec![0u8; q - 1];
    if alpha.value != 0 {
        bits[alpha.value as usize - 1] = 1;
    }
    IndicatorVector { bits }
}

/// Position-wise indicator embedding of a word.
pub fn big_xi(word: &[RingElement]) -> Vec<IndicatorVector> {
    word.iter().copied().map(xi).collect()
}

/// The soft-min sharpness parameter. `Infinite` selects the plain minimum
/// (and min-sum marginalization) rather than a very large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    pub fn finite(k: f64) -> Result<Self, RingError> {
        if k.is_finite() && k > 0.0 {
            Ok(Kappa::Finite(k))
        } else {
            Err(RingError::BadKappa(k.to_string()))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Kappa::Infinite)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Finite(k) => write!(f, "{k}"),
            Kappa::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Kappa {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Kappa::Infinite);
        }
        let k: f64 = t.parse().map_err(|_| RingError::BadKappa(s.to_string()))?;
        if k == f64::INFINITY {
            return Ok(Kappa::Infinite);
        }
        Kappa::finite(k)
    }
}

/// Soft minimum `-(1/kappa) log sum_l exp(-kappa z_l)`, evaluated with the
/// minimum factored out. With `Kappa::Infinite` this is the plain minimum.
pub fn soft_min(values: &[f64], kappa: Kappa) -> Result<f64, RingError> {
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        return Err(RingError::EmptySoftMin);
    }
    match kappa {
        Kappa::Infinite => Ok(m),
        Kappa::Finite(k) => {
            if m == f64::INFINITY {
                return Ok(m);
            }
            let s: f64 = values.iter().map(|&z| (-k * (z - m)).exp()).sum();
            Ok(m - s.ln() / k)
        }
    }
}
