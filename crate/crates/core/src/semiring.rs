//! Semirings used for check-node marginalization.
//!
//! The trellis engine is written once against [`Semiring`] and instantiated
//! with the sum-product semiring `(+, ×, 0, 1)` for finite kappa and the
//! min-sum semiring `(min, +, +∞, 0)` for kappa = ∞. [`LogSumProduct`] is the
//! sum-product semiring carried in the log domain; it never underflows and
//! is used as a fallback by the decoders.
//!
//! Every marginal the engine produces is a "scaled" value: the semiring
//! element `value` together with an accumulated `offset` (natural-log scale
//! for the sum-product instances, always zero for min-sum). Conversion back
//! to cost units yields `C = -softmin_kappa(path costs)`.

use crate::ring::Kappa;

/// A semiring element with its accumulated rescaling offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub offset: f64,
}

impl Scaled {
    pub fn new(value: f64, offset: f64) -> Self {
        Scaled { value, offset }
    }
}

pub trait Semiring: Copy + std::fmt::Debug + Send + Sync {
    /// Identity of `combine`.
    fn zero(&self) -> f64;
    /// Identity of `extend`.
    fn one(&self) -> f64;
    fn combine(&self, a: f64, b: f64) -> f64;
    fn extend(&self, a: f64, b: f64) -> f64;

    /// Branch weights for one trellis section. `costs[b]` is the cost of
    /// symbol `b` (with `costs[0] == 0`). Returns the offset such that the
    /// true weight of `b` is `out[b]` lifted by that offset.
    fn weights(&self, costs: &[f64], out: &mut [f64]) -> f64;

    /// Rescale a row of state metrics in place and return the offset removed.
    fn normalize(&self, row: &mut [f64]) -> f64;

    /// Marginal in cost units, `-softmin(path costs)`.
    fn to_cost(&self, m: Scaled) -> f64;

    /// `to_cost(a) - to_cost(b)`, evaluated as a ratio where the semiring
    /// allows it.
    fn cost_difference(&self, a: Scaled, b: Scaled) -> f64;

    /// True when a stored value has lost its precision (underflow in the
    /// linear sum-product domain). Never true for the other instances.
    fn is_degenerate(&self, _value: f64) -> bool {
        false
    }

    /// False for NaN and for values outside the semiring's carrier set.
    fn is_valid(&self, value: f64) -> bool;

    fn name(&self) -> &'static str;
}

/// Linear-domain values below this are treated as lost: contributions that
/// underflowed to zero may no longer be negligible next to them.
pub const DEGENERATE_BELOW: f64 = 1e-280;

/// Linear-domain sum-product semiring with soft-min sharpness `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumProduct {
    pub kappa: f64,
}

/// Min-sum semiring; the kappa → ∞ limit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinSum;

/// Sum-product semiring over log-weights: `combine` is log-add-exp and
/// `extend` is addition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumProduct {
    pub kappa: f64,
}

impl Semiring for SumProduct {
    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    #[inline]
    fn combine(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn extend(&self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn weights(&self, costs: &[f64], out: &mut [f64]) -> f64 {
        // max-shift so that every weight lies in (0, 1]
        let shift = costs
            .iter()
            .map(|&c| -self.kappa * c)
            .fold(f64::NEG_INFINITY, f64::max);
        for (o, &c) in out.iter_mut().zip(costs) {
            *o = (-self.kappa * c - shift).exp();
        }
        shift
    }

    fn normalize(&self, row: &mut [f64]) -> f64 {
        let total: f64 = row.iter().sum();
        if total > 0.0 && total.is_finite() {
            row.iter_mut().for_each(|x| *x /= total);
            total.ln()
        } else {
            0.0
        }
    }

    fn to_cost(&self, m: Scaled) -> f64 {
        (m.value.ln() + m.offset) / self.kappa
    }

    fn cost_difference(&self, a: Scaled, b: Scaled) -> f64 {
        ((a.value / b.value).ln() + (a.offset - b.offset)) / self.kappa
    }

    fn is_degenerate(&self, value: f64) -> bool {
        !(value >= DEGENERATE_BELOW && value.is_finite())
    }

    fn is_valid(&self, value: f64) -> bool {
        value >= 0.0 && value.is_finite()
    }

    fn name(&self) -> &'static str {
        "sum-product"
    }
}

impl Semiring for MinSum {
    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    #[inline]
    fn combine(&self, a: f64, b: f64) -> f64 {
        a.min(b)
    }

    #[inline]
    fn extend(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    fn weights(&self, costs: &[f64], out: &mut [f64]) -> f64 {
        out.copy_from_slice(costs);
        0.0
    }

    fn normalize(&self, _row: &mut [f64]) -> f64 {
        0.0
    }

    fn to_cost(&self, m: Scaled) -> f64 {
        -(m.value + m.offset)
    }

    fn cost_difference(&self, a: Scaled, b: Scaled) -> f64 {
        (b.value - a.value) + (b.offset - a.offset)
    }

    fn is_valid(&self, value: f64) -> bool {
        !value.is_nan() && value != f64::NEG_INFINITY
    }

    fn name(&self) -> &'static str {
        "min-sum"
    }
}

impl Semiring for LogSumProduct {
    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    #[inline]
    fn combine(&self, a: f64, b: f64) -> f64 {
        log_add_exp(a, b)
    }

    #[inline]
    fn extend(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    fn weights(&self, costs: &[f64], out: &mut [f64]) -> f64 {
        for (o, &c) in out.iter_mut().zip(costs) {
            *o = -self.kappa * c;
        }
        0.0
    }

    fn normalize(&self, row: &mut [f64]) -> f64 {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            row.iter_mut().for_each(|x| *x -= m);
            m
        } else {
            0.0
        }
    }

    fn to_cost(&self, m: Scaled) -> f64 {
        (m.value + m.offset) / self.kappa
    }

    fn cost_difference(&self, a: Scaled, b: Scaled) -> f64 {
        ((a.value - b.value) + (a.offset - b.offset)) / self.kappa
    }

    fn is_valid(&self, value: f64) -> bool {
        !value.is_nan() && value != f64::INFINITY
    }

    fn name(&self) -> &'static str {
        "log-sum-product"
    }
}

#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// The semiring a given kappa selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiringKind {
    SumProduct(SumProduct),
    MinSum(MinSum),
}

impl SemiringKind {
    pub fn for_kappa(kappa: Kappa) -> Self {
        match kappa {
            Kappa::Finite(k) => SemiringKind::SumProduct(SumProduct { kappa: k }),
            Kappa::Infinite => SemiringKind::MinSum(MinSum),
        }
    }
}
