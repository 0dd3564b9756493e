//! Randomized cross-checks of the trellis marginals against brute-force
//! enumeration, shared by the `oracle-selftest` command and the test suites.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::SpcCode;
use crate::oracle::{brute_all_marginals, OracleError};
use crate::ring::{Kappa, Zq};
use crate::trellis::{all_marginals_for_kappa, NotAlphaForm, TrellisError};

#[derive(Debug, thiserror::Error)]
pub enum SelftestError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Trellis(#[from] TrellisError),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Ring(#[from] crate::ring::RingError),
}

#[derive(Debug, Clone)]
pub struct EquivalenceParams {
    pub alphabets: Vec<usize>,
    pub degrees: RangeInclusive<usize>,
    /// Random cost sets per `(q, degree)` pair.
    pub sets: usize,
    /// Finite kappas; kappa = ∞ (min-sum) is always checked as well.
    pub kappas: Vec<f64>,
    /// Costs are drawn uniformly from `[-cost_range, cost_range]`.
    pub cost_range: f64,
    pub seed: u64,
}

impl Default for EquivalenceParams {
    fn default() -> Self {
        EquivalenceParams {
            alphabets: vec![2, 4, 8],
            degrees: 2..=8,
            sets: 200,
            kappas: vec![0.1, 1.0, 10.0],
            cost_range: 4.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EquivalenceReport {
    pub instances: usize,
    pub comparisons: usize,
    /// Largest relative error of a sum-product marginal, measured on the
    /// semiring value `exp(κ C)`.
    pub max_sum_product_rel: f64,
    /// Largest absolute error of a min-sum marginal.
    pub max_min_sum_abs: f64,
    /// Comparisons where exactly one side was infeasible.
    pub infeasibility_mismatches: usize,
}

impl EquivalenceReport {
    pub fn passes(&self, sum_product_rel: f64, min_sum_abs: f64) -> bool {
        self.infeasibility_mismatches == 0
            && self.max_sum_product_rel <= sum_product_rel
            && self.max_min_sum_abs <= min_sum_abs
    }

    fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.comparisons += other.comparisons;
        self.max_sum_product_rel = self.max_sum_product_rel.max(other.max_sum_product_rel);
        self.max_min_sum_abs = self.max_min_sum_abs.max(other.max_min_sum_abs);
        self.infeasibility_mismatches += other.infeasibility_mismatches;
        self
    }
}

/// Relative error of `exp(κ a)` against `exp(κ b)`. `None` when only one
/// side is infeasible.
pub fn relative_semiring_error(a: f64, b: f64, kappa: f64) -> Option<f64> {
    match (a == f64::NEG_INFINITY, b == f64::NEG_INFINITY) {
        (true, true) => Some(0.0),
        (false, false) => Some((kappa * (a - b)).exp_m1().abs()),
        _ => None,
    }
}

/// Absolute error with `-∞ == -∞`.
pub fn absolute_error(a: f64, b: f64) -> Option<f64> {
    match (a == f64::NEG_INFINITY, b == f64::NEG_INFINITY) {
        (true, true) => Some(0.0),
        (false, false) => Some((a - b).abs()),
        _ => None,
    }
}

/// A local code of degree `d` with coefficients drawn from all nonzero
/// residues, zero-divisors included, plus a random cost vector.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    q: usize,
    d: usize,
    cost_range: f64,
) -> Result<(SpcCode, Vec<f64>), SelftestError> {
    let coefficients = (0..d).map(|_| rng.random_range(1..q)).collect();
    let code = SpcCode::from_coefficients(Zq::new(q)?, coefficients)?;
    let costs = (0..d * (q - 1))
        .map(|_| rng.random_range(-cost_range..=cost_range))
        .collect();
    Ok((code, costs))
}

fn check_instance(
    code: &SpcCode,
    costs: &[f64],
    kappas: &[f64],
) -> Result<EquivalenceReport, SelftestError> {
    let mut all: Vec<Kappa> = kappas.iter().map(|&k| Kappa::Finite(k)).collect();
    all.push(Kappa::Infinite);
    let brute = brute_all_marginals(code, costs, &all)?;
    let mut report = EquivalenceReport {
        instances: 1,
        ..Default::default()
    };
    let (q, d) = (code.q(), code.degree());
    for (kappa, reference) in all.iter().zip(&brute) {
        let trellis = all_marginals_for_kappa(code, costs, *kappa, NotAlphaForm::Branch)?;
        for i in 0..d {
            for alpha in 1..q {
                let pairs = [
                    (trellis.c_alpha(i, alpha), reference.c_alpha(i, alpha)),
                    (trellis.c_not_alpha(i, alpha), reference.c_not_alpha(i, alpha)),
                ];
                for (got, want) in pairs {
                    report.comparisons += 1;
                    let err = match kappa {
                        Kappa::Finite(k) => relative_semiring_error(got, want, *k),
                        Kappa::Infinite => absolute_error(got, want),
                    };
                    match (err, kappa) {
                        (None, _) => report.infeasibility_mismatches += 1,
                        (Some(e), Kappa::Finite(_)) => {
                            report.max_sum_product_rel = report.max_sum_product_rel.max(e)
                        }
                        (Some(e), Kappa::Infinite) => report.max_min_sum_abs = report.max_min_sum_abs.max(e),
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Compare trellis and enumeration marginals over random local codes. Each
/// `(q, degree)` pair gets its own seeded stream, so the result does not
/// depend on scheduling.
pub fn trellis_oracle_equivalence(params: &EquivalenceParams) -> Result<EquivalenceReport, SelftestError> {
    let cells: Vec<(usize, usize)> = params
        .alphabets
        .iter()
        .flat_map(|&q| params.degrees.clone().map(move |d| (q, d)))
        .collect();
    cells
        .par_iter()
        .map(|&(q, d)| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ ((q as u64) << 32 | d as u64));
            let mut report = EquivalenceReport::default();
            for _ in 0..params.sets {
                let (code, costs) = random_instance(&mut rng, q, d, params.cost_range)?;
                report = report.merge(check_instance(&code, &costs, &params.kappas)?);
            }
            Ok(report)
        })
        .try_reduce(EquivalenceReport::default, |a, b| Ok(a.merge(b)))
}
