//! Brute-force references by direct codeword enumeration.
//!
//! Nothing here touches the trellis engine or the semiring abstraction:
//! marginals are sums (or maxima) over explicitly listed codewords. Costs are
//! the check-side dual vectors `v̂_{j,t}` laid out as in
//! [`crate::trellis::build_branch_metrics`]: `d` rows of `q - 1` entries, and
//! `v̂^{(0)} = 0`.

use thiserror::Error;

use crate::code::{CodeError, SpcCode, TannerGraph};
use crate::ring::Kappa;

/// Largest number of enumerated prefixes allowed per local code.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// Largest `q^n` accepted by [`brute_best_codeword`].
pub const WORD_GUARD: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration of {size} candidates exceeds the guard of {guard}")]
    GuardExceeded { size: u64, guard: u64 },
    #[error("degree {degree} above the limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },
    #[error("q = {q} above the limit {limit}")]
    AlphabetLimit { q: usize, limit: usize },
    #[error("alpha must be a nonzero symbol below q, got {0}")]
    BadAlpha(usize),
    #[error("position {position} out of range for degree {degree}")]
    BadPosition { position: usize, degree: usize },
    #[error("cost vector has length {got}, expected {expected}")]
    CostLength { expected: usize, got: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_row_degree: usize,
    pub max_q: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_row_degree: 10,
            max_q: 8,
        }
    }
}

impl OracleLimits {
    pub fn check(&self, code: &SpcCode) -> Result<(), OracleError> {
        let (q, d) = (code.q(), code.degree());
        if d > self.max_row_degree {
            return Err(OracleError::DegreeLimit {
                degree: d,
                limit: self.max_row_degree,
            });
        }
        if q > self.max_q {
            return Err(OracleError::AlphabetLimit { q, limit: self.max_q });
        }
        let size = (q as u64).saturating_pow(d.saturating_sub(1) as u32);
        if size > ENUMERATION_GUARD {
            return Err(OracleError::GuardExceeded {
                size,
                guard: ENUMERATION_GUARD,
            });
        }
        Ok(())
    }
}

fn check_inputs(code: &SpcCode, costs: &[f64], i: usize, alpha: usize) -> Result<(), OracleError> {
    let (q, d) = (code.q(), code.degree());
    OracleLimits::default().check(code)?;
    if costs.len() != d * (q - 1) {
        return Err(OracleError::CostLength {
            expected: d * (q - 1),
            got: costs.len(),
        });
    }
    if i >= d {
        return Err(OracleError::BadPosition { position: i, degree: d });
    }
    if alpha == 0 || alpha >= q {
        return Err(OracleError::BadAlpha(alpha));
    }
    Ok(())
}

fn coordinate(costs: &[f64], q: usize, t: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        costs[t * (q - 1) + b - 1]
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn aggregate(values: &[f64], kappa: Kappa) -> f64 {
    match kappa {
        Kappa::Infinite => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Kappa::Finite(k) => {
            let scaled: Vec<f64> = values.iter().map(|v| k * v).collect();
            log_sum_exp(&scaled) / k
        }
    }
}

/// `C_{j,ᾱ}`: `(1/κ) log Σ_{b ∈ C_j, b_i ≠ α} exp(κ ⟨v̂, Ξ(b)⟩)`, or the
/// maximum of the inner product for κ = ∞.
pub fn brute_marginal_not_alpha(
    code: &SpcCode,
    costs: &[f64],
    i: usize,
    alpha: usize,
    kappa: Kappa,
) -> Result<f64, OracleError> {
    check_inputs(code, costs, i, alpha)?;
    let q = code.q();
    let values: Vec<f64> = code
        .codewords()?
        .filter(|b| b[i] != alpha)
        .map(|b| (0..b.len()).map(|t| coordinate(costs, q, t, b[t])).sum())
        .collect();
    Ok(aggregate(&values, kappa))
}

/// `C_{j,α}`: as [`brute_marginal_not_alpha`] over codewords with
/// `b_i = α`, with position `i` left out of the inner product.
pub fn brute_marginal_alpha(
    code: &SpcCode,
    costs: &[f64],
    i: usize,
    alpha: usize,
    kappa: Kappa,
) -> Result<f64, OracleError> {
    check_inputs(code, costs, i, alpha)?;
    let q = code.q();
    let values: Vec<f64> = code
        .codewords()?
        .filter(|b| b[i] == alpha)
        .map(|b| {
            (0..b.len())
                .filter(|&t| t != i)
                .map(|t| coordinate(costs, q, t, b[t]))
                .sum()
        })
        .collect();
    Ok(aggregate(&values, kappa))
}

/// All marginal pairs of one local code for one kappa.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteMarginals {
    pub kappa: Kappa,
    q: usize,
    c_alpha: Vec<f64>,
    c_not_alpha: Vec<f64>,
}

impl BruteMarginals {
    pub fn c_alpha(&self, i: usize, alpha: usize) -> f64 {
        self.c_alpha[i * (self.q - 1) + alpha - 1]
    }

    pub fn c_not_alpha(&self, i: usize, alpha: usize) -> f64 {
        self.c_not_alpha[i * (self.q - 1) + alpha - 1]
    }
}

struct Walk<'a> {
    q: usize,
    d: usize,
    h: &'a [usize],
    zq: crate::ring::Zq,
    last_inv: Option<usize>,
    costs: &'a [f64],
    // exp(κ v̂_t(b) - shift_t) per finite kappa, flattened [k][t][b]
    factors: Vec<f64>,
    finite: usize,
    word: Vec<usize>,
    sums: Vec<f64>,
    prods: Vec<f64>,
    best: Vec<f64>,
    mass: Vec<f64>,
}

impl Walk<'_> {
    fn descend(&mut self, t: usize, syndrome: usize) {
        if t + 1 == self.d {
            match self.last_inv {
                Some(inv) => {
                    let b = self.zq.mul(self.zq.neg(syndrome), inv);
                    self.leaf(b);
                }
                None => {
                    for b in 0..self.q {
                        if self.zq.add(syndrome, self.zq.mul(b, self.h[t])) == 0 {
                            self.leaf(b);
                        }
                    }
                }
            }
            return;
        }
        for b in 0..self.q {
            self.step(t, b);
            self.descend(t + 1, self.zq.add(syndrome, self.zq.mul(b, self.h[t])));
        }
    }

    fn step(&mut self, t: usize, b: usize) {
        let (q, d) = (self.q, self.d);
        self.word[t] = b;
        self.sums[t + 1] = self.sums[t] + coordinate(self.costs, q, t, b);
        for k in 0..self.finite {
            let base = k * (d + 1);
            self.prods[base + t + 1] = self.prods[base + t] * self.factors[(k * d + t) * q + b];
        }
    }

    fn leaf(&mut self, b: usize) {
        let (q, d) = (self.q, self.d);
        self.step(d - 1, b);
        let total = self.sums[d];
        for i in 0..d {
            let slot = i * q + self.word[i];
            if total > self.best[slot] {
                self.best[slot] = total;
            }
        }
        for k in 0..self.finite {
            let w = self.prods[k * (d + 1) + d];
            let bins = &mut self.mass[k * d * q..(k + 1) * d * q];
            for i in 0..d {
                bins[i * q + self.word[i]] += w;
            }
        }
    }
}

/// Every `(C_{j,α}, C_{j,ᾱ})` pair for each requested kappa from a single
/// enumeration of the local code. Codewords are visited depth first over the
/// first `d - 1` symbols; the last symbol is solved when its coefficient is a
/// unit and filtered otherwise.
pub fn brute_all_marginals(
    code: &SpcCode,
    costs: &[f64],
    kappas: &[Kappa],
) -> Result<Vec<BruteMarginals>, OracleError> {
    let (q, d) = (code.q(), code.degree());
    OracleLimits::default().check(code)?;
    if costs.len() != d * (q - 1) {
        return Err(OracleError::CostLength {
            expected: d * (q - 1),
            got: costs.len(),
        });
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let finite: Vec<f64> = kappas
        .iter()
        .filter_map(|k| match k {
            Kappa::Finite(x) => Some(*x),
            Kappa::Infinite => None,
        })
        .collect();
    let mut factors = vec![0.0; finite.len() * d * q];
    let mut shifts = vec![0.0; finite.len()];
    for (k, &kappa) in finite.iter().enumerate() {
        for t in 0..d {
            let shift = (0..q)
                .map(|b| kappa * coordinate(costs, q, t, b))
                .fold(f64::NEG_INFINITY, f64::max);
            shifts[k] += shift;
            for b in 0..q {
                factors[(k * d + t) * q + b] = (kappa * coordinate(costs, q, t, b) - shift).exp();
            }
        }
    }
    let zq = code.zq();
    let h = code.coefficients();
    let mut prods = vec![0.0; finite.len() * (d + 1)];
    for k in 0..finite.len() {
        prods[k * (d + 1)] = 1.0;
    }
    let mut walk = Walk {
        q,
        d,
        h,
        zq,
        last_inv: zq.inv(h[d - 1]),
        costs,
        factors,
        finite: finite.len(),
        word: vec![0; d],
        sums: vec![0.0; d + 1],
        prods,
        best: vec![f64::NEG_INFINITY; d * q],
        mass: vec![0.0; finite.len() * d * q],
    };
    walk.descend(0, 0);

    let mut out = Vec::with_capacity(kappas.len());
    let mut k = 0;
    for &kappa in kappas {
        let mut c_alpha = Vec::with_capacity(d * (q - 1));
        let mut c_not_alpha = Vec::with_capacity(d * (q - 1));
        for i in 0..d {
            for alpha in 1..q {
                let own = coordinate(costs, q, i, alpha);
                match kappa {
                    Kappa::Infinite => {
                        let row = &walk.best[i * q..(i + 1) * q];
                        c_alpha.push(row[alpha] - own);
                        c_not_alpha.push(
                            (0..q)
                                .filter(|&b| b != alpha)
                                .map(|b| row[b])
                                .fold(f64::NEG_INFINITY, f64::max),
                        );
                    }
                    Kappa::Finite(x) => {
                        let row = &walk.mass[(k * d + i) * q..(k * d + i + 1) * q];
                        c_alpha.push((row[alpha].ln() + shifts[k]) / x - own);
                        let rest: f64 = (0..q).filter(|&b| b != alpha).map(|b| row[b]).sum();
                        c_not_alpha.push((rest.ln() + shifts[k]) / x);
                    }
                }
            }
        }
        if !kappa.is_infinite() {
            k += 1;
        }
        out.push(BruteMarginals {
            kappa,
            q,
            c_alpha,
            c_not_alpha,
        });
    }
    Ok(out)
}

/// Exhaustive minimum of `Σ_i cost(i, x_i)` over words with zero syndrome.
/// Ties go to the lexicographically smallest word.
pub fn brute_best_codeword(
    graph: &TannerGraph,
    cost: impl Fn(usize, usize) -> f64,
) -> Result<Vec<usize>, OracleError> {
    let (q, n) = (graph.q(), graph.n());
    let size = (q as u64).saturating_pow(n as u32);
    if size > WORD_GUARD {
        return Err(OracleError::GuardExceeded {
            size,
            guard: WORD_GUARD,
        });
    }
    let mut word = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if graph.is_codeword(&word) {
            let c: f64 = word.iter().enumerate().map(|(i, &x)| cost(i, x)).sum();
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, word.clone()));
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                // the all-zero word always satisfies the checks
                return Ok(best.map(|(_, w)| w).unwrap_or_else(|| vec![0; n]));
            }
            k -= 1;
            word[k] += 1;
            if word[k] < q {
                break;
            }
            word[k] = 0;
        }
    }
}
