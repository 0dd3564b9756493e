//! Trellis marginalization for single-parity-check codes (modified BCJR).
//!
//! The trellis of an SPC code with coefficients `h_0, ..., h_{d-1}` has `q`
//! states per section: the state at time `t` is the partial syndrome
//! `sum_{r<t} b_r h_r` of the path so far. A branch out of state `s` at time
//! `t` is labelled by the symbol `b` and ends in `s + b h_t`. Valid codewords
//! are the paths from state 0 at time 0 to state 0 at time `d`.
//!
//! For every position `i` and nonzero symbol `α` the engine produces
//!
//! * `C_{j,α}`: the marginal over codewords with `b_i = α`, with the branch
//!   at position `i` left out (extrinsic);
//! * `C_{j,ᾱ}`: the marginal over codewords with `b_i ≠ α`, branch included.
//!
//! In cost units both are `-softmin_κ` of the path costs, where the cost of
//! symbol `b` at position `t` is `-⟨v̂_{j,t}, ξ(b)⟩`.
//!
//! `C_{j,ᾱ}` is available in two forms: summing over the branches of
//! section `i` ([`TrellisMetrics::marginal_not_alpha_branch`]) and through
//! the alternative forward metric `μ̄` ([`TrellisMetrics::marginal_not_alpha_alt`]).
//! Both are kept; they check each other.

use thiserror::Error;

use crate::code::SpcCode;
use crate::ring::{Kappa, Zq};
use crate::semiring::{MinSum, Scaled, Semiring, SumProduct};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrellisError {
    #[error("cost vector has length {got}, expected {expected}")]
    CostLength { expected: usize, got: usize },
    #[error("non-finite cost at position {position}, symbol {symbol}")]
    NonFiniteCost { position: usize, symbol: usize },
    #[error("alpha must be a nonzero symbol below q, got {0}")]
    BadAlpha(usize),
    #[error("position {position} out of range for degree {degree}")]
    BadPosition { position: usize, degree: usize },
    #[error("invalid state metric in {0} pass")]
    Overflow(&'static str),
    #[error("alternative forward metrics were not computed")]
    MissingAlt,
}

/// How `C_{j,ᾱ}` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NotAlphaForm {
    /// Sum over the branches of section `i` with label `≠ α`.
    #[default]
    Branch,
    /// Sum over states of `μ̄_{i+1}(s, α) ν_{i+1}(s)`.
    AltForward,
}

/// Per-section branch weights `g_t(b)`, each section carrying a rescaling
/// offset (the true weight is `weight` lifted by `offset`).
#[derive(Debug, Clone)]
pub struct BranchMetricTable<S> {
    semiring: S,
    zq: Zq,
    coeffs: Vec<usize>,
    weights: Vec<f64>,
    offsets: Vec<f64>,
    scratch: Vec<f64>,
}

/// Branch metrics from the check-side dual vectors `v̂_{j,t}`, given flat
/// (`d` rows of `q - 1` entries, nonzero symbols in ascending order).
pub fn build_branch_metrics<S: Semiring>(
    code: &SpcCode,
    v_hat: &[f64],
    semiring: S,
) -> Result<BranchMetricTable<S>, TrellisError> {
    let costs: Vec<f64> = v_hat.iter().map(|&v| -v).collect();
    BranchMetricTable::from_costs(code, &costs, semiring)
}

impl<S: Semiring> BranchMetricTable<S> {
    /// Branch metrics from symbol costs: `costs[t * (q-1) + b - 1]` is the
    /// cost of nonzero symbol `b` at position `t`; symbol 0 costs nothing.
    pub fn from_costs(code: &SpcCode, costs: &[f64], semiring: S) -> Result<Self, TrellisError> {
        let q = code.q();
        let d = code.degree();
        if costs.len() != d * (q - 1) {
            return Err(TrellisError::CostLength {
                expected: d * (q - 1),
                got: costs.len(),
            });
        }
        let mut table = BranchMetricTable {
            semiring,
            zq: code.zq(),
            coeffs: code.coefficients().to_vec(),
            weights: vec![0.0; d * q],
            offsets: vec![0.0; d],
            scratch: vec![0.0; q],
        };
        for t in 0..d {
            table.set_section(t, &costs[t * (q - 1)..(t + 1) * (q - 1)])?;
        }
        Ok(table)
    }

    /// Replace the costs of one section (`q - 1` entries for the nonzero
    /// symbols).
    pub fn set_section(&mut self, t: usize, costs: &[f64]) -> Result<(), TrellisError> {
        let q = self.zq.q();
        if costs.len() != q - 1 {
            return Err(TrellisError::CostLength {
                expected: q - 1,
                got: costs.len(),
            });
        }
        if let Some(b) = costs.iter().position(|c| !c.is_finite()) {
            return Err(TrellisError::NonFiniteCost {
                position: t,
                symbol: b + 1,
            });
        }
        self.scratch[0] = 0.0;
        self.scratch[1..].copy_from_slice(costs);
        self.offsets[t] = self
            .semiring
            .weights(&self.scratch, &mut self.weights[t * q..(t + 1) * q]);
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> usize {
        self.zq.q()
    }

    pub fn semiring(&self) -> S {
        self.semiring
    }

    pub fn coefficients(&self) -> &[usize] {
        &self.coeffs
    }

    /// `g_t(b)` with its offset.
    pub fn weight(&self, t: usize, b: usize) -> Scaled {
        Scaled::new(self.weights[t * self.q() + b], self.offsets[t])
    }

    fn section(&self, t: usize) -> &[f64] {
        let q = self.q();
        &self.weights[t * q..(t + 1) * q]
    }
}

/// Forward (`μ`) or backward (`ν`) state metrics: `(d+1) × q` values with
/// one offset per time step.
#[derive(Debug, Clone)]
pub struct StateMetrics {
    q: usize,
    values: Vec<f64>,
    offsets: Vec<f64>,
    ops: u64,
}

impl StateMetrics {
    pub fn get(&self, t: usize, s: usize) -> Scaled {
        Scaled::new(self.values[t * self.q + s], self.offsets[t])
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.q..(t + 1) * self.q]
    }

    pub fn offset(&self, t: usize) -> f64 {
        self.offsets[t]
    }

    /// Semiring operations spent computing this table.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    fn row_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.values[t * self.q..(t + 1) * self.q]
    }
}

/// Alternative forward metrics `μ̄_t(s, α)`: the forward sum restricted to
/// prefixes whose last symbol differs from `α`.
#[derive(Debug, Clone)]
pub struct AltMetrics {
    q: usize,
    values: Vec<f64>,
    offsets: Vec<f64>,
    ops: u64,
}

impl AltMetrics {
    pub fn get(&self, t: usize, s: usize, alpha: usize) -> Scaled {
        let q = self.q;
        Scaled::new(
            self.values[(t * q + s) * (q - 1) + alpha - 1],
            self.offsets[t],
        )
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }
}

fn forward_step<S: Semiring>(
    sr: &S,
    zq: Zq,
    h: usize,
    prev: &[f64],
    g: &[f64],
    out: &mut [f64],
) -> u64 {
    let q = zq.q();
    out.fill(sr.zero());
    for (s, &m) in prev.iter().enumerate() {
        for (b, &w) in g.iter().enumerate() {
            let next = zq.add(s, zq.mul(b, h));
            out[next] = sr.combine(out[next], sr.extend(m, w));
        }
    }
    2 * (q * q) as u64
}

fn backward_step<S: Semiring>(
    sr: &S,
    zq: Zq,
    h: usize,
    next: &[f64],
    g: &[f64],
    out: &mut [f64],
) -> u64 {
    let q = zq.q();
    for (s, o) in out.iter_mut().enumerate() {
        let mut acc = sr.zero();
        for (b, &w) in g.iter().enumerate() {
            acc = sr.combine(acc, sr.extend(w, next[zq.add(s, zq.mul(b, h))]));
        }
        *o = acc;
    }
    2 * (q * q) as u64
}

/// `μ̄_{t+1}(s, α) = ⊕_{b ≠ α} μ_t(s - b h) ⊗ g_t(b)`. Each target state has
/// exactly one predecessor per label, so the exclusion over `b` is done with
/// prefix/suffix combines.
fn alt_step<S: Semiring>(
    sr: &S,
    zq: Zq,
    h: usize,
    prev: &[f64],
    g: &[f64],
    out: &mut [f64],
) -> u64 {
    let q = zq.q();
    let mut terms = vec![0.0; q];
    let mut suffix = vec![0.0; q + 1];
    for s in 0..q {
        for (b, t) in terms.iter_mut().enumerate() {
            *t = sr.extend(prev[zq.sub(s, zq.mul(b, h))], g[b]);
        }
        suffix[q] = sr.zero();
        for b in (0..q).rev() {
            suffix[b] = sr.combine(terms[b], suffix[b + 1]);
        }
        let mut prefix = terms[0];
        for alpha in 1..q {
            out[s * (q - 1) + alpha - 1] = sr.combine(prefix, suffix[alpha + 1]);
            prefix = sr.combine(prefix, terms[alpha]);
        }
    }
    4 * (q * q) as u64
}

fn validate<S: Semiring>(sr: &S, row: &[f64], pass: &'static str) -> Result<(), TrellisError> {
    if row.iter().all(|&v| sr.is_valid(v)) {
        Ok(())
    } else {
        Err(TrellisError::Overflow(pass))
    }
}

fn boundary<S: Semiring>(sr: &S, q: usize) -> Vec<f64> {
    let mut row = vec![sr.zero(); q];
    row[0] = sr.one();
    row
}

/// Forward recursion `μ_{t+1}(s') = ⊕_{s + b h_t = s'} μ_t(s) ⊗ g_t(b)` from
/// `μ_0 = (1, 0, ..., 0)`.
pub fn forward_metrics<S: Semiring>(
    table: &BranchMetricTable<S>,
) -> Result<StateMetrics, TrellisError> {
    let (q, d) = (table.q(), table.degree());
    let sr = table.semiring;
    let mut m = StateMetrics {
        q,
        values: vec![sr.zero(); (d + 1) * q],
        offsets: vec![0.0; d + 1],
        ops: 0,
    };
    m.row_mut(0).copy_from_slice(&boundary(&sr, q));
    let mut raw = vec![0.0; q];
    for t in 0..d {
        m.ops += forward_step(&sr, table.zq, table.coeffs[t], m.row(t), table.section(t), &mut raw);
        let c = sr.normalize(&mut raw);
        validate(&sr, &raw, "forward")?;
        m.offsets[t + 1] = m.offsets[t] + table.offsets[t] + c;
        m.row_mut(t + 1).copy_from_slice(&raw);
    }
    Ok(m)
}

/// Backward recursion `ν_t(s) = ⊕_b g_t(b) ⊗ ν_{t+1}(s + b h_t)` from
/// `ν_d = (1, 0, ..., 0)`; `ν_t(s)` collects the suffixes that bring state
/// `s` back to 0.
pub fn backward_metrics<S: Semiring>(
    table: &BranchMetricTable<S>,
) -> Result<StateMetrics, TrellisError> {
    let (q, d) = (table.q(), table.degree());
    let sr = table.semiring;
    let mut m = StateMetrics {
        q,
        values: vec![sr.zero(); (d + 1) * q],
        offsets: vec![0.0; d + 1],
        ops: 0,
    };
    m.row_mut(d).copy_from_slice(&boundary(&sr, q));
    let mut raw = vec![0.0; q];
    for t in (0..d).rev() {
        m.ops += backward_step(&sr, table.zq, table.coeffs[t], m.row(t + 1), table.section(t), &mut raw);
        let c = sr.normalize(&mut raw);
        validate(&sr, &raw, "backward")?;
        m.offsets[t] = m.offsets[t + 1] + table.offsets[t] + c;
        m.row_mut(t).copy_from_slice(&raw);
    }
    Ok(m)
}

/// Alternative forward metrics from an already computed `μ`. `μ̄_0` is the
/// combine identity everywhere.
pub fn alt_forward_metrics<S: Semiring>(
    table: &BranchMetricTable<S>,
    mu: &StateMetrics,
) -> AltMetrics {
    let (q, d) = (table.q(), table.degree());
    let sr = table.semiring;
    let stride = q * (q - 1);
    let mut alt = AltMetrics {
        q,
        values: vec![sr.zero(); (d + 1) * stride],
        offsets: vec![0.0; d + 1],
        ops: 0,
    };
    for t in 0..d {
        alt.ops += alt_step(
            &sr,
            table.zq,
            table.coeffs[t],
            mu.row(t),
            table.section(t),
            &mut alt.values[(t + 1) * stride..(t + 2) * stride],
        );
        alt.offsets[t + 1] = mu.offsets[t] + table.offsets[t];
    }
    alt
}

/// Marginals of one position, all symbols at once.
#[derive(Debug, Clone)]
pub struct PositionMarginals {
    /// `extrinsic[b]`: codewords with `b_i = b`, position `i` excluded.
    pub extrinsic: Vec<Scaled>,
    /// `not_alpha[α - 1]`: codewords with `b_i ≠ α`, position `i` included.
    pub not_alpha: Vec<Scaled>,
}

/// Stored forward/backward (and optionally alternative forward) metrics of
/// one check node.
#[derive(Debug, Clone)]
pub struct TrellisMetrics<S> {
    table: BranchMetricTable<S>,
    mu: StateMetrics,
    nu: StateMetrics,
    mu_bar: Option<AltMetrics>,
    ops: u64,
}

impl<S: Semiring> TrellisMetrics<S> {
    /// First phase: forward and backward passes, plus `μ̄` when requested.
    pub fn compute(table: BranchMetricTable<S>, with_alt: bool) -> Result<Self, TrellisError> {
        let mu = forward_metrics(&table)?;
        let nu = backward_metrics(&table)?;
        let mu_bar = with_alt.then(|| alt_forward_metrics(&table, &mu));
        let ops = mu.ops + nu.ops + mu_bar.as_ref().map_or(0, |a| a.ops);
        Ok(TrellisMetrics {
            table,
            mu,
            nu,
            mu_bar,
            ops,
        })
    }

    /// Backward pass only, with `μ_0` set; later sections of `μ` are filled
    /// by [`advance`](Self::advance). Used for sweeps that change one
    /// section at a time from left to right.
    pub fn for_sweep(table: BranchMetricTable<S>, with_alt: bool) -> Result<Self, TrellisError> {
        let (q, d) = (table.q(), table.degree());
        let sr = table.semiring;
        let nu = backward_metrics(&table)?;
        let mut mu = StateMetrics {
            q,
            values: vec![sr.zero(); (d + 1) * q],
            offsets: vec![0.0; d + 1],
            ops: 0,
        };
        mu.row_mut(0).copy_from_slice(&boundary(&sr, q));
        let mu_bar = with_alt.then(|| AltMetrics {
            q,
            values: vec![sr.zero(); (d + 1) * q * (q - 1)],
            offsets: vec![0.0; d + 1],
            ops: 0,
        });
        let ops = nu.ops;
        Ok(TrellisMetrics {
            table,
            mu,
            nu,
            mu_bar,
            ops,
        })
    }

    /// Recompute `μ_{t+1}` (and `μ̄_{t+1}` if kept) from `μ_t` and the
    /// current section `t`.
    pub fn advance(&mut self, t: usize) -> Result<(), TrellisError> {
        let q = self.table.q();
        let sr = self.table.semiring;
        let h = self.table.coeffs[t];
        let mut raw = vec![0.0; q];
        self.ops += forward_step(&sr, self.table.zq, h, self.mu.row(t), self.table.section(t), &mut raw);
        if let Some(alt) = self.mu_bar.as_mut() {
            let stride = q * (q - 1);
            self.ops += alt_step(
                &sr,
                self.table.zq,
                h,
                self.mu.row(t),
                self.table.section(t),
                &mut alt.values[(t + 1) * stride..(t + 2) * stride],
            );
            alt.offsets[t + 1] = self.mu.offsets[t] + self.table.offsets[t];
        }
        let c = sr.normalize(&mut raw);
        validate(&sr, &raw, "forward")?;
        self.mu.offsets[t + 1] = self.mu.offsets[t] + self.table.offsets[t] + c;
        self.mu.row_mut(t + 1).copy_from_slice(&raw);
        Ok(())
    }

    /// Replace the costs of section `t`. Only `μ_{t+1..}` become stale;
    /// `ν_{t+1..}` and `μ_{..=t}` stay valid.
    pub fn set_section(&mut self, t: usize, costs: &[f64]) -> Result<(), TrellisError> {
        self.table.set_section(t, costs)
    }

    pub fn table(&self) -> &BranchMetricTable<S> {
        &self.table
    }

    pub fn mu(&self) -> &StateMetrics {
        &self.mu
    }

    pub fn nu(&self) -> &StateMetrics {
        &self.nu
    }

    pub fn mu_bar(&self) -> Option<&AltMetrics> {
        self.mu_bar.as_ref()
    }

    /// Total semiring operations spent so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn degree(&self) -> usize {
        self.table.degree()
    }

    /// `μ_d(0)`: the whole code.
    pub fn forward_total(&self) -> Scaled {
        self.mu.get(self.degree(), 0)
    }

    /// `ν_0(0)`: the whole code.
    pub fn backward_total(&self) -> Scaled {
        self.nu.get(0, 0)
    }

    fn check(&self, i: usize, alpha: usize) -> Result<(), TrellisError> {
        if i >= self.degree() {
            return Err(TrellisError::BadPosition {
                position: i,
                degree: self.degree(),
            });
        }
        if alpha == 0 || alpha >= self.table.q() {
            return Err(TrellisError::BadAlpha(alpha));
        }
        Ok(())
    }

    /// `⊕_s μ_i(s) ⊗ ν_{i+1}(s + b h_i)` for any symbol `b`, zero included.
    pub fn extrinsic(&self, i: usize, b: usize) -> Scaled {
        let sr = self.table.semiring;
        let zq = self.table.zq;
        let step = zq.mul(b, self.table.coeffs[i]);
        let (mu, nu) = (self.mu.row(i), self.nu.row(i + 1));
        let value = (0..zq.q()).fold(sr.zero(), |acc, s| {
            sr.combine(acc, sr.extend(mu[s], nu[zq.add(s, step)]))
        });
        Scaled::new(value, self.mu.offsets[i] + self.nu.offsets[i + 1])
    }

    /// `C_{j,α}` in semiring form: the pairs `(s, s + α h_i)`, branch weight
    /// left out.
    pub fn marginal_alpha(&self, i: usize, alpha: usize) -> Result<Scaled, TrellisError> {
        self.check(i, alpha)?;
        Ok(self.extrinsic(i, alpha))
    }

    /// `C_{j,ᾱ}` in semiring form, summed over the branches of section `i`
    /// whose label differs from `α`.
    pub fn marginal_not_alpha_branch(&self, i: usize, alpha: usize) -> Result<Scaled, TrellisError> {
        self.check(i, alpha)?;
        let sr = self.table.semiring;
        let zq = self.table.zq;
        let h = self.table.coeffs[i];
        let (mu, nu, g) = (self.mu.row(i), self.nu.row(i + 1), self.table.section(i));
        let mut acc = sr.zero();
        for (s, &m) in mu.iter().enumerate() {
            for (b, &w) in g.iter().enumerate() {
                if b != alpha {
                    acc = sr.combine(acc, sr.extend(sr.extend(m, w), nu[zq.add(s, zq.mul(b, h))]));
                }
            }
        }
        Ok(Scaled::new(
            acc,
            self.mu.offsets[i] + self.table.offsets[i] + self.nu.offsets[i + 1],
        ))
    }

    /// `C_{j,ᾱ}` in semiring form via `⊕_s μ̄_{i+1}(s, α) ⊗ ν_{i+1}(s)`.
    pub fn marginal_not_alpha_alt(&self, i: usize, alpha: usize) -> Result<Scaled, TrellisError> {
        self.check(i, alpha)?;
        let alt = self.mu_bar.as_ref().ok_or(TrellisError::MissingAlt)?;
        let sr = self.table.semiring;
        let nu = self.nu.row(i + 1);
        let value = nu.iter().enumerate().fold(sr.zero(), |acc, (s, &n)| {
            sr.combine(acc, sr.extend(alt.get(i + 1, s, alpha).value, n))
        });
        Ok(Scaled::new(value, alt.offsets[i + 1] + self.nu.offsets[i + 1]))
    }

    /// Every marginal of position `i` in `O(q²)` operations.
    pub fn position_marginals(&mut self, i: usize, form: NotAlphaForm) -> Result<PositionMarginals, TrellisError> {
        let q = self.table.q();
        let sr = self.table.semiring;
        if i >= self.degree() {
            return Err(TrellisError::BadPosition {
                position: i,
                degree: self.degree(),
            });
        }
        let extrinsic: Vec<Scaled> = (0..q).map(|b| self.extrinsic(i, b)).collect();
        self.ops += 2 * (q * q) as u64;
        let not_alpha = match form {
            NotAlphaForm::Branch => {
                let zq = self.table.zq;
                let step = self.table.coeffs[i];
                let (g, mu, nu) = (self.table.section(i), self.mu.row(i), self.nu.row(i + 1));
                // (μ ⊗ g) ⊗ ν, the same association as the μ̄ recursion, so
                // both forms agree to the last bit in min-sum
                let per_symbol: Vec<f64> = (0..q)
                    .map(|b| {
                        let shift = zq.mul(b, step);
                        (0..q).fold(sr.zero(), |acc, s| {
                            sr.combine(acc, sr.extend(sr.extend(mu[s], g[b]), nu[zq.add(s, shift)]))
                        })
                    })
                    .collect();
                self.ops += 2 * (q * q) as u64;
                let mut suffix = vec![sr.zero(); q + 1];
                for b in (0..q).rev() {
                    suffix[b] = sr.combine(per_symbol[b], suffix[b + 1]);
                }
                let offset = extrinsic[0].offset + self.table.offsets[i];
                let mut prefix = per_symbol[0];
                let mut out = Vec::with_capacity(q - 1);
                for alpha in 1..q {
                    out.push(Scaled::new(sr.combine(prefix, suffix[alpha + 1]), offset));
                    prefix = sr.combine(prefix, per_symbol[alpha]);
                }
                self.ops += 4 * q as u64;
                out
            }
            NotAlphaForm::AltForward => {
                self.ops += 2 * (q * (q - 1)) as u64;
                (1..q)
                    .map(|alpha| self.marginal_not_alpha_alt(i, alpha))
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(PositionMarginals { extrinsic, not_alpha })
    }
}

/// All `d (q-1)` marginal pairs of one check, in cost units.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckMarginals {
    q: usize,
    c_alpha: Vec<f64>,
    c_not_alpha: Vec<f64>,
    ops: u64,
}

impl CheckMarginals {
    /// `C_{j,α}` at local position `i`.
    pub fn c_alpha(&self, i: usize, alpha: usize) -> f64 {
        self.c_alpha[i * (self.q - 1) + alpha - 1]
    }

    /// `C_{j,ᾱ}` at local position `i`.
    pub fn c_not_alpha(&self, i: usize, alpha: usize) -> f64 {
        self.c_not_alpha[i * (self.q - 1) + alpha - 1]
    }

    pub fn degree(&self) -> usize {
        self.c_alpha.len() / (self.q - 1)
    }

    /// Semiring operations used, including both passes.
    pub fn ops(&self) -> u64 {
        self.ops
    }
}

/// One forward pass, one backward pass (plus `μ̄` for the alternative form),
/// then every `(C_{j,α}, C_{j,ᾱ})` pair converted to cost units.
pub fn all_marginals<S: Semiring>(
    code: &SpcCode,
    v_hat: &[f64],
    semiring: S,
    form: NotAlphaForm,
) -> Result<CheckMarginals, TrellisError> {
    let table = build_branch_metrics(code, v_hat, semiring)?;
    let mut tm = TrellisMetrics::compute(table, form == NotAlphaForm::AltForward)?;
    let (q, d) = (code.q(), code.degree());
    let mut c_alpha = Vec::with_capacity(d * (q - 1));
    let mut c_not_alpha = Vec::with_capacity(d * (q - 1));
    for i in 0..d {
        let pm = tm.position_marginals(i, form)?;
        for alpha in 1..q {
            c_alpha.push(semiring.to_cost(pm.extrinsic[alpha]));
            c_not_alpha.push(semiring.to_cost(pm.not_alpha[alpha - 1]));
        }
    }
    Ok(CheckMarginals {
        q,
        c_alpha,
        c_not_alpha,
        ops: tm.ops,
    })
}

/// [`all_marginals`] in the semiring selected by `kappa`: sum-product for
/// finite kappa, min-sum for kappa = ∞.
pub fn all_marginals_for_kappa(
    code: &SpcCode,
    v_hat: &[f64],
    kappa: Kappa,
    form: NotAlphaForm,
) -> Result<CheckMarginals, TrellisError> {
    match kappa {
        Kappa::Finite(k) => all_marginals(code, v_hat, SumProduct { kappa: k }, form),
        Kappa::Infinite => all_marginals(code, v_hat, MinSum, form),
    }
}
