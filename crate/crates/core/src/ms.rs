//! Nonbinary min-sum belief propagation with trellis check-node processing.
//!
//! Messages are cost vectors relative to symbol 0: entry `α - 1` holds
//! `cost(α) - cost(0)`. Check nodes run the min-sum trellis on the incoming
//! messages and return extrinsic minima. Flooding schedule, no damping.

use crate::code::{local_spc, syndrome, TannerGraph};
use crate::lclp::{is_zero, DecodeError, DecodeResult, INFEASIBLE_COST};
use crate::semiring::MinSum;
use crate::trellis::{BranchMetricTable, NotAlphaForm, TrellisMetrics};

/// Both message directions, one `q - 1` vector per edge (check-major edge
/// numbering).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    q: usize,
    pub vn_to_cn: Vec<f64>,
    pub cn_to_vn: Vec<f64>,
}

impl MessageState {
    /// Zero check messages; variable messages set to the channel costs.
    pub fn new(graph: &TannerGraph, llr: &[f64]) -> Result<Self, DecodeError> {
        let q = graph.q();
        let w = q - 1;
        if llr.len() != graph.n() * w {
            return Err(DecodeError::LlrLength {
                expected: graph.n() * w,
                got: llr.len(),
            });
        }
        if let Some(k) = llr.iter().position(|x| !x.is_finite()) {
            return Err(DecodeError::NonFiniteLlr { symbol: k / w });
        }
        let mut vn_to_cn = vec![0.0; graph.num_edges() * w];
        for e in 0..graph.num_edges() {
            let i = graph.edge_var(e);
            vn_to_cn[e * w..(e + 1) * w].copy_from_slice(&llr[i * w..(i + 1) * w]);
        }
        Ok(MessageState {
            q,
            vn_to_cn,
            cn_to_vn: vec![0.0; graph.num_edges() * w],
        })
    }

    pub fn vn_to_cn(&self, e: usize) -> &[f64] {
        let w = self.q - 1;
        &self.vn_to_cn[e * w..(e + 1) * w]
    }

    pub fn cn_to_vn(&self, e: usize) -> &[f64] {
        let w = self.q - 1;
        &self.cn_to_vn[e * w..(e + 1) * w]
    }

    /// `λ_i + Σ_{j ∈ J_i} cn_to_vn_{j,i}`, the decision metric of symbol `i`.
    pub fn posterior(&self, graph: &TannerGraph, llr: &[f64], i: usize) -> Vec<f64> {
        let w = self.q - 1;
        let mut total = llr[i * w..(i + 1) * w].to_vec();
        for &e in graph.col_edges(i) {
            for (t, m) in total.iter_mut().zip(self.cn_to_vn(e)) {
                *t += m;
            }
        }
        total
    }
}

/// Variable-node rule for symbol `i`: the message to check `j` is
/// `λ_i + Σ_{j' ≠ j} cn_to_vn_{j',i}`. Shifting every symbol cost by a
/// common constant leaves the 0-relative form unchanged, so no further
/// normalization is applied.
pub fn ms_vn_update(state: &mut MessageState, graph: &TannerGraph, llr: &[f64], i: usize) {
    let w = state.q - 1;
    let edges = graph.col_edges(i);
    for &e in edges {
        let mut msg = llr[i * w..(i + 1) * w].to_vec();
        for &other in edges.iter().filter(|&&o| o != e) {
            for (m, x) in msg.iter_mut().zip(state.cn_to_vn(other)) {
                *m += x;
            }
        }
        state.vn_to_cn[e * w..(e + 1) * w].copy_from_slice(&msg);
    }
}

/// Check-node rule for check `j`: the message to position `i` at symbol
/// `α` is the least total incoming cost over local codewords with
/// `b_i = α`, position `i` left out, taken relative to `α = 0`.
pub fn ms_cn_update(state: &mut MessageState, graph: &TannerGraph, j: usize) -> Result<(), DecodeError> {
    let w = state.q - 1;
    let code = local_spc(graph, j)?;
    let r = graph.row_edges(j);
    let table = BranchMetricTable::from_costs(&code, &state.vn_to_cn[r.start * w..r.end * w], MinSum)?;
    let mut tm = TrellisMetrics::compute(table, false)?;
    for (k, e) in r.enumerate() {
        let m = tm.position_marginals(k, NotAlphaForm::Branch)?;
        let base = m.extrinsic[0].value;
        let out = &mut state.cn_to_vn[e * w..(e + 1) * w];
        for (alpha, o) in out.iter_mut().enumerate() {
            let x = m.extrinsic[alpha + 1].value - base;
            *o = if x.is_finite() { x } else { INFEASIBLE_COST };
        }
    }
    Ok(())
}

fn decide(state: &MessageState, graph: &TannerGraph, llr: &[f64]) -> Vec<usize> {
    (0..graph.n())
        .map(|i| {
            let mut best = (0usize, 0.0f64);
            for (k, &c) in state.posterior(graph, llr, i).iter().enumerate() {
                if c < best.1 {
                    best = (k + 1, c);
                }
            }
            best.0
        })
        .collect()
}

/// Flooding min-sum: all check updates, then all variable updates, per
/// iteration. Decisions are the per-symbol argmin of the posterior (ties to
/// the smallest residue), tested before the first iteration and after each.
pub fn ms_decode(graph: &TannerGraph, llr: &[f64], max_iterations: usize) -> Result<DecodeResult, DecodeError> {
    if max_iterations == 0 {
        return Err(DecodeError::NoIterations);
    }
    let mut state = MessageState::new(graph, llr)?;
    let mut word = decide(&state, graph, llr);
    let mut converged = is_zero(&syndrome(&word, graph)?);
    let mut iterations = 0;
    while !converged && iterations < max_iterations {
        for j in 0..graph.m() {
            ms_cn_update(&mut state, graph, j)?;
        }
        for i in 0..graph.n() {
            ms_vn_update(&mut state, graph, llr, i);
        }
        iterations += 1;
        word = decide(&state, graph, llr);
        converged = is_zero(&syndrome(&word, graph)?);
    }
    Ok(DecodeResult {
        word,
        converged,
        iterations_used: iterations,
        final_objective: None,
    })
}
