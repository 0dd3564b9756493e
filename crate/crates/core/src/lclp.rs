//! Low-complexity LP decoding by coordinate ascent on the softened dual.
//!
//! The state holds one dual cost vector `û_{i,j}` per Tanner-graph edge plus
//! the channel half-edge `û_{i,0} = -λ_i`. The check-side vectors are never
//! stored: `v̂_{j,i} = -û_{i,j}`. Each edge update recomputes `û_{i,j}` for
//! every nonzero symbol at once from the variable-node marginals (repetition
//! code, closed form) and the check-node marginals (trellis).
//!
//! Finite kappa uses the linear sum-product trellis. When a marginal of a
//! check underflows, that check is redone in the log domain.

use thiserror::Error;

use crate::code::{local_spc, syndrome, CodeError, SpcCode, TannerGraph};
use crate::ring::{soft_min, Kappa, RingError};
use crate::semiring::{LogSumProduct, MinSum, Semiring, SumProduct};
use crate::trellis::{BranchMetricTable, NotAlphaForm, PositionMarginals, TrellisError, TrellisMetrics};

/// Magnitude used in place of an infinite update (a symbol the local check
/// code cannot take at that position).
pub const INFEASIBLE_COST: f64 = 1e12;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("llr has {got} entries, expected {expected}")]
    LlrLength { expected: usize, got: usize },
    #[error("non-finite llr for symbol {symbol}")]
    NonFiniteLlr { symbol: usize },
    #[error("({i}, {j}) is not an edge of the Tanner graph")]
    NotAnEdge { i: usize, j: usize },
    #[error("alpha must be a nonzero symbol below q, got {0}")]
    BadAlpha(usize),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("state does not match the graph")]
    StateMismatch,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Trellis(#[from] TrellisError),
}

/// Dual edge variables of one decoding session.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    q: usize,
    kappa: Kappa,
    channel: Vec<f64>,
    u: Vec<f64>,
    iterations: usize,
    edge_updates: u64,
    log_fallbacks: u64,
}

impl DualState {
    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Completed passes.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Edge updates performed so far.
    pub fn edge_updates(&self) -> u64 {
        self.edge_updates
    }

    /// Check-node computations that had to be redone in the log domain.
    pub fn log_fallbacks(&self) -> u64 {
        self.log_fallbacks
    }

    /// `û_{i,0} = -λ_i`.
    pub fn channel(&self, i: usize) -> &[f64] {
        let w = self.q - 1;
        &self.channel[i * w..(i + 1) * w]
    }

    /// `û` on graph edge `e` (check-major edge numbering).
    pub fn edge(&self, e: usize) -> &[f64] {
        let w = self.q - 1;
        &self.u[e * w..(e + 1) * w]
    }

    /// `û_{i,j}` for variable `i` and check `j`.
    pub fn u(&self, graph: &TannerGraph, i: usize, j: usize) -> Result<&[f64], DecodeError> {
        let e = graph.edge_id(i, j).ok_or(DecodeError::NotAnEdge { i, j })?;
        Ok(self.edge(e))
    }

    /// `v̂_{j,i} = -û_{i,j}`.
    pub fn v_hat(&self, graph: &TannerGraph, j: usize, i: usize) -> Result<Vec<f64>, DecodeError> {
        Ok(self.u(graph, i, j)?.iter().map(|x| -x).collect())
    }

    /// True when every stored edge vector (channel excluded) is zero.
    pub fn edges_are_zero(&self) -> bool {
        self.u.iter().all(|&x| x == 0.0)
    }

    fn edge_mut(&mut self, e: usize) -> &mut [f64] {
        let w = self.q - 1;
        &mut self.u[e * w..(e + 1) * w]
    }

    /// `S_i(β) = Σ_{j' ∈ {0} ∪ J_i} û_{i,j'}^{(β)}` for the nonzero symbols.
    fn symbol_sums(&self, graph: &TannerGraph, i: usize) -> Vec<f64> {
        let mut s = self.channel(i).to_vec();
        for &e in graph.col_edges(i) {
            for (acc, x) in s.iter_mut().zip(self.edge(e)) {
                *acc += x;
            }
        }
        s
    }

    fn check_graph(&self, graph: &TannerGraph) -> Result<(), DecodeError> {
        let w = self.q - 1;
        if graph.q() != self.q || self.channel.len() != graph.n() * w || self.u.len() != graph.num_edges() * w {
            return Err(DecodeError::StateMismatch);
        }
        Ok(())
    }
}

/// Outcome of one decoder run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub word: Vec<usize>,
    pub converged: bool,
    pub iterations_used: usize,
    pub final_objective: Option<f64>,
}

fn check_llr(graph: &TannerGraph, llr: &[f64]) -> Result<(), DecodeError> {
    let expected = graph.n() * (graph.q() - 1);
    if llr.len() != expected {
        return Err(DecodeError::LlrLength {
            expected,
            got: llr.len(),
        });
    }
    if let Some(k) = llr.iter().position(|x| !x.is_finite()) {
        return Err(DecodeError::NonFiniteLlr {
            symbol: k / (graph.q() - 1),
        });
    }
    Ok(())
}

fn check_kappa(kappa: Kappa) -> Result<(), DecodeError> {
    match kappa {
        Kappa::Finite(k) if !(k.is_finite() && k > 0.0) => Err(RingError::BadKappa(k.to_string()).into()),
        _ => Ok(()),
    }
}

/// Fresh state: channel half-edges `-λ_i`, all edge variables zero. `llr`
/// holds `n` rows of `q - 1` entries.
pub fn init(graph: &TannerGraph, llr: &[f64], kappa: Kappa) -> Result<DualState, DecodeError> {
    check_llr(graph, llr)?;
    check_kappa(kappa)?;
    let q = graph.q();
    Ok(DualState {
        q,
        kappa,
        channel: llr.iter().map(|x| -x).collect(),
        u: vec![0.0; graph.num_edges() * (q - 1)],
        iterations: 0,
        edge_updates: 0,
        log_fallbacks: 0,
    })
}

fn check_alpha(q: usize, alpha: usize) -> Result<(), DecodeError> {
    if alpha == 0 || alpha >= q {
        Err(DecodeError::BadAlpha(alpha))
    } else {
        Ok(())
    }
}

/// `V_{i,ᾱ} = -softmin_{β ≠ α}(-S_β)` for every nonzero `α` (index `α - 1`).
fn v_not_alpha_all(sums: &[f64], kappa: Kappa) -> Result<Vec<f64>, RingError> {
    let q = sums.len() + 1;
    let mut candidates = Vec::with_capacity(q - 1);
    (1..q)
        .map(|alpha| {
            candidates.clear();
            candidates.push(0.0);
            candidates.extend((1..q).filter(|&b| b != alpha).map(|b| -sums[b - 1]));
            soft_min(&candidates, kappa).map(|m| -m)
        })
        .collect()
}

/// Variable-node marginals `(V_{i,ᾱ}, V_{i,α})` over the repetition code of
/// variable `i`, with edge `(i, j)` the excluded coordinate for `V_{i,α}`.
pub fn vn_marginals(
    state: &DualState,
    graph: &TannerGraph,
    i: usize,
    j: usize,
    alpha: usize,
) -> Result<(f64, f64), DecodeError> {
    state.check_graph(graph)?;
    check_alpha(state.q, alpha)?;
    let own = state.u(graph, i, j)?[alpha - 1];
    let sums = state.symbol_sums(graph, i);
    let v_not = v_not_alpha_all(&sums, state.kappa)?[alpha - 1];
    Ok((v_not, sums[alpha - 1] - own))
}

fn row_costs(state: &DualState, graph: &TannerGraph, j: usize) -> Vec<f64> {
    let w = state.q - 1;
    let r = graph.row_edges(j);
    state.u[r.start * w..r.end * w].to_vec()
}

fn position_of(graph: &TannerGraph, i: usize, j: usize) -> Result<usize, DecodeError> {
    let e = graph.edge_id(i, j).ok_or(DecodeError::NotAnEdge { i, j })?;
    Ok(e - graph.row_edges(j).start)
}

/// Check-node marginals `(C_{j,ᾱ}, C_{j,α})` from the trellis of check `j`
/// with `v̂_{j,t} = -û_{t,j}`.
pub fn cn_marginals(
    state: &DualState,
    graph: &TannerGraph,
    j: usize,
    i: usize,
    alpha: usize,
) -> Result<(f64, f64), DecodeError> {
    state.check_graph(graph)?;
    check_alpha(state.q, alpha)?;
    let k = position_of(graph, i, j)?;
    let code = local_spc(graph, j)?;
    let costs = row_costs(state, graph, j);
    let pair = match state.kappa {
        Kappa::Finite(x) => {
            let m = single_marginals(&code, &costs, k, SumProduct { kappa: x })?;
            if degenerate(&SumProduct { kappa: x }, &m) {
                pair_of(&LogSumProduct { kappa: x }, &single_marginals(&code, &costs, k, LogSumProduct { kappa: x })?, alpha)
            } else {
                pair_of(&SumProduct { kappa: x }, &m, alpha)
            }
        }
        Kappa::Infinite => pair_of(&MinSum, &single_marginals(&code, &costs, k, MinSum)?, alpha),
    };
    Ok(pair)
}

fn single_marginals<S: Semiring>(
    code: &SpcCode,
    costs: &[f64],
    k: usize,
    sr: S,
) -> Result<PositionMarginals, TrellisError> {
    let table = BranchMetricTable::from_costs(code, costs, sr)?;
    TrellisMetrics::compute(table, false)?.position_marginals(k, NotAlphaForm::Branch)
}

fn pair_of<S: Semiring>(sr: &S, m: &PositionMarginals, alpha: usize) -> (f64, f64) {
    (sr.to_cost(m.not_alpha[alpha - 1]), sr.to_cost(m.extrinsic[alpha]))
}

fn degenerate<S: Semiring>(sr: &S, m: &PositionMarginals) -> bool {
    m.extrinsic[1..].iter().chain(&m.not_alpha).any(|x| sr.is_degenerate(x.value))
}

/// Write `ū_{i,j}^{(α)} = ½((V_ᾱ - V_α) - (C_ᾱ - C_α))` for all α at once.
fn apply_update<S: Semiring>(
    state: &mut DualState,
    graph: &TannerGraph,
    e: usize,
    sr: &S,
    m: &PositionMarginals,
) -> Result<(), DecodeError> {
    let i = graph.edge_var(e);
    let sums = state.symbol_sums(graph, i);
    let v_not = v_not_alpha_all(&sums, state.kappa)?;
    let q = state.q;
    let old = state.edge(e).to_vec();
    let row = state.edge_mut(e);
    for alpha in 1..q {
        let v_diff = v_not[alpha - 1] - (sums[alpha - 1] - old[alpha - 1]);
        let c_diff = sr.cost_difference(m.not_alpha[alpha - 1], m.extrinsic[alpha]);
        let u = 0.5 * (v_diff - c_diff);
        row[alpha - 1] = if u.is_finite() {
            u
        } else if u > 0.0 {
            INFEASIBLE_COST
        } else {
            -INFEASIBLE_COST
        };
    }
    state.edge_updates += 1;
    Ok(())
}

/// Update one edge, holding every other edge variable fixed.
pub fn edge_update(state: &mut DualState, graph: &TannerGraph, i: usize, j: usize) -> Result<(), DecodeError> {
    state.check_graph(graph)?;
    let e = graph.edge_id(i, j).ok_or(DecodeError::NotAnEdge { i, j })?;
    let k = e - graph.row_edges(j).start;
    let code = local_spc(graph, j)?;
    let costs = row_costs(state, graph, j);
    match state.kappa {
        Kappa::Finite(x) => {
            let sp = SumProduct { kappa: x };
            let m = single_marginals(&code, &costs, k, sp)?;
            if degenerate(&sp, &m) {
                state.log_fallbacks += 1;
                let ls = LogSumProduct { kappa: x };
                let m = single_marginals(&code, &costs, k, ls)?;
                apply_update(state, graph, e, &ls, &m)
            } else {
                apply_update(state, graph, e, &sp, &m)
            }
        }
        Kappa::Infinite => {
            let m = single_marginals(&code, &costs, k, MinSum)?;
            apply_update(state, graph, e, &MinSum, &m)
        }
    }
}

enum Sweep {
    Done,
    Degenerate,
}

/// Update every edge of check `j` in ascending position order. The
/// backward metrics are computed once; after each update the branch
/// section is rebuilt and the forward metric advanced past it. An update at
/// position `k` only changes section `k`, so this equals `d` standalone
/// edge updates.
fn sweep_check<S: Semiring>(
    state: &mut DualState,
    graph: &TannerGraph,
    j: usize,
    code: &SpcCode,
    sr: S,
) -> Result<Sweep, DecodeError> {
    let costs = row_costs(state, graph, j);
    let table = BranchMetricTable::from_costs(code, &costs, sr)?;
    let mut tm = TrellisMetrics::for_sweep(table, false)?;
    for (k, e) in graph.row_edges(j).enumerate() {
        let m = tm.position_marginals(k, NotAlphaForm::Branch)?;
        if degenerate(&sr, &m) {
            return Ok(Sweep::Degenerate);
        }
        apply_update(state, graph, e, &sr, &m)?;
        tm.set_section(k, state.edge(e))?;
        tm.advance(k)?;
    }
    Ok(Sweep::Done)
}

fn update_check(state: &mut DualState, graph: &TannerGraph, j: usize) -> Result<(), DecodeError> {
    let code = local_spc(graph, j)?;
    match state.kappa {
        Kappa::Finite(x) => {
            let w = state.q - 1;
            let r = graph.row_edges(j);
            let snapshot = state.u[r.start * w..r.end * w].to_vec();
            let updates = state.edge_updates;
            if let Sweep::Degenerate = sweep_check(state, graph, j, &code, SumProduct { kappa: x })? {
                state.u[r.start * w..r.end * w].copy_from_slice(&snapshot);
                state.edge_updates = updates;
                state.log_fallbacks += 1;
                sweep_check(state, graph, j, &code, LogSumProduct { kappa: x })?;
            }
        }
        Kappa::Infinite => {
            sweep_check(state, graph, j, &code, MinSum)?;
        }
    }
    Ok(())
}

/// One pass over all edges: ascending check index, ascending variable index
/// within each check.
pub fn iterate(state: &mut DualState, graph: &TannerGraph) -> Result<(), DecodeError> {
    state.check_graph(graph)?;
    for j in 0..graph.m() {
        update_check(state, graph, j)?;
    }
    state.iterations += 1;
    Ok(())
}

fn check_term<S: Semiring>(code: &SpcCode, costs: &[f64], sr: S) -> Result<f64, TrellisError> {
    let table = BranchMetricTable::from_costs(code, costs, sr)?;
    let tm = TrellisMetrics::compute(table, false)?;
    // softmin of path costs is the negated cost-unit total
    Ok(-sr.to_cost(tm.forward_total()))
}

/// `Σ_i softmin_β(-S_i(β)) + Σ_j softmin_{b ∈ C_j}(path cost of b)`, the
/// softened dual objective with its inequality constraints tight. For
/// kappa = ∞ the soft minima are plain minima.
pub fn dual_objective(state: &DualState, graph: &TannerGraph) -> Result<f64, DecodeError> {
    state.check_graph(graph)?;
    let mut total = 0.0;
    for i in 0..graph.n() {
        let mut z: Vec<f64> = state.symbol_sums(graph, i).iter().map(|s| -s).collect();
        z.insert(0, 0.0);
        total += soft_min(&z, state.kappa)?;
    }
    for j in 0..graph.m() {
        let code = local_spc(graph, j)?;
        let costs = row_costs(state, graph, j);
        total += match state.kappa {
            Kappa::Finite(x) => check_term(&code, &costs, LogSumProduct { kappa: x })?,
            Kappa::Infinite => check_term(&code, &costs, MinSum)?,
        };
    }
    Ok(total)
}

/// `x̂_i = argmin_β T_i(β)` with `T_i(β) = -S_i(β)`, `T_i(0) = 0`; ties go to
/// the smallest residue.
pub fn hard_decision(state: &DualState, graph: &TannerGraph) -> Vec<usize> {
    (0..graph.n())
        .map(|i| {
            let sums = state.symbol_sums(graph, i);
            let mut best = (0usize, 0.0f64);
            for (k, s) in sums.iter().enumerate() {
                if -s < best.1 {
                    best = (k + 1, -s);
                }
            }
            best.0
        })
        .collect()
}

/// Run passes until the hard decision satisfies every check or
/// `max_iterations` passes are done. The decision is also tested before the
/// first pass.
pub fn decode(
    graph: &TannerGraph,
    llr: &[f64],
    kappa: Kappa,
    max_iterations: usize,
) -> Result<DecodeResult, DecodeError> {
    if max_iterations == 0 {
        return Err(DecodeError::NoIterations);
    }
    let mut state = init(graph, llr, kappa)?;
    let mut word = hard_decision(&state, graph);
    let mut converged = is_zero(&syndrome(&word, graph)?);
    while !converged && state.iterations < max_iterations {
        iterate(&mut state, graph)?;
        word = hard_decision(&state, graph);
        converged = is_zero(&syndrome(&word, graph)?);
    }
    let final_objective = match kappa {
        Kappa::Finite(_) => Some(dual_objective(&state, graph)?),
        Kappa::Infinite => None,
    };
    Ok(DecodeResult {
        word,
        converged,
        iterations_used: state.iterations,
        final_objective,
    })
}

pub(crate) fn is_zero(s: &[usize]) -> bool {
    s.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{lift_binary_matrix, parse_alist, random_regular};
    use crate::oracle::{brute_best_codeword, brute_marginal_alpha, brute_marginal_not_alpha};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SAMPLE: &str = "3 2 4\n1 2\n1 2 1\n2 2\n1 1\n1 3 2 1\n2 1\n1 1 2 3\n2 1 3 1\n";

    fn sample() -> TannerGraph {
        parse_alist(SAMPLE).unwrap()
    }

    fn random_llr(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
        (0..3 * n).map(|_| rng.random_range(-scale..scale)).collect()
    }

    fn scramble(state: &mut DualState, rng: &mut ChaCha8Rng) {
        for x in state.u.iter_mut() {
            *x = rng.random_range(-1.5..1.5);
        }
    }

    #[test]
    fn init_examples() {
        let g = sample();
        let s = init(&g, &[0.0; 9], Kappa::Finite(1.0)).unwrap();
        assert!(s.edges_are_zero());
        assert!(s.channel.iter().all(|&x| x == 0.0));
        let mut llr = vec![0.0; 9];
        llr[0..3].copy_from_slice(&[2.0, -1.0, 0.5]);
        let s = init(&g, &llr, Kappa::Infinite).unwrap();
        assert_eq!(s.channel(0), &[-2.0, 1.0, -0.5]);
        llr[4] = f64::NAN;
        assert!(matches!(
            init(&g, &llr, Kappa::Infinite),
            Err(DecodeError::NonFiniteLlr { symbol: 1 })
        ));
        assert!(matches!(
            init(&g, &[0.0; 8], Kappa::Infinite),
            Err(DecodeError::LlrLength { .. })
        ));
    }

    #[test]
    fn vn_marginals_zero_state() {
        let g = sample();
        let k = 1.7;
        let s = init(&g, &[0.0; 9], Kappa::Finite(k)).unwrap();
        let (v_not, v) = vn_marginals(&s, &g, 1, 0, 2).unwrap();
        assert_eq!(v, 0.0);
        assert!((v_not - 3f64.ln() / k).abs() < 1e-15);
        let s = init(&g, &[0.0; 9], Kappa::Infinite).unwrap();
        assert_eq!(vn_marginals(&s, &g, 1, 0, 2).unwrap(), (0.0, 0.0));
        assert!(matches!(
            vn_marginals(&s, &g, 0, 1, 2),
            Err(DecodeError::NotAnEdge { i: 0, j: 1 })
        ));
    }

    #[test]
    fn vn_marginals_match_repetition_enumeration() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kappa in [Kappa::Finite(0.6), Kappa::Finite(5.0), Kappa::Infinite] {
            let mut s = init(&g, &random_llr(&mut rng, 24, 2.0), kappa).unwrap();
            scramble(&mut s, &mut rng);
            for i in 0..24 {
                for &j in g.col_support(i) {
                    for alpha in 1..4 {
                        // the repetition code: constant words (β, ..., β)
                        let cost = |beta: usize, skip: Option<usize>| -> f64 {
                            if beta == 0 {
                                return 0.0;
                            }
                            let mut c = -s.channel(i)[beta - 1];
                            for &jj in g.col_support(i) {
                                if Some(jj) != skip {
                                    c -= s.u(&g, i, jj).unwrap()[beta - 1];
                                }
                            }
                            c
                        };
                        let others: Vec<f64> = (0..4).filter(|&b| b != alpha).map(|b| cost(b, None)).collect();
                        let v_not = -soft_min(&others, kappa).unwrap();
                        let v = -cost(alpha, Some(j));
                        let (a, b) = vn_marginals(&s, &g, i, j, alpha).unwrap();
                        assert!((a - v_not).abs() < 1e-12 && (b - v).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cn_marginals_match_oracle() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for kappa in [Kappa::Finite(0.5), Kappa::Finite(3.0), Kappa::Infinite] {
            let mut s = init(&g, &random_llr(&mut rng, 24, 2.0), kappa).unwrap();
            scramble(&mut s, &mut rng);
            for j in 0..g.m() {
                let code = local_spc(&g, j).unwrap();
                let v: Vec<f64> = row_costs(&s, &g, j).iter().map(|x| -x).collect();
                for (k, &i) in g.row_support(j).iter().enumerate() {
                    for alpha in 1..4 {
                        let (cn, ca) = cn_marginals(&s, &g, j, i, alpha).unwrap();
                        let bn = brute_marginal_not_alpha(&code, &v, k, alpha, kappa).unwrap();
                        let ba = brute_marginal_alpha(&code, &v, k, alpha, kappa).unwrap();
                        assert!((cn - bn).abs() < 1e-9 * bn.abs().max(1.0));
                        assert!((ca - ba).abs() < 1e-9 * ba.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn cn_marginals_zero_state_counts() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 2).unwrap());
        let k = 2.0;
        let s = init(&g, &vec![0.0; 72], Kappa::Finite(k)).unwrap();
        let (cn, ca) = cn_marginals(&s, &g, 0, g.row_support(0)[2], 3).unwrap();
        assert!((ca - 16f64.powi(2).ln() / k).abs() < 1e-12);
        assert!((cn - (3.0 * 256f64).ln() / k).abs() < 1e-12);
        let s = init(&g, &vec![0.0; 72], Kappa::Infinite).unwrap();
        assert_eq!(cn_marginals(&s, &g, 0, g.row_support(0)[2], 3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn edge_update_matches_definitions() {
        // single check, two positions, unit coefficients
        let g = TannerGraph::from_entries(2, 1, 4, vec![(0, 0, 1), (0, 1, 1)]).unwrap();
        let llr = [0.7, -0.3, 1.2, -0.4, 0.9, 0.1];
        for kappa in [Kappa::Finite(1.3), Kappa::Infinite] {
            let mut s = init(&g, &llr, kappa).unwrap();
            s.u.copy_from_slice(&[0.2, -0.1, 0.4, 0.3, 0.0, -0.6]);
            let before = s.clone();
            let expected: Vec<f64> = (1..4)
                .map(|a| {
                    let (vn, va) = vn_marginals(&before, &g, 1, 0, a).unwrap();
                    let (cn, ca) = cn_marginals(&before, &g, 0, 1, a).unwrap();
                    0.5 * ((vn - va) - (cn - ca))
                })
                .collect();
            edge_update(&mut s, &g, 1, 0).unwrap();
            for (x, y) in s.u(&g, 1, 0).unwrap().iter().zip(&expected) {
                assert!((x - y).abs() < 1e-12);
            }
            assert_eq!(s.u(&g, 0, 0).unwrap(), before.u(&g, 0, 0).unwrap());
            assert_eq!(s.channel, before.channel);
        }
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 4).unwrap());
        for kappa in [Kappa::Finite(0.3), Kappa::Finite(1.0), Kappa::Finite(10.0), Kappa::Infinite] {
            let mut s = init(&g, &vec![0.0; 144], kappa).unwrap();
            for _ in 0..3 {
                iterate(&mut s, &g).unwrap();
            }
            assert!(s.edges_are_zero(), "{kappa}");
        }
    }

    #[test]
    fn pass_touches_every_edge_once() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = init(&g, &random_llr(&mut rng, 48, 3.0), Kappa::Finite(1.0)).unwrap();
        iterate(&mut s, &g).unwrap();
        assert_eq!(s.edge_updates(), g.num_edges() as u64);
        assert_eq!(s.iterations(), 1);
    }

    #[test]
    fn sweep_equals_standalone_updates() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for kappa in [Kappa::Finite(2.0), Kappa::Infinite] {
            let llr = random_llr(&mut rng, 24, 2.0);
            let mut a = init(&g, &llr, kappa).unwrap();
            scramble(&mut a, &mut rng);
            let mut b = a.clone();
            iterate(&mut a, &g).unwrap();
            for j in 0..g.m() {
                for &i in g.row_support(j) {
                    edge_update(&mut b, &g, i, j).unwrap();
                }
            }
            for (x, y) in a.u.iter().zip(&b.u) {
                assert!((x - y).abs() < 1e-12, "{x} {y}");
            }
        }
    }

    #[test]
    fn objective_zero_state() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 2).unwrap());
        let k = 1.5;
        let s = init(&g, &vec![0.0; 72], Kappa::Finite(k)).unwrap();
        let expected = -24.0 * 4f64.ln() / k - 12.0 * 4f64.powi(5).ln() / k;
        assert!((dual_objective(&s, &g).unwrap() - expected).abs() < 1e-10);
        let s = init(&g, &vec![0.0; 72], Kappa::Infinite).unwrap();
        assert_eq!(dual_objective(&s, &g).unwrap(), 0.0);
    }

    #[test]
    fn objective_bounded_by_hard_minimum() {
        let g = sample();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let llr = random_llr(&mut rng, 3, 3.0);
            let mut s = init(&g, &llr, Kappa::Finite(2.0)).unwrap();
            scramble(&mut s, &mut rng);
            let mut h = s.clone();
            h.kappa = Kappa::Infinite;
            assert!(dual_objective(&s, &g).unwrap() <= dual_objective(&h, &g).unwrap() + 1e-12);
        }
    }

    #[test]
    fn coordinate_ascent_is_monotone() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 7).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for kappa in [0.5, 1.0, 10.0] {
            let mut s = init(&g, &random_llr(&mut rng, 48, 4.0), Kappa::Finite(kappa)).unwrap();
            let mut prev = dual_objective(&s, &g).unwrap();
            for _ in 0..2 {
                for j in 0..g.m() {
                    for &i in g.row_support(j) {
                        edge_update(&mut s, &g, i, j).unwrap();
                        let now = dual_objective(&s, &g).unwrap();
                        assert!(now >= prev - 1e-8, "{prev} -> {now}");
                        prev = now;
                    }
                }
            }
        }
    }

    #[test]
    fn hard_decision_examples() {
        let g = sample();
        let s = init(&g, &[0.0; 9], Kappa::Finite(1.0)).unwrap();
        assert_eq!(hard_decision(&s, &g), vec![0, 0, 0]);
        let mut llr = vec![0.0; 9];
        llr[0..3].copy_from_slice(&[5.0, 5.0, 5.0]);
        let s = init(&g, &llr, Kappa::Finite(1.0)).unwrap();
        assert_eq!(hard_decision(&s, &g)[0], 0);
        llr[3..6].copy_from_slice(&[1.0, -2.0, -2.0]);
        let s = init(&g, &llr, Kappa::Finite(1.0)).unwrap();
        assert_eq!(hard_decision(&s, &g)[1], 2);
    }

    #[test]
    fn decode_high_snr_and_iteration_cap() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 4).unwrap());
        for kappa in [Kappa::Finite(1.0), Kappa::Infinite] {
            let r = decode(&g, &vec![20.0; 144], kappa, 64).unwrap();
            assert!(r.converged && r.iterations_used <= 1);
            assert!(r.word.iter().all(|&x| x == 0));
            assert_eq!(r.final_objective.is_some(), !kappa.is_infinite());
        }
        // every symbol pushed to 1 and checks that cannot all be met by it
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut llr = vec![0.0; 144];
        for i in 0..48 {
            llr[3 * i..3 * i + 3].copy_from_slice(&[-3.0, 2.0, 2.0]);
            llr[3 * i + rng.random_range(0..3)] += 0.01;
        }
        let r = decode(&g, &llr, Kappa::Infinite, 5).unwrap();
        if !r.converged {
            assert_eq!(r.iterations_used, 5);
        }
        assert!(matches!(decode(&g, &llr, Kappa::Infinite, 0), Err(DecodeError::NoIterations)));
    }

    #[test]
    fn decode_recovers_noiseless_codeword() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 4).unwrap());
        // all-zero codeword observed with a clean, symbol-symmetric channel
        let mut llr = vec![0.0; 144];
        for i in 0..48 {
            llr[3 * i..3 * i + 3].copy_from_slice(&[4.0, 8.0, 4.0]);
        }
        for kappa in [Kappa::Finite(2.0), Kappa::Infinite] {
            let r = decode(&g, &llr, kappa, 64).unwrap();
            assert!(r.converged);
            assert_eq!(syndrome(&r.word, &g).unwrap(), vec![0; g.m()]);
            assert!(r.word.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn toy_code_matches_best_codeword() {
        let g = sample();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut certified = 0;
        for _ in 0..200 {
            let llr = random_llr(&mut rng, 3, 3.0);
            let cost = |w: &[usize]| -> f64 {
                w.iter()
                    .enumerate()
                    .map(|(i, &x)| if x == 0 { 0.0 } else { llr[3 * i + x - 1] })
                    .sum()
            };
            let best = brute_best_codeword(&g, |i, x| if x == 0 { 0.0 } else { llr[3 * i + x - 1] }).unwrap();
            let mut s = init(&g, &llr, Kappa::Infinite).unwrap();
            for _ in 0..64 {
                iterate(&mut s, &g).unwrap();
            }
            let objective = dual_objective(&s, &g).unwrap();
            // weak duality: the dual never exceeds the best codeword cost
            assert!(objective <= cost(&best) + 1e-9);
            let w = hard_decision(&s, &g);
            if g.is_codeword(&w) && cost(&w) - objective < 1e-9 {
                certified += 1;
                assert_eq!(w, best);
            }
            let r = decode(&g, &llr, Kappa::Infinite, 64).unwrap();
            if r.converged {
                assert!(g.is_codeword(&r.word));
            }
        }
        assert!(certified >= 150, "{certified}");
    }

    #[test]
    fn scaling_llr_scales_min_sum_state() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let llr = random_llr(&mut rng, 24, 2.0);
        let scaled: Vec<f64> = llr.iter().map(|x| 4.0 * x).collect();
        let mut a = init(&g, &llr, Kappa::Infinite).unwrap();
        let mut b = init(&g, &scaled, Kappa::Infinite).unwrap();
        for _ in 0..5 {
            iterate(&mut a, &g).unwrap();
            iterate(&mut b, &g).unwrap();
            for (x, y) in a.u.iter().zip(&b.u) {
                assert!((4.0 * x - y).abs() < 1e-9 * y.abs().max(1.0));
            }
            assert_eq!(hard_decision(&a, &g), hard_decision(&b, &g));
        }
    }

    #[test]
    fn underflow_falls_back_to_log_domain() {
        let g = lift_binary_matrix(&random_regular(24, 3, 6, 5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let llr = random_llr(&mut rng, 24, 400.0);
        let mut s = init(&g, &llr, Kappa::Finite(10.0)).unwrap();
        let mut prev = dual_objective(&s, &g).unwrap();
        for _ in 0..3 {
            iterate(&mut s, &g).unwrap();
            assert!(s.u.iter().all(|x| x.is_finite()));
            let now = dual_objective(&s, &g).unwrap();
            assert!(now >= prev - 1e-8 * prev.abs().max(1.0));
            prev = now;
        }
        assert!(s.log_fallbacks() > 0);
    }

    #[test]
    fn decode_is_deterministic() {
        let g = lift_binary_matrix(&random_regular(48, 3, 6, 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let llr = random_llr(&mut rng, 48, 3.0);
        assert_eq!(
            decode(&g, &llr, Kappa::Finite(3.0), 10).unwrap(),
            decode(&g, &llr, Kappa::Finite(3.0), 10).unwrap()
        );
    }
}
