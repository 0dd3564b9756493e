//! Parity-check matrices over Z_q, their Tanner graphs and local
//! single-parity-check (SPC) codes.
//!
//! Indices are 0-based throughout the API; the alist text format is 1-based.
//! Within a row the support is kept in ascending column order and within a
//! column in ascending row order. Edges are numbered check-major: the edges
//! of row `j` are the contiguous range [`TannerGraph::row_edges`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ring::{RingError, Zq};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("malformed alist: {0}")]
    Malformed(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("entry value {value} at row {row}, column {col} is outside 1..{q}")]
    BadValue {
        row: usize,
        col: usize,
        value: usize,
        q: usize,
    },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("duplicate index {index} in {what} {block}")]
    Duplicate {
        what: &'static str,
        block: usize,
        index: usize,
    },
    #[error("column and row blocks describe different matrices")]
    SupportMismatch,
    #[error("empty row {0}")]
    EmptyRow(usize),
    #[error("word length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("row degree {degree} exceeds the enumeration guard {guard}")]
    GuardExceeded { degree: usize, guard: usize },
    #[error("cannot build a ({n}, {col_degree}, {row_degree}) regular graph: {reason}")]
    Construction {
        n: usize,
        col_degree: usize,
        row_degree: usize,
        reason: String,
    },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sparse parity-check matrix with both row and column adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    zq: Zq,
    row_start: Vec<usize>,
    edge_var: Vec<usize>,
    edge_coeff: Vec<usize>,
    col_support: Vec<Vec<usize>>,
    col_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Build from `(row, col, value)` triples. Rows must be nonempty and
    /// values nonzero residues.
    pub fn from_entries(
        n: usize,
        m: usize,
        q: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, CodeError> {
        let zq = Zq::new(q)?;
        let mut rows: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (row, col, value) in entries {
            if row >= m {
                return Err(CodeError::IndexOutOfRange { index: row, limit: m });
            }
            if col >= n {
                return Err(CodeError::IndexOutOfRange { index: col, limit: n });
            }
            if value == 0 || value >= q {
                return Err(CodeError::BadValue { row, col, value, q });
            }
            rows[row].push((col, value));
        }
        let mut row_start = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::new();
        let mut edge_coeff = Vec::new();
        row_start.push(0);
        for (j, row) in rows.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(CodeError::EmptyRow(j));
            }
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(CodeError::Duplicate {
                        what: "row",
                        block: j,
                        index: w[0].0,
                    });
                }
            }
            for &(c, v) in row.iter() {
                edge_var.push(c);
                edge_coeff.push(v);
            }
            row_start.push(edge_var.len());
        }
        let mut col_support = vec![Vec::new(); n];
        let mut col_edges = vec![Vec::new(); n];
        for j in 0..m {
            for e in row_start[j]..row_start[j + 1] {
                col_support[edge_var[e]].push(j);
                col_edges[edge_var[e]].push(e);
            }
        }
        Ok(TannerGraph {
            n,
            m,
            zq,
            row_start,
            edge_var,
            edge_coeff,
            col_support,
            col_edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.zq.q()
    }

    pub fn zq(&self) -> Zq {
        self.zq
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Edge ids of row `j`, in ascending column order.
    pub fn row_edges(&self, j: usize) -> Range<usize> {
        self.row_start[j]..self.row_start[j + 1]
    }

    /// Columns with a nonzero entry in row `j`.
    pub fn row_support(&self, j: usize) -> &[usize] {
        &self.edge_var[self.row_edges(j)]
    }

    /// Coefficients of row `j`, matching [`row_support`](Self::row_support).
    pub fn row_coefficients(&self, j: usize) -> &[usize] {
        &self.edge_coeff[self.row_edges(j)]
    }

    /// Rows with a nonzero entry in column `i`.
    pub fn col_support(&self, i: usize) -> &[usize] {
        &self.col_support[i]
    }

    /// Edge ids of column `i`, in ascending row order.
    pub fn col_edges(&self, i: usize) -> &[usize] {
        &self.col_edges[i]
    }

    pub fn row_degree(&self, j: usize) -> usize {
        self.row_start[j + 1] - self.row_start[j]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn edge_coeff(&self, e: usize) -> usize {
        self.edge_coeff[e]
    }

    /// Edge id of `(i, j)`, if column `i` is in the support of row `j`.
    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        if j >= self.m {
            return None;
        }
        let r = self.row_edges(j);
        self.edge_var[r.clone()]
            .binary_search(&i)
            .ok()
            .map(|k| r.start + k)
    }

    /// `H[j][i]`, or `None` off the support.
    pub fn coeff(&self, j: usize, i: usize) -> Option<usize> {
        self.edge_id(i, j).map(|e| self.edge_coeff[e])
    }

    /// All entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.m).flat_map(move |j| {
            self.row_edges(j)
                .map(move |e| (j, self.edge_var[e], self.edge_coeff[e]))
        })
    }

    pub fn max_row_degree(&self) -> usize {
        (0..self.m).map(|j| self.row_degree(j)).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        self.col_support.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_codeword(&self, word: &[usize]) -> bool {
        syndrome(word, self).is_ok_and(|s| s.iter().all(|&x| x == 0))
    }
}

/// `word · Hᵀ` over Z_q.
pub fn syndrome(word: &[usize], graph: &TannerGraph) -> Result<Vec<usize>, CodeError> {
    if word.len() != graph.n {
        return Err(CodeError::LengthMismatch {
            expected: graph.n,
            got: word.len(),
        });
    }
    let zq = graph.zq;
    Ok((0..graph.m)
        .map(|j| {
            graph
                .row_edges(j)
                .fold(0, |acc, e| zq.add(acc, zq.mul(word[graph.edge_var[e]] % zq.q(), graph.edge_coeff[e])))
        })
        .collect())
}

/// The local single-parity-check code of one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpcCode {
    zq: Zq,
    positions: Vec<usize>,
    coefficients: Vec<usize>,
}

pub const DEFAULT_ENUMERATION_GUARD: usize = 10;

impl SpcCode {
    pub fn new(zq: Zq, positions: Vec<usize>, coefficients: Vec<usize>) -> Result<Self, CodeError> {
        if positions.len() != coefficients.len() {
            return Err(CodeError::LengthMismatch {
                expected: positions.len(),
                got: coefficients.len(),
            });
        }
        if let Some(&v) = coefficients.iter().find(|&&c| c == 0 || c >= zq.q()) {
            return Err(CodeError::BadValue {
                row: 0,
                col: 0,
                value: v,
                q: zq.q(),
            });
        }
        Ok(SpcCode {
            zq,
            positions,
            coefficients,
        })
    }

    /// An SPC code on local positions `0..coefficients.len()`.
    pub fn from_coefficients(zq: Zq, coefficients: Vec<usize>) -> Result<Self, CodeError> {
        let positions = (0..coefficients.len()).collect();
        SpcCode::new(zq, positions, coefficients)
    }

    pub fn zq(&self) -> Zq {
        self.zq
    }

    pub fn q(&self) -> usize {
        self.zq.q()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn coefficients(&self) -> &[usize] {
        &self.coefficients
    }

    pub fn satisfied_by(&self, word: &[usize]) -> bool {
        word.len() == self.degree()
            && word
                .iter()
                .zip(&self.coefficients)
                .fold(0, |acc, (&b, &h)| self.zq.add(acc, self.zq.mul(b, h)))
                == 0
    }

    /// Every local codeword, with the default enumeration guard.
    pub fn codewords(&self) -> Result<SpcCodewords<'_>, CodeError> {
        self.codewords_with_guard(DEFAULT_ENUMERATION_GUARD)
    }

    pub fn codewords_with_guard(&self, guard: usize) -> Result<SpcCodewords<'_>, CodeError> {
        let d = self.degree();
        if d > guard {
            return Err(CodeError::GuardExceeded { degree: d, guard });
        }
        let solve_last = d > 0 && self.zq.is_unit(self.coefficients[d - 1]);
        let free = if solve_last { d - 1 } else { d };
        Ok(SpcCodewords {
            code: self,
            solve_last,
            free,
            counter: vec![0; free],
            done: d == 0,
        })
    }
}

/// Odometer over local codewords. When the last coefficient is a unit the
/// last symbol is solved from the constraint, otherwise all `q^d` words are
/// filtered.
pub struct SpcCodewords<'a> {
    code: &'a SpcCode,
    solve_last: bool,
    free: usize,
    counter: Vec<usize>,
    done: bool,
}

impl SpcCodewords<'_> {
    fn advance(&mut self) {
        let q = self.code.q();
        for k in (0..self.free).rev() {
            self.counter[k] += 1;
            if self.counter[k] < q {
                return;
            }
            self.counter[k] = 0;
        }
        self.done = true;
    }
}

impl Iterator for SpcCodewords<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let zq = self.code.zq;
        while !self.done {
            let mut word = self.counter.clone();
            self.advance();
            if self.solve_last {
                let h = &self.code.coefficients;
                let partial = word
                    .iter()
                    .zip(h)
                    .fold(0, |acc, (&b, &c)| zq.add(acc, zq.mul(b, c)));
                let inv = zq.inv(h[h.len() - 1]).expect("unit coefficient");
                word.push(zq.mul(zq.neg(partial), inv));
                return Some(word);
            } else if self.code.satisfied_by(&word) {
                return Some(word);
            }
        }
        None
    }
}

/// The local SPC code of row `j` (0-based).
pub fn local_spc(graph: &TannerGraph, j: usize) -> Result<SpcCode, CodeError> {
    if j >= graph.m() {
        return Err(CodeError::IndexOutOfRange {
            index: j,
            limit: graph.m(),
        });
    }
    SpcCode::new(
        graph.zq(),
        graph.row_support(j).to_vec(),
        graph.row_coefficients(j).to_vec(),
    )
}

/// Lift a binary matrix to Z4: in every row the second and third nonzero
/// entries (ascending column order) become 3, all others 1.
pub fn lift_binary_matrix(binary: &TannerGraph) -> TannerGraph {
    let entries = (0..binary.m()).flat_map(|j| {
        binary
            .row_support(j)
            .iter()
            .enumerate()
            .map(move |(k, &i)| (j, i, if k == 1 || k == 2 { 3 } else { 1 }))
    });
    TannerGraph::from_entries(binary.n(), binary.m(), 4, entries)
        .expect("lifting preserves a valid support")
}

/// Parse the alist text formats.
///
/// A three-integer header `n m q` selects the nonbinary dialect with
/// `(index value)` pairs; a two-integer header `n m` selects the classic
/// binary dialect with bare indices. Blocks may be zero-padded to the
/// declared maximum degree or unpadded.
pub fn parse_alist(text: &str) -> Result<TannerGraph, CodeError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line = lines
        .next()
        .ok_or_else(|| CodeError::Malformed("empty input".into()))?;
    let header = parse_ints(header_line)?;
    let (n, m, q, has_q) = match header[..] {
        [n, m] => (n, m, 2, false),
        [n, m, q] => (n, m, q, true),
        _ => {
            return Err(CodeError::Malformed(format!(
                "header must be `n m` or `n m q`, got {} integers",
                header.len()
            )))
        }
    };
    if n == 0 || m == 0 || q < 2 {
        return Err(CodeError::Malformed(format!("bad header n={n} m={m} q={q}")));
    }
    let rest: Vec<usize> = lines
        .map(parse_ints)
        .collect::<Result<Vec<_>, _>>()?
        .concat();
    let mut cur = Cursor { data: &rest, pos: 0 };
    let max_col = cur.next()?;
    let max_row = cur.next()?;
    let col_deg = cur.take(n)?.to_vec();
    let row_deg = cur.take(m)?.to_vec();
    let col_sum: usize = col_deg.iter().sum();
    let row_sum: usize = row_deg.iter().sum();
    if col_sum != row_sum {
        return Err(CodeError::DegreeMismatch(format!(
            "column degrees sum to {col_sum}, row degrees to {row_sum}"
        )));
    }
    let remaining = rest.len() - cur.pos;
    let padded_slots = n * max_col + m * max_row;
    let exact_slots = col_sum + row_sum;
    let widths: &[usize] = if has_q && q > 2 { &[2] } else if has_q { &[2, 1] } else { &[1] };
    let layout = widths
        .iter()
        .flat_map(|&w| [(w, true), (w, false)])
        .find(|&(w, padded)| w * if padded { padded_slots } else { exact_slots } == remaining)
        .ok_or_else(|| {
            CodeError::DegreeMismatch(format!(
                "{remaining} entry tokens do not match the declared degrees"
            ))
        })?;
    let (width, padded) = layout;

    let mut read_block = |deg: usize, max: usize, limit: usize, what: &'static str, block: usize| {
        let slots = if padded { max } else { deg };
        if deg > slots {
            return Err(CodeError::DegreeMismatch(format!(
                "{what} {} declares degree {deg} above maximum {max}",
                block + 1
            )));
        }
        let raw = cur.take(slots * width)?;
        let mut out = Vec::with_capacity(deg);
        for (k, chunk) in raw.chunks(width).enumerate() {
            let index = chunk[0];
            let value = if width == 2 { chunk[1] } else { 1 };
            if index == 0 {
                if k < deg {
                    return Err(CodeError::DegreeMismatch(format!(
                        "{what} {} declares degree {deg} but has {k} entries",
                        block + 1
                    )));
                }
                continue;
            }
            if k >= deg {
                return Err(CodeError::DegreeMismatch(format!(
                    "{what} {} declares degree {deg} but has more entries",
                    block + 1
                )));
            }
            if index > limit {
                return Err(CodeError::IndexOutOfRange { index, limit });
            }
            out.push((index - 1, value));
        }
        let mut seen = BTreeSet::new();
        for &(i, _) in &out {
            if !seen.insert(i) {
                return Err(CodeError::Duplicate {
                    what,
                    block: block + 1,
                    index: i + 1,
                });
            }
        }
        Ok(out)
    };

    let mut from_cols = Vec::with_capacity(col_sum);
    for (c, &deg) in col_deg.iter().enumerate() {
        for (r, v) in read_block(deg, max_col, m, "column", c)? {
            from_cols.push((r, c, v));
        }
    }
    let mut from_rows = Vec::with_capacity(row_sum);
    for (r, &deg) in row_deg.iter().enumerate() {
        for (c, v) in read_block(deg, max_row, n, "row", r)? {
            from_rows.push((r, c, v));
        }
    }
    for &(row, col, value) in &from_rows {
        if value == 0 || value >= q {
            return Err(CodeError::BadValue {
                row: row + 1,
                col: col + 1,
                value,
                q,
            });
        }
    }
    from_cols.sort_unstable();
    from_rows.sort_unstable();
    if from_cols != from_rows {
        return Err(CodeError::SupportMismatch);
    }
    TannerGraph::from_entries(n, m, q, from_rows)
}

struct Cursor<'a> {
    data: &'a [usize],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<usize, CodeError> {
        Ok(self.take(1)?[0])
    }

    fn take(&mut self, k: usize) -> Result<&'a [usize], CodeError> {
        if self.pos + k > self.data.len() {
            return Err(CodeError::Malformed("unexpected end of input".into()));
        }
        let s = &self.data[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
}

fn parse_ints(line: &str) -> Result<Vec<usize>, CodeError> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CodeError::Malformed(format!("not a nonnegative integer: {t:?}")))
        })
        .collect()
}

/// Emit the nonbinary alist dialect, zero-padded to the maximum degrees.
pub fn emit_alist(graph: &TannerGraph) -> String {
    let mut s = String::new();
    let (n, m) = (graph.n(), graph.m());
    let (max_col, max_row) = (graph.max_col_degree(), graph.max_row_degree());
    let join = |v: Vec<String>| v.join(" ");
    let _ = writeln!(s, "{n} {m} {}", graph.q());
    let _ = writeln!(s, "{max_col} {max_row}");
    let _ = writeln!(
        s,
        "{}",
        join((0..n).map(|i| graph.col_support(i).len().to_string()).collect())
    );
    let _ = writeln!(
        s,
        "{}",
        join((0..m).map(|j| graph.row_degree(j).to_string()).collect())
    );
    for i in 0..n {
        let mut items: Vec<String> = graph
            .col_edges(i)
            .iter()
            .zip(graph.col_support(i))
            .map(|(&e, &j)| format!("{} {}", j + 1, graph.edge_coeff(e)))
            .collect();
        items.resize(max_col, "0 0".into());
        let _ = writeln!(s, "{}", join(items));
    }
    for j in 0..m {
        let mut items: Vec<String> = graph
            .row_support(j)
            .iter()
            .zip(graph.row_coefficients(j))
            .map(|(&i, &v)| format!("{} {v}", i + 1))
            .collect();
        items.resize(max_row, "0 0".into());
        let _ = writeln!(s, "{}", join(items));
    }
    s
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<TannerGraph, CodeError> {
    parse_alist(&std::fs::read_to_string(path)?)
}

pub fn write_alist(graph: &TannerGraph, path: impl AsRef<Path>) -> Result<(), CodeError> {
    std::fs::write(path, emit_alist(graph))?;
    Ok(())
}

/// Random binary `(col_degree, row_degree)`-regular parity-check matrix
/// with no repeated entries, followed by a bounded pass that breaks
/// length-4 cycles where a swap allows it.
pub fn random_regular(
    n: usize,
    col_degree: usize,
    row_degree: usize,
    seed: u64,
) -> Result<TannerGraph, CodeError> {
    let fail = |reason: &str| CodeError::Construction {
        n,
        col_degree,
        row_degree,
        reason: reason.to_string(),
    };
    if n == 0 || col_degree == 0 || row_degree == 0 || !(n * col_degree).is_multiple_of(row_degree) {
        return Err(fail("n * col_degree must be a positive multiple of row_degree"));
    }
    let m = n * col_degree / row_degree;
    if col_degree > m {
        return Err(fail("column degree exceeds the number of rows"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // socket k belongs to column k / col_degree and holds a row index
    let mut sockets: Vec<usize> = (0..m).flat_map(|r| std::iter::repeat_n(r, row_degree)).collect();
    sockets.shuffle(&mut rng);
    let e = sockets.len();

    let col_has = |s: &[usize], col: usize, row: usize, skip: usize| {
        (col * col_degree..(col + 1) * col_degree).any(|k| k != skip && s[k] == row)
    };

    // remove repeated (row, col) pairs by swapping sockets between columns
    let mut budget = 100 * e;
    loop {
        let bad = (0..e).find(|&k| col_has(&sockets, k / col_degree, sockets[k], k));
        let Some(k) = bad else { break };
        if budget == 0 {
            return Err(fail("could not remove repeated entries"));
        }
        budget -= 1;
        let other = rng.random_range(0..e);
        let (ck, co) = (k / col_degree, other / col_degree);
        if ck == co {
            continue;
        }
        if !col_has(&sockets, ck, sockets[other], k) && !col_has(&sockets, co, sockets[k], other) {
            sockets.swap(k, other);
        }
    }

    // best-effort removal of 4-cycles
    let four_cycle_socket = |s: &[usize]| -> Option<usize> {
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (k, &r) in s.iter().enumerate() {
            row_cols[r].push(k / col_degree);
        }
        let mut mark = vec![usize::MAX; n];
        for c in 0..n {
            for k in c * col_degree..(c + 1) * col_degree {
                for &other in &row_cols[s[k]] {
                    if other == c {
                        continue;
                    }
                    if mark[other] == c {
                        return Some(k);
                    }
                    mark[other] = c;
                }
            }
        }
        None
    };
    let mut rounds = 20 * e;
    while let Some(k) = four_cycle_socket(&sockets) {
        if rounds == 0 {
            break;
        }
        rounds -= 1;
        let other = rng.random_range(0..e);
        let (ck, co) = (k / col_degree, other / col_degree);
        if ck != co
            && !col_has(&sockets, ck, sockets[other], k)
            && !col_has(&sockets, co, sockets[k], other)
        {
            sockets.swap(k, other);
        }
    }

    TannerGraph::from_entries(
        n,
        m,
        2,
        sockets.iter().enumerate().map(|(k, &r)| (r, k / col_degree, 1)),
    )
}
