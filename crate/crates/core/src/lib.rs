//! Nonbinary LDPC decoding over `Z_q`.
//!
//! * [`lclp`]: coordinate ascent on the smoothed LP dual, with check-node
//!   marginals computed on the trellis of each local parity check.
//! * [`ms`]: a flooding min-sum decoder sharing the same trellis engine.
//! * [`trellis`], [`semiring`]: forward/backward recursions over a generic
//!   semiring. [`oracle`] enumerates local codewords for cross-checks.
//! * [`code`], [`channel`], [`sim`]: parity-check matrices, QPSK over AWGN
//!   and the Monte-Carlo harness.
//!
//! Symbols are plain `usize` residues. Cost vectors store `q - 1` entries
//! per position, entry `k` for symbol `k + 1`; symbol 0 costs nothing.

pub mod channel;
pub mod code;
pub mod lclp;
pub mod ms;
pub mod oracle;
pub mod ring;
pub mod selftest;
pub mod semiring;
pub mod sim;
pub mod trellis;
