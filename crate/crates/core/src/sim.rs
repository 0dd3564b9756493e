//! Monte-Carlo frame-error simulation over an Eb/N0 sweep.
//!
//! Frame `f` of every point draws its noise (and codeword, when a codeword
//! list is supplied) from a ChaCha8 stream seeded with `base_seed + f`.
//! Frames are decoded in parallel in fixed-size batches and tallied in frame
//! order, stopping at the frame that reaches the error target, so the counts
//! do not depend on the number of threads.

use std::collections::HashSet;
use std::fmt;
use std::fs::OpenOptions;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{add_noise, ebn0_to_sigma, llrs, modulate, ChannelConfig, ChannelError};
use crate::code::{read_alist, CodeError, TannerGraph};
use crate::lclp::{decode, DecodeError};
use crate::ms::ms_decode;
use crate::ring::Kappa;

pub const CSV_HEADER: [&str; 9] = [
    "decoder",
    "ebn0_db",
    "frames",
    "frame_errors",
    "symbol_errors",
    "fer",
    "ser",
    "mean_iterations",
    "wall_seconds",
];

const BATCH: u64 = 64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl SimError {
    /// Whether the failure came from the file system rather than the
    /// configuration.
    pub fn is_io(&self) -> bool {
        match self {
            SimError::Io { .. } => true,
            SimError::Csv(e) => e.is_io_error(),
            SimError::Code(CodeError::Io(_)) => true,
            _ => false,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Lclp,
    Ms,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Lclp => "lclp",
            DecoderKind::Ms => "ms",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "lclp" => Ok(DecoderKind::Lclp),
            "ms" => Ok(DecoderKind::Ms),
            _ => Err(SimError::Config(format!("unknown decoder `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderChoice {
    Lclp,
    Ms,
    Both,
}

impl DecoderChoice {
    pub fn kinds(&self) -> Vec<DecoderKind> {
        match self {
            DecoderChoice::Lclp => vec![DecoderKind::Lclp],
            DecoderChoice::Ms => vec![DecoderKind::Ms],
            DecoderChoice::Both => vec![DecoderKind::Lclp, DecoderKind::Ms],
        }
    }
}

impl FromStr for DecoderChoice {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "lclp" => Ok(DecoderChoice::Lclp),
            "ms" => Ok(DecoderChoice::Ms),
            "both" => Ok(DecoderChoice::Both),
            _ => Err(SimError::Config(format!("unknown decoder `{s}` (lclp, ms, both)"))),
        }
    }
}

/// What is sent in each frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Transmission {
    #[default]
    AllZero,
    /// One of these codewords, drawn uniformly from the frame's stream.
    Codewords(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code_path: PathBuf,
    pub decoder: DecoderChoice,
    pub kappa: Kappa,
    pub ebn0_db: Vec<f64>,
    pub max_iterations: usize,
    pub target_frame_errors: u64,
    pub max_frames: u64,
    pub base_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub transmission: Transmission,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            code_path: PathBuf::new(),
            decoder: DecoderChoice::Both,
            kappa: Kappa::Infinite,
            ebn0_db: Vec::new(),
            max_iterations: 64,
            target_frame_errors: 100,
            max_frames: 1_000_000,
            base_seed: 0,
            output_path: None,
            threads: None,
            transmission: Transmission::AllZero,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.ebn0_db.is_empty() {
            return Err(SimError::Config("empty Eb/N0 list".into()));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(SimError::Config("non-finite Eb/N0 value".into()));
        }
        if self.max_iterations == 0 || self.target_frame_errors == 0 || self.max_frames == 0 {
            return Err(SimError::Config(
                "max iterations, target errors and max frames must be positive".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(SimError::Config("thread count must be positive".into()));
        }
        if let Kappa::Finite(k) = self.kappa {
            if !(k > 0.0 && k.is_finite()) {
                return Err(SimError::Config(format!("kappa must be positive, got {k}")));
            }
        }
        if let Transmission::Codewords(list) = &self.transmission {
            if list.is_empty() {
                return Err(SimError::Config("empty codeword list".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub decoder: DecoderKind,
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub symbol_errors: u64,
    pub fer: f64,
    pub ser: f64,
    pub mean_iterations: f64,
    pub wall_seconds: f64,
}

impl SimRecord {
    /// Everything but the wall-clock time.
    pub fn counts(&self) -> (DecoderKind, u64, u64, u64, u64) {
        (
            self.decoder,
            self.ebn0_db.to_bits(),
            self.frames,
            self.frame_errors,
            self.symbol_errors,
        )
    }

    pub fn to_row(&self) -> Vec<String> {
        vec![
            self.decoder.to_string(),
            self.ebn0_db.to_string(),
            self.frames.to_string(),
            self.frame_errors.to_string(),
            self.symbol_errors.to_string(),
            format!("{:e}", self.fer),
            format!("{:e}", self.ser),
            format!("{:.4}", self.mean_iterations),
            format!("{:.3}", self.wall_seconds),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub frame_error: bool,
    pub symbol_errors: usize,
    pub iterations: usize,
}

/// Rate of the code assuming a full-rank parity-check matrix.
pub fn design_rate(graph: &TannerGraph) -> f64 {
    1.0 - graph.m() as f64 / graph.n() as f64
}

/// Check every codeword against the graph.
pub fn validate_codewords(graph: &TannerGraph, words: &[Vec<usize>]) -> Result<(), SimError> {
    for (k, w) in words.iter().enumerate() {
        if w.len() != graph.n() || w.iter().any(|&x| x >= graph.q()) || !graph.is_codeword(w) {
            return Err(SimError::Config(format!("entry {k} of the codeword list is not a codeword")));
        }
    }
    Ok(())
}

/// Read a codeword list: one word per line, symbols separated by
/// whitespace; `#` starts a comment.
pub fn read_codewords(path: &Path) -> Result<Vec<Vec<usize>>, SimError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut words = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        words.push(w.map_err(|_| SimError::Config(format!("bad codeword line `{line}`")))?);
    }
    Ok(words)
}

/// Simulate one frame: modulate, add noise, compute LLRs, decode.
pub fn simulate_frame(
    graph: &TannerGraph,
    config: &SimConfig,
    sigma: f64,
    decoder: DecoderKind,
    frame: u64,
) -> Result<FrameOutcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.base_seed.wrapping_add(frame));
    let zero;
    let sent: &[usize] = match &config.transmission {
        Transmission::AllZero => {
            zero = vec![0; graph.n()];
            &zero
        }
        Transmission::Codewords(list) => &list[rng.random_range(0..list.len())],
    };
    let channel = ChannelConfig::qpsk(sigma, config.base_seed)?;
    let y = add_noise(&modulate(sent, graph.q())?, &channel, &mut rng)?;
    let llr = llrs(&y, &channel);
    let result = match decoder {
        DecoderKind::Lclp => decode(graph, &llr, config.kappa, config.max_iterations)?,
        DecoderKind::Ms => ms_decode(graph, &llr, config.max_iterations)?,
    };
    let symbol_errors = result.word.iter().zip(sent).filter(|(a, b)| a != b).count();
    Ok(FrameOutcome {
        frame_error: symbol_errors > 0,
        symbol_errors,
        iterations: result.iterations_used,
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SimError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Simulate one Eb/N0 point until the frame-error target or the frame cap.
pub fn run_point(
    graph: &TannerGraph,
    config: &SimConfig,
    ebn0_db: f64,
    decoder: DecoderKind,
) -> Result<SimRecord, SimError> {
    config.validate()?;
    if let Transmission::Codewords(list) = &config.transmission {
        validate_codewords(graph, list)?;
    }
    let start = Instant::now();
    let sigma = ebn0_to_sigma(ebn0_db, design_rate(graph), (graph.q() as f64).log2())?;
    let (frames, frame_errors, symbol_errors, iterations) = with_pool(config.threads, || {
        let (mut frames, mut errors, mut symbols, mut iterations) = (0u64, 0u64, 0u64, 0u64);
        while frames < config.max_frames && errors < config.target_frame_errors {
            let end = (frames + BATCH).min(config.max_frames);
            let batch: Vec<FrameOutcome> = (frames..end)
                .into_par_iter()
                .map(|f| simulate_frame(graph, config, sigma, decoder, f))
                .collect::<Result<_, _>>()?;
            for o in batch {
                frames += 1;
                symbols += o.symbol_errors as u64;
                iterations += o.iterations as u64;
                if o.frame_error {
                    errors += 1;
                    if errors == config.target_frame_errors {
                        break;
                    }
                }
            }
        }
        Ok::<_, SimError>((frames, errors, symbols, iterations))
    })??;
    Ok(SimRecord {
        decoder,
        ebn0_db,
        frames,
        frame_errors,
        symbol_errors,
        fer: frame_errors as f64 / frames as f64,
        ser: symbol_errors as f64 / (frames as f64 * graph.n() as f64),
        mean_iterations: iterations as f64 / frames as f64,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// `(decoder, Eb/N0)` pairs already present in an output file.
pub fn completed_points(path: &Path) -> Result<HashSet<(DecoderKind, u64)>, SimError> {
    let mut done = HashSet::new();
    if !path.exists() {
        return Ok(done);
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    for row in reader.records() {
        let row = row?;
        let (Some(d), Some(e)) = (row.get(0), row.get(1)) else {
            continue;
        };
        // a torn final line from an interrupted run is skipped
        if row.len() != CSV_HEADER.len() {
            continue;
        }
        if let (Ok(d), Ok(e)) = (d.parse::<DecoderKind>(), e.parse::<f64>()) {
            done.insert((d, e.to_bits()));
        }
    }
    Ok(done)
}

/// Run every requested point, appending one CSV row per finished point and
/// skipping points already in the output file. Returns the new records.
pub fn run_sweep_on(graph: &TannerGraph, config: &SimConfig) -> Result<Vec<SimRecord>, SimError> {
    config.validate()?;
    let done = match &config.output_path {
        Some(p) => completed_points(p)?,
        None => HashSet::new(),
    };
    let mut writer = match &config.output_path {
        Some(p) => {
            let fresh = std::fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true);
            let file = OpenOptions::new().create(true).append(true).open(p).map_err(io_err(p))?;
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            if fresh {
                w.write_record(CSV_HEADER)?;
                w.flush().map_err(io_err(p))?;
            }
            Some((w, p.clone()))
        }
        None => None,
    };
    let mut records = Vec::new();
    for &ebn0 in &config.ebn0_db {
        for decoder in config.decoder.kinds() {
            if done.contains(&(decoder, ebn0.to_bits())) {
                continue;
            }
            let record = run_point(graph, config, ebn0, decoder)?;
            if let Some((w, p)) = writer.as_mut() {
                w.write_record(record.to_row())?;
                w.flush().map_err(io_err(p))?;
            }
            records.push(record);
        }
    }
    Ok(records)
}

/// Load the code named in the configuration and run the sweep.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<SimRecord>, SimError> {
    config.validate()?;
    let graph = read_alist(&config.code_path)?;
    run_sweep_on(&graph, config)
}

/// Parse `a,b,c` or `start:stop:step` (stop included when hit within
/// rounding).
pub fn parse_ebn0_list(s: &str) -> Result<Vec<f64>, SimError> {
    let bad = || SimError::Config(format!("bad Eb/N0 list `{s}`"));
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // rounded to 1e-9 so that 0.1-style steps print cleanly
        return Ok((0..count)
            .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    let values: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}
