use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use lclp::code::{emit_alist, lift_binary_matrix, random_regular, read_alist, write_alist, CodeError};
use lclp::ring::Kappa;
use lclp::selftest::{trellis_oracle_equivalence, EquivalenceParams};
use lclp::sim::{
    parse_ebn0_list, read_codewords, run_sweep_on, validate_codewords, DecoderChoice, SimConfig, SimError,
    Transmission, CSV_HEADER,
};

/// Nonbinary LDPC decoding by coordinate ascent on the LP dual, with a
/// min-sum baseline.
#[derive(Parser)]
#[command(name = "lclp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frame-error-rate sweep over Eb/N0 (QPSK, AWGN, all-zero codeword by default).
    Simulate {
        #[arg(long)]
        code: PathBuf,
        /// lclp, ms or both
        #[arg(long, default_value = "both")]
        decoder: String,
        /// Positive smoothing constant, or "inf"
        #[arg(long, default_value = "inf")]
        kappa: String,
        /// Comma list `a,b,c` or range `start:stop:step` in dB
        #[arg(long)]
        ebn0: String,
        #[arg(long, default_value_t = 64)]
        max_iters: usize,
        #[arg(long, default_value_t = 100)]
        target_errors: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output, appended to and resumed from; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lift a binary matrix to Z4 before simulating
        #[arg(long)]
        lift: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Send codewords from this file (one per line) instead of all-zero
        #[arg(long)]
        codewords: Option<PathBuf>,
    },
    /// Parse and validate an alist file.
    Check {
        #[arg(long)]
        code: PathBuf,
    },
    /// Cross-check trellis marginals against brute-force enumeration.
    OracleSelftest {
        /// Random cost sets per (q, degree) pair
        #[arg(long, default_value_t = 200)]
        sets: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Lift a binary alist to Z4.
    Lift {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write a random binary regular parity-check matrix.
    RandomRegular {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        col_degree: usize,
        #[arg(long, default_value_t = 6)]
        row_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lift the result to Z4
        #[arg(long)]
        lift: bool,
        #[arg(long)]
        output: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SimError>() {
            return if e.is_io() { EXIT_IO } else { EXIT_CONFIG };
        }
        if let Some(CodeError::Io(_)) = cause.downcast_ref::<CodeError>() {
            return EXIT_IO;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_CONFIG
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            code,
            decoder,
            kappa,
            ebn0,
            max_iters,
            target_errors,
            max_frames,
            seed,
            out,
            lift,
            threads,
            codewords,
        } => {
            let decoder: DecoderChoice = decoder.parse()?;
            let kappa: Kappa = kappa.parse().map_err(|e| SimError::Config(format!("{e}")))?;
            let mut graph = read_alist(&code).with_context(|| format!("loading {}", code.display()))?;
            if lift {
                graph = lift_binary_matrix(&graph);
            }
            let transmission = match codewords {
                None => Transmission::AllZero,
                Some(path) => {
                    let words = read_codewords(&path)?;
                    validate_codewords(&graph, &words)?;
                    Transmission::Codewords(words)
                }
            };
            let config = SimConfig {
                code_path: code,
                decoder,
                kappa,
                ebn0_db: parse_ebn0_list(&ebn0)?,
                max_iterations: max_iters,
                target_frame_errors: target_errors,
                max_frames,
                base_seed: seed,
                output_path: out.clone(),
                threads,
                transmission,
            };
            let records = run_sweep_on(&graph, &config)?;
            if out.is_none() {
                let mut stdout = std::io::stdout().lock();
                writeln!(stdout, "{}", CSV_HEADER.join(","))?;
                for r in &records {
                    writeln!(stdout, "{}", r.to_row().join(","))?;
                }
            } else {
                for r in &records {
                    eprintln!(
                        "{} {:>6} dB  frames {:>8}  errors {:>4}  fer {:.3e}",
                        r.decoder, r.ebn0_db, r.frames, r.frame_errors, r.fer
                    );
                }
            }
            Ok(())
        }
        Command::Check { code } => {
            let g = read_alist(&code).with_context(|| format!("loading {}", code.display()))?;
            let rows: Vec<usize> = (0..g.m()).map(|j| g.row_degree(j)).collect();
            let cols: Vec<usize> = (0..g.n()).map(|i| g.col_support(i).len()).collect();
            println!("n = {}, m = {}, q = {}, edges = {}", g.n(), g.m(), g.q(), g.num_edges());
            println!(
                "row degree {}..{}, column degree {}..{}",
                rows.iter().min().unwrap_or(&0),
                rows.iter().max().unwrap_or(&0),
                cols.iter().min().unwrap_or(&0),
                cols.iter().max().unwrap_or(&0)
            );
            if let Some(i) = cols.iter().position(|&c| c == 0) {
                eprintln!("warning: column {i} takes part in no check");
            }
            Ok(())
        }
        Command::OracleSelftest { sets, seed } => {
            let params = EquivalenceParams {
                sets,
                seed,
                ..Default::default()
            };
            let start = std::time::Instant::now();
            let r = trellis_oracle_equivalence(&params)?;
            println!(
                "{} local codes, {} marginals compared in {:.1} s",
                r.instances,
                r.comparisons,
                start.elapsed().as_secs_f64()
            );
            println!("sum-product max relative error {:.3e} (limit 1e-9)", r.max_sum_product_rel);
            println!("min-sum max absolute error     {:.3e} (limit 1e-12)", r.max_min_sum_abs);
            if !r.passes(1e-9, 1e-12) {
                bail!("trellis and enumeration disagree ({} infeasibility mismatches)", r.infeasibility_mismatches);
            }
            println!("ok");
            Ok(())
        }
        Command::Lift { input, output } => {
            let g = read_alist(&input).with_context(|| format!("loading {}", input.display()))?;
            if g.q() != 2 {
                bail!("{} is not a binary matrix (q = {})", input.display(), g.q());
            }
            write_alist(&lift_binary_matrix(&g), &output).with_context(|| format!("writing {}", output.display()))?;
            Ok(())
        }
        Command::RandomRegular {
            n,
            col_degree,
            row_degree,
            seed,
            lift,
            output,
        } => {
            let mut g = random_regular(n, col_degree, row_degree, seed)?;
            if lift {
                g = lift_binary_matrix(&g);
            }
            std::fs::write(&output, emit_alist(&g)).with_context(|| format!("writing {}", output.display()))?;
            Ok(())
        }
    }
}
