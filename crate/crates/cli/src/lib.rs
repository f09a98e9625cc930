//! Command-line front end for the ω toolkit.
//!
//! Every command builds a serializable report, then renders it as text,
//! JSON or CSV. Exit codes: 0 success, 1 internal error, 2 invalid input,
//! 3 verification mismatch.

pub mod bench;
pub mod report;

use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_core::oracle::{self, OracleError};
use omega_core::{omega_j, BoundMode, NumericalSemigroup, OmegaError, OmegaOptions, OmegaResult, SemigroupError};
use thiserror::Error;

use crate::report::{GeneratorReport, InvariantsReport, OmegaReport, OptionsReport, Verdict, VerifyReport, VerifyRow};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invalid semigroup: {0}")]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("output failed: {0}")]
    Io(#[from] io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Semigroup(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nsomega", version, about = "Compute the omega invariant of numerical semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute ω(S) and ω(S, n_j) for each generator
    Omega {
        #[command(flatten)]
        gens: GensArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Only compute ω(S, n_j) for this generator
        #[arg(long, value_name = "N_J")]
        generator: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include the per-iteration trace
        #[arg(long)]
        trace: bool,
    },
    /// Multiplicity, Frobenius number, genus and Apéry sets
    Invariants {
        #[command(flatten)]
        gens: GensArg,
        /// Also print the Apéry set of this element
        #[arg(long, value_name = "N")]
        apery: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare the algorithm against brute-force enumeration
    Verify {
        #[command(flatten)]
        gens: GensArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Only verify this generator
        #[arg(long, value_name = "N_J")]
        generator: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run every semigroup of an instance file
    Bench {
        /// Instance file: one comma-separated generator list per line, `#` starts a comment
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also count minimal elements by enumeration where the box is small enough
        #[arg(long)]
        oracle: bool,
        /// Largest box the oracle will enumerate
        #[arg(long, default_value_t = 50_000_000, value_name = "POINTS")]
        oracle_limit: u128,
        /// Time limit per generator in seconds
        #[arg(long, value_name = "SECONDS")]
        timeout: Option<f64>,
        #[arg(long, value_enum, default_value_t = BenchFormat::Csv)]
        format: BenchFormat,
    },
}

/// A parsed `--gens` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorList(pub Vec<u64>);

#[derive(Debug, Args)]
pub struct GensArg {
    /// Minimal generators, comma separated
    #[arg(long, value_name = "LIST", value_parser = |t: &str| parse_generators(t).map(GeneratorList))]
    pub gens: GeneratorList,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = BoundModeArg::Tight)]
    pub bound_mode: BoundModeArg,
    /// Bound Σ n_i y_i by the multiplicity and the largest Apéry element
    #[arg(long)]
    pub apery_cuts: bool,
    /// Extra room added to each big-M constant
    #[arg(long, default_value_t = 0, value_name = "K")]
    pub big_m_slack: u64,
    /// Do not require exclusion points to beat the current best length
    #[arg(long)]
    pub no_length_cut: bool,
    /// Worker threads, one generator at a time each
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundModeArg {
    Tight,
    Loose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Csv,
    Json,
}

impl SolverArgs {
    pub fn options(&self) -> OmegaOptions {
        OmegaOptions {
            bound_mode: match self.bound_mode {
                BoundModeArg::Tight => BoundMode::Tight,
                BoundModeArg::Loose => BoundMode::Loose,
            },
            apery_cuts: self.apery_cuts,
            big_m_slack: self.big_m_slack,
            length_cut: !self.no_length_cut,
            deadline: None,
        }
    }

    pub fn report(&self) -> OptionsReport {
        OptionsReport { solver: self.options(), jobs: self.jobs.max(1) }
    }
}

/// Parses `"6,13,14"`; spaces around entries are allowed.
pub fn parse_generators(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<u64>().map_err(|_| format!("`{part}` is not a non-negative integer"))
        })
        .collect()
}

/// One finished ω(S, n_j) computation with its wall time.
#[derive(Debug)]
pub struct Timed {
    pub index: usize,
    pub result: Result<OmegaResult, OmegaError>,
    pub millis: u64,
}

/// Runs ω(S, n_j) for each index on up to `jobs` threads. Results come back
/// in the order of `indices`. A timeout sets a fresh deadline per generator.
pub fn solve_generators(
    s: &NumericalSemigroup,
    indices: &[usize],
    options: &OmegaOptions,
    jobs: usize,
    timeout: Option<Duration>,
) -> Vec<Timed> {
    let run_one = |index: usize| {
        let start = Instant::now();
        let opts = OmegaOptions { deadline: timeout.map(|t| start + t), ..options.clone() };
        let result = omega_j(s, index, &opts);
        Timed { index, result, millis: start.elapsed().as_millis() as u64 }
    };
    let jobs = jobs.clamp(1, indices.len().max(1));
    if jobs == 1 {
        return indices.iter().map(|&j| run_one(j)).collect();
    }
    let next = AtomicUsize::new(0);
    let mut done: Vec<(usize, Timed)> = thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let slot = next.fetch_add(1, Ordering::Relaxed);
                        let Some(&j) = indices.get(slot) else { break };
                        out.push((slot, run_one(j)));
                    }
                    out
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("worker thread panicked")).collect()
    });
    done.sort_by_key(|(slot, _)| *slot);
    done.into_iter().map(|(_, t)| t).collect()
}

fn semigroup(gens: &[u64]) -> Result<NumericalSemigroup, CliError> {
    Ok(NumericalSemigroup::new(gens)?)
}

fn selected_indices(s: &NumericalSemigroup, generator: Option<u64>) -> Result<Vec<usize>, CliError> {
    match generator {
        None => Ok((0..s.embedding_dimension()).collect()),
        Some(g) => s
            .generators()
            .iter()
            .position(|&n| n == g)
            .map(|j| vec![j])
            .ok_or_else(|| CliError::Input(format!("{g} is not a minimal generator of {s}"))),
    }
}

pub fn omega_report(
    gens: &[u64],
    solver: &SolverArgs,
    generator: Option<u64>,
    trace: bool,
) -> Result<OmegaReport, CliError> {
    let s = semigroup(gens)?;
    let indices = selected_indices(&s, generator)?;
    let mut per_generator = Vec::with_capacity(indices.len());
    for timed in solve_generators(&s, &indices, &solver.options(), solver.jobs, None) {
        per_generator.push(GeneratorReport::new(timed.result?, timed.millis, trace));
    }
    Ok(OmegaReport {
        generators: s.generators().to_vec(),
        omega: per_generator.iter().map(|g| g.omega).max().unwrap_or(0),
        per_generator,
        options: solver.report(),
    })
}

pub fn invariants_report(gens: &[u64], apery: Option<u64>) -> Result<InvariantsReport, CliError> {
    let s = semigroup(gens)?;
    let apery = apery.map(|n| s.apery(n)).transpose()?;
    Ok(InvariantsReport {
        generators: s.generators().to_vec(),
        embedding_dimension: s.embedding_dimension(),
        multiplicity: s.multiplicity(),
        frobenius: s.frobenius(),
        genus: s.genus(),
        apery,
    })
}

pub fn verify_report(gens: &[u64], solver: &SolverArgs, generator: Option<u64>) -> Result<VerifyReport, CliError> {
    let s = semigroup(gens)?;
    let indices = selected_indices(&s, generator)?;
    let mut rows = Vec::with_capacity(indices.len());
    for timed in solve_generators(&s, &indices, &solver.options(), solver.jobs, None) {
        let result = timed.result?;
        let minimals = oracle::minimals_of_z(&s, timed.index)?;
        let oracle_omega = minimals.iter().map(|x| x.length()).max().unwrap_or(0);
        let found_minimal = result.minimals_found.iter().all(|x| minimals.contains(x));
        let status = if result.omega == oracle_omega && found_minimal { Verdict::Match } else { Verdict::Mismatch };
        rows.push(VerifyRow {
            n: result.generator,
            omega: result.omega,
            oracle_omega,
            minimal_count: minimals.len(),
            ek_solves: result.ek_solves,
            status,
        });
    }
    let status = if rows.iter().all(|r| r.status == Verdict::Match) { Verdict::Match } else { Verdict::Mismatch };
    Ok(VerifyReport { generators: s.generators().to_vec(), per_generator: rows, status })
}

/// Runs a parsed command, writing the report to `out`. Returns the exit code
/// for successful runs; errors carry their own via [`CliError::exit_code`].
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Omega { gens, solver, generator, format, trace } => {
            let report = omega_report(&gens.gens.0, solver, *generator, *trace)?;
            match format {
                Format::Text => report.write_text(out)?,
                Format::Json => write_json(out, &report)?,
            }
            Ok(EXIT_OK)
        }
        Command::Invariants { gens, apery, format } => {
            let report = invariants_report(&gens.gens.0, *apery)?;
            match format {
                Format::Text => report.write_text(out)?,
                Format::Json => write_json(out, &report)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { gens, solver, generator, format } => {
            let report = verify_report(&gens.gens.0, solver, *generator)?;
            match format {
                Format::Text => report.write_text(out)?,
                Format::Json => write_json(out, &report)?,
            }
            Ok(if report.status == Verdict::Match { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Bench { path, solver, oracle, oracle_limit, timeout, format } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let instances = bench::parse_instances(&text)?;
            let timeout = timeout
                .map(|t| Duration::try_from_secs_f64(t).map_err(|_| CliError::Input(format!("invalid timeout {t}"))))
                .transpose()?;
            let limit = oracle.then_some(*oracle_limit);
            let report = bench::run_bench(&instances, solver, limit, timeout)?;
            match format {
                BenchFormat::Csv => report.write_csv(out)?,
                BenchFormat::Json => write_json(out, &report)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
