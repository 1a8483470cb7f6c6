//! Command-line front end for step-size sweeps.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use super::{emit_summary, emit_trace, run_sweep_with_traces, write_summary_csv, write_summary_json};
use super::{Algorithm, ExperimentSpec, SummaryFormat, DEFAULT_MU_SWEEP};
use crate::error::Error;
use crate::metrics::DEFAULT_TOLERANCE;
use crate::signal::FirSystem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Identify an unknown FIR plant from white-noise excitation across a sweep of
/// step sizes, writing one summary row per (mu, seed).
#[derive(Debug, Parser)]
#[command(name = "lms-sysid", version)]
struct Args {
    /// Plant coefficients.
    #[arg(long, value_delimiter = ',', default_value = "1,2", value_parser = finite_real)]
    plant: Vec<f64>,

    /// Adaptive filter taps.
    #[arg(long, default_value_t = 2, value_parser = positive_count)]
    taps: usize,

    /// Step sizes [default: the 28-value reference sweep 0.001..1].
    #[arg(long, value_delimiter = ',', value_parser = positive_real)]
    mu: Vec<f64>,

    #[arg(long, default_value_t = 1000, value_parser = positive_count)]
    iterations: usize,

    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,

    #[arg(long, value_enum, default_value_t = Algorithm::Lms)]
    algorithm: Algorithm,

    /// Block length for tdlms.
    #[arg(long, default_value_t = 8, value_parser = positive_count)]
    block_length: usize,

    /// Variance of noise added to the desired signal.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative_real)]
    noise_variance: f64,

    /// Relative band for convergence detection.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = positive_real)]
    tolerance: f64,

    /// Summary file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Directory for per-run trace CSVs.
    #[arg(long)]
    trace_dir: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = SummaryFormat::Csv)]
    format: SummaryFormat,
}

fn finite_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v = finite_real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

fn non_negative_real(s: &str) -> Result<f64, String> {
    let v = finite_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be >= 0, got {v}"))
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("{s:?} is not a positive integer")),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        Error::SingularMatrix { .. }
        | Error::NoConvergence { .. }
        | Error::DivisionByZero(_)
        | Error::UndefinedMisadjustment { .. }
        | Error::Numeric(_) => EXIT_NUMERIC,
    }
}

fn trace_file_name(algorithm: Algorithm, mu: f64, seed: u64) -> String {
    format!("trace_{}_mu{mu}_seed{seed}.csv", algorithm.name())
}

/// Parses `argv` (including the program name), runs the sweep and returns the
/// process exit code. Output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let msg = e.to_string();
            let _ = writeln!(stderr, "{}", msg.lines().next().unwrap_or("invalid arguments"));
            return EXIT_USAGE;
        }
    };

    match execute(args, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(args: Args, stdout: &mut dyn Write) -> crate::Result<()> {
    let plant = FirSystem::new(args.plant).map_err(|e| Error::invalid(format!("--plant: {e}")))?;
    let spec = ExperimentSpec {
        plant,
        taps: args.taps,
        mu_list: if args.mu.is_empty() { DEFAULT_MU_SWEEP.to_vec() } else { args.mu },
        iterations: args.iterations,
        seeds: args.seeds,
        algorithm: args.algorithm,
        block_length: args.block_length,
        noise_variance: args.noise_variance,
        tolerance: args.tolerance,
    };
    let results = run_sweep_with_traces(&spec)?;

    if let Some(dir) = &args.trace_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
        for (row, trace) in &results {
            emit_trace(trace, &dir.join(trace_file_name(spec.algorithm, row.mu, row.seed)))?;
        }
    }

    let rows: Vec<_> = results.into_iter().map(|(row, _)| row).collect();
    match &args.out {
        Some(path) => emit_summary(&rows, args.format, path),
        None => match args.format {
            SummaryFormat::Csv => write_summary_csv(&rows, stdout),
            SummaryFormat::Json => write_summary_json(&rows, stdout),
        },
    }
}
