//! System-identification experiments: drive an algorithm over a step-size
//! sweep, time the adaptation loop and summarise each run.

pub mod cli;
mod output;

use std::time::Instant;

use rayon::prelude::*;

use crate::adapt::{lms_run, tdlms_run, LmsConfig, RunTrace};
use crate::error::{Error, Result};
use crate::estimation::{estimate_correlation, newton_step, sda_run, Trajectory};
use crate::linalg::dot;
use crate::metrics::{accuracy, convergence_iteration, mse, DEFAULT_TOLERANCE};
use crate::signal::{
    add_noise, block_circular_filter, fill_taps, fir_filter, generate_white_gaussian, FirSystem,
};

pub use output::{
    emit_summary, emit_trace, read_summary_csv, read_summary_json, read_trace_csv, summary_header,
    write_summary_csv, write_summary_json, write_trace_csv, TraceTable,
};

/// Step sizes of the reference results table, smallest to largest.
pub const DEFAULT_MU_SWEEP: [f64; 28] = [
    0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009, 0.01, 0.02, 0.03, 0.04, 0.05,
    0.06, 0.07, 0.08, 0.09, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Lms,
    Sda,
    Newton,
    Tdlms,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Lms => "lms",
            Algorithm::Sda => "sda",
            Algorithm::Newton => "newton",
            Algorithm::Tdlms => "tdlms",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SummaryFormat {
    Csv,
    Json,
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub plant: FirSystem,
    pub taps: usize,
    pub mu_list: Vec<f64>,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub algorithm: Algorithm,
    /// Block length for `tdlms`.
    pub block_length: usize,
    pub noise_variance: f64,
    pub tolerance: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            plant: FirSystem::new(vec![1.0, 2.0]).expect("static plant"),
            taps: 2,
            mu_list: DEFAULT_MU_SWEEP.to_vec(),
            iterations: 1000,
            seeds: vec![1],
            algorithm: Algorithm::Lms,
            block_length: 8,
            noise_variance: 0.0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mu_list.is_empty() {
            return Err(Error::invalid("mu list is empty"));
        }
        if let Some(mu) = self.mu_list.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::invalid(format!("mu must be finite and > 0, got {mu}")));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if self.taps == 0 {
            return Err(Error::invalid("taps must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("seed list is empty"));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be >= 0, got {}",
                self.noise_variance
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.algorithm == Algorithm::Tdlms {
            if self.block_length == 0 {
                return Err(Error::invalid("block length must be at least 1"));
            }
            if self.plant.order() > self.block_length {
                return Err(Error::invalid(format!(
                    "plant order {} exceeds block length {}",
                    self.plant.order(),
                    self.block_length
                )));
            }
            if self.iterations < self.block_length {
                return Err(Error::invalid(format!(
                    "{} iterations do not fill one block of {}",
                    self.iterations, self.block_length
                )));
            }
        }
        Ok(())
    }
}

/// One summary record per (mu, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mu: f64,
    pub seed: u64,
    pub iterations: usize,
    pub mse: f64,
    pub final_weights: Vec<f64>,
    pub final_squared_error: f64,
    pub per_coefficient_convergence: Vec<Option<usize>>,
    pub combined_convergence: Option<usize>,
    pub accuracy_percent: Option<f64>,
    pub elapsed_seconds: f64,
    pub diverged: bool,
}

/// Excitation and desired signal for a run, before any adaptation.
pub fn experiment_signals(spec: &ExperimentSpec, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = generate_white_gaussian(spec.iterations, seed)?.into_vec();
    let clean = match spec.algorithm {
        Algorithm::Tdlms => block_circular_filter(&spec.plant, &x, spec.block_length)?,
        _ => fir_filter(&spec.plant, &x)?,
    };
    let d = add_noise(&clean, spec.noise_variance, seed)?.into_vec();
    Ok((x, d))
}

/// Runs the configured algorithm once from zero weights.
///
/// Only the adaptation (including model estimation for `sda` and `newton`) is
/// timed. A diverged run is reported through the row's flag, not as an error.
pub fn run_single(spec: &ExperimentSpec, mu: f64, seed: u64) -> Result<(SummaryRow, RunTrace)> {
    spec.validate()?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("mu must be finite and > 0, got {mu}")));
    }
    let (x, d) = experiment_signals(spec, seed)?;
    let zeros = vec![0.0; spec.taps];

    let start = Instant::now();
    let (trace, final_weights) = match spec.algorithm {
        Algorithm::Lms => {
            let trace = lms_run(&x, &d, &LmsConfig::new(mu, spec.taps)?, &zeros)?;
            let w = trace.final_weights().to_vec();
            (trace, w)
        }
        Algorithm::Sda => {
            let model = estimate_correlation(&x, &d, spec.taps)?;
            let traj = sda_run(&model, &zeros, mu, spec.iterations)?;
            let trace = trajectory_trace(&x, &d, &traj);
            let w = trace.final_weights().to_vec();
            (trace, w)
        }
        Algorithm::Newton => {
            let model = estimate_correlation(&x, &d, spec.taps)?;
            let mut weights = Vec::with_capacity(spec.iterations + 1);
            weights.push(zeros.clone());
            for n in 0..spec.iterations {
                weights.push(newton_step(&model, &weights[n])?);
            }
            let costs = vec![0.0; weights.len()];
            let trace = trajectory_trace(&x, &d, &Trajectory { weights, costs, diverged: false });
            let w = trace.final_weights().to_vec();
            (trace, w)
        }
        Algorithm::Tdlms => {
            let run = tdlms_run(&x, &d, spec.block_length, mu)?;
            let mut w = run.impulse_response()?;
            w.resize(spec.taps, 0.0);
            (run.trace, w)
        }
    };
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let (per_coefficient_convergence, combined_convergence, accuracy_percent) =
        if trace.diverged || spec.algorithm == Algorithm::Tdlms {
            (vec![None; spec.taps], None, None)
        } else {
            identification_quality(spec, &trace.weight_history)?
        };

    let row = SummaryRow {
        mu,
        seed,
        iterations: spec.iterations,
        mse: mse(&trace.e)?,
        final_weights,
        final_squared_error: *trace.squared_error.last().expect("non-empty run"),
        per_coefficient_convergence,
        combined_convergence,
        accuracy_percent,
        elapsed_seconds,
        diverged: trace.diverged,
    };
    Ok((row, trace))
}

/// Per-coefficient and combined convergence iterations, and accuracy.
type Quality = (Vec<Option<usize>>, Option<usize>, Option<f64>);

/// Convergence and accuracy against the plant, restricted to taps whose
/// reference coefficient (plant zero-padded or truncated to `taps`) is nonzero.
fn identification_quality(
    spec: &ExperimentSpec,
    history: &[Vec<f64>],
) -> Result<Quality> {
    let h = spec.plant.coefficients();
    let compared: Vec<usize> = (0..spec.taps).filter(|&i| h.get(i).is_some_and(|v| *v != 0.0)).collect();
    if compared.is_empty() {
        return Ok((vec![None; spec.taps], None, None));
    }
    let reference = FirSystem::new(compared.iter().map(|&i| h[i]).collect())?;
    let projected: Vec<Vec<f64>> = history
        .iter()
        .map(|w| compared.iter().map(|&i| w[i]).collect())
        .collect();
    let report = convergence_iteration(&projected, &reference, spec.tolerance)?;
    let mut per = vec![None; spec.taps];
    for (slot, (_, it)) in compared.iter().zip(&report.per_coefficient) {
        per[*slot] = *it;
    }
    let acc = accuracy(projected.last().expect("non-empty history"), &reference)?;
    Ok((per, report.combined, Some(acc)))
}

/// Replays a deterministic trajectory over the signal: sample `n` is filtered
/// with iterate `n`. A truncated (diverged) trajectory holds its last iterate.
fn trajectory_trace(x: &[f64], d: &[f64], traj: &Trajectory) -> RunTrace {
    let taps = traj.weights[0].len();
    let at = |n: usize| &traj.weights[n.min(traj.weights.len() - 1)];
    let mut xv = vec![0.0; taps];
    let y = (0..x.len())
        .map(|n| {
            fill_taps(x, n, &mut xv);
            dot(at(n), &xv)
        })
        .collect();
    let history = (0..=x.len()).map(|n| at(n).clone()).collect();
    RunTrace::from_outputs(y, d, history, traj.diverged)
}

/// Runs every (mu, seed) pair, concurrently, and returns rows ordered by
/// (mu, seed) together with their traces.
pub fn run_sweep_with_traces(spec: &ExperimentSpec) -> Result<Vec<(SummaryRow, RunTrace)>> {
    spec.validate()?;
    let jobs: Vec<(f64, u64)> = spec
        .mu_list
        .iter()
        .flat_map(|&mu| spec.seeds.iter().map(move |&seed| (mu, seed)))
        .collect();
    let mut results = jobs
        .par_iter()
        .map(|&(mu, seed)| run_single(spec, mu, seed))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.0.mu.total_cmp(&b.0.mu).then(a.0.seed.cmp(&b.0.seed)));
    Ok(results)
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SummaryRow>> {
    Ok(run_sweep_with_traces(spec)?.into_iter().map(|(row, _)| row).collect())
}
