//! Error and identification-quality measures for adaptive runs.

use crate::adapt::RunTrace;
use crate::error::{Error, Result};
use crate::signal::FirSystem;

/// Minimum MSE below which misadjustment is reported as undefined.
pub const MISADJUSTMENT_EPSILON: f64 = 1e-12;

/// Relative band used by [`convergence_iteration`] unless told otherwise.
pub const DEFAULT_TOLERANCE: f64 = 0.01;

/// When each coefficient settled inside its tolerance band for good.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `(coefficient index, iteration)`; `None` if the coefficient never stayed
    /// in the band through the end of the run.
    pub per_coefficient: Vec<(usize, Option<usize>)>,
    /// Latest per-coefficient iteration, or `None` if any is missing.
    pub combined: Option<usize>,
    pub tolerance: f64,
}

/// `(1/M)·Σ e(n)²`.
pub fn mse(e: &[f64]) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::invalid("MSE of an empty sequence"));
    }
    Ok(e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64)
}

/// Mean squared error over the last `window` iterations of a run.
pub fn steady_state_mse(trace: &RunTrace, window: usize) -> Result<f64> {
    if window == 0 || window > trace.len() {
        return Err(Error::invalid(format!(
            "window {window} must be in 1..={}",
            trace.len()
        )));
    }
    let tail = &trace.squared_error[trace.len() - window..];
    Ok(tail.iter().sum::<f64>() / window as f64)
}

/// `(J_ss − J_min) / J_min`.
pub fn misadjustment(j_ss: f64, j_min: f64) -> Result<f64> {
    if !(j_min > MISADJUSTMENT_EPSILON) {
        return Err(Error::UndefinedMisadjustment { j_min, epsilon: MISADJUSTMENT_EPSILON });
    }
    if !(j_ss >= 0.0) {
        return Err(Error::invalid(format!("steady-state MSE must be >= 0, got {j_ss}")));
    }
    Ok((j_ss - j_min) / j_min)
}

/// For each coefficient, the first iteration from which `|w_i − h_i| ≤ tol·|h_i|`
/// holds for the rest of the history (sustained entry, not first touch).
pub fn convergence_iteration(history: &[Vec<f64>], h: &FirSystem, tol: f64) -> Result<ConvergenceReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be > 0, got {tol}")));
    }
    let target = h.coefficients();
    if let Some(i) = target.iter().position(|v| *v == 0.0) {
        return Err(Error::invalid(format!(
            "coefficient {i} of the reference system is zero; relative tolerance is undefined"
        )));
    }
    if let Some(w) = history.iter().find(|w| w.len() != target.len()) {
        return Err(Error::invalid(format!(
            "weight vector has {} entries, reference system has {}",
            w.len(),
            target.len()
        )));
    }

    let per_coefficient: Vec<(usize, Option<usize>)> = target
        .iter()
        .enumerate()
        .map(|(i, hi)| {
            let inside = |w: &Vec<f64>| (w[i] - hi).abs() <= tol * hi.abs();
            let settled = match history.iter().rposition(|w| !inside(w)) {
                None if history.is_empty() => None,
                None => Some(0),
                Some(last_out) if last_out + 1 < history.len() => Some(last_out + 1),
                Some(_) => None,
            };
            (i, settled)
        })
        .collect();
    let combined = per_coefficient
        .iter()
        .map(|(_, it)| *it)
        .collect::<Option<Vec<_>>>()
        .and_then(|its| its.into_iter().max());
    Ok(ConvergenceReport { per_coefficient, combined, tolerance: tol })
}

/// Mean per-coefficient relative accuracy in percent:
/// `100·(1/N)·Σ (1 − |w_i − h_i|/|h_i|)`.
pub fn accuracy(w: &[f64], h: &FirSystem) -> Result<f64> {
    let target = h.coefficients();
    if w.len() != target.len() {
        return Err(Error::invalid(format!(
            "weight vector has {} entries, reference system has {}",
            w.len(),
            target.len()
        )));
    }
    if target.contains(&0.0) {
        return Err(Error::invalid("accuracy is undefined for zero reference coefficients"));
    }
    let total: f64 = w
        .iter()
        .zip(target)
        .map(|(wi, hi)| 1.0 - (wi - hi).abs() / hi.abs())
        .sum();
    Ok(100.0 * total / target.len() as f64)
}
