use std::ops::{Add, Mul, Sub};

use crate::adapt::RunTrace;
use crate::error::{Error, Result};
use crate::signal::{fill_taps, RegressorVector};
use crate::DIVERGENCE_CEILING;

/// Step size and tap count of an LMS filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmsConfig {
    mu: f64,
    taps: usize,
}

impl LmsConfig {
    pub fn new(mu: f64, taps: usize) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid(format!("step size mu must be finite and > 0, got {mu}")));
        }
        if taps == 0 {
            return Err(Error::invalid("tap count must be at least 1"));
        }
        Ok(LmsConfig { mu, taps })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn taps(&self) -> usize {
        self.taps
    }
}

/// Live weights of an LMS filter.
#[derive(Debug, Clone, PartialEq)]
pub struct LmsState {
    pub w: Vec<f64>,
    /// Number of updates applied so far.
    pub n: usize,
    pub diverged: bool,
}

impl LmsState {
    pub fn new(w: Vec<f64>) -> Self {
        let diverged = w.iter().any(|v| !(v.abs() <= DIVERGENCE_CEILING));
        LmsState { w, n: 0, diverged }
    }

    pub fn zeros(taps: usize) -> Self {
        Self::new(vec![0.0; taps])
    }
}

/// The LMS arithmetic on one sample: `y = wᵀx`, `e = d − y`, `w += (μe)·x`.
///
/// Generic so the operation count can be audited with an instrumented scalar:
/// it performs `2N + 1` multiplications and `2N` additions/subtractions for
/// `N` taps (`N` products and `N − 1` sums for `y`, one subtraction for `e`,
/// one product for `μe`, then `N` products and `N` sums for the update).
pub fn lms_kernel<T>(w: &mut [T], x: &[T], d: T, mu: T) -> (T, T)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    assert!(!w.is_empty() && w.len() == x.len());
    let mut y = w[0] * x[0];
    for (wi, xi) in w.iter().zip(x).skip(1) {
        y = y + *wi * *xi;
    }
    let e = d - y;
    let g = mu * e;
    for (wi, xi) in w.iter_mut().zip(x) {
        *wi = *wi + g * *xi;
    }
    (y, e)
}

/// One LMS iteration. Returns `(y, e)` and advances `state` in place; sets the
/// diverged flag when any weight passes the divergence ceiling.
pub fn lms_step(state: &mut LmsState, x_vec: &RegressorVector, d: f64, config: &LmsConfig) -> Result<(f64, f64)> {
    if state.w.len() != config.taps || x_vec.len() != config.taps {
        return Err(Error::invalid(format!(
            "weights ({}) and regressor ({}) must both have {} taps",
            state.w.len(),
            x_vec.len(),
            config.taps
        )));
    }
    let (y, e) = lms_kernel(&mut state.w, x_vec, d, config.mu);
    state.n += 1;
    if state.w.iter().any(|v| !(v.abs() <= DIVERGENCE_CEILING)) {
        state.diverged = true;
    }
    Ok((y, e))
}

/// Runs LMS over the whole record from `w0`, computing each output before the
/// update at that sample. Once the weights pass the divergence ceiling they are
/// frozen and the run is flagged; outputs keep being recorded with the frozen
/// weights.
pub fn lms_run(x: &[f64], d: &[f64], config: &LmsConfig, w0: &[f64]) -> Result<RunTrace> {
    if x.len() != d.len() {
        return Err(Error::invalid(format!(
            "input has {} samples but desired has {}",
            x.len(),
            d.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::invalid("cannot adapt on an empty signal"));
    }
    if w0.len() != config.taps {
        return Err(Error::invalid(format!(
            "initial weight has {} entries, config has {} taps",
            w0.len(),
            config.taps
        )));
    }

    let mut state = LmsState::new(w0.to_vec());
    let mut xv = RegressorVector::new(vec![0.0; config.taps]);
    let mut y = Vec::with_capacity(x.len());
    let mut history = Vec::with_capacity(x.len() + 1);
    history.push(state.w.clone());
    for (n, &dn) in d.iter().enumerate() {
        fill_taps(x, n, xv.as_mut_slice());
        if state.diverged {
            y.push(crate::linalg::dot(&state.w, &xv));
        } else {
            let (yn, _) = lms_step(&mut state, &xv, dn, config)?;
            y.push(yn);
        }
        history.push(state.w.clone());
    }
    Ok(RunTrace::from_outputs(y, d, history, state.diverged))
}

/// Practical step-size bound `2 / E‖x(n)‖²`, with the expectation replaced by
/// the time average of the squared regressor norm.
pub fn stability_bound(x: &[f64], taps: usize) -> Result<f64> {
    if taps == 0 {
        return Err(Error::invalid("tap count must be at least 1"));
    }
    if x.len() < taps {
        return Err(Error::invalid(format!(
            "need at least {taps} samples, got {}",
            x.len()
        )));
    }
    let mut xv = vec![0.0; taps];
    let mut total = 0.0;
    for n in 0..x.len() {
        fill_taps(x, n, &mut xv);
        total += xv.iter().map(|v| v * v).sum::<f64>();
    }
    let power = total / x.len() as f64;
    if power == 0.0 {
        return Err(Error::DivisionByZero("input signal has zero power".into()));
    }
    Ok(2.0 / power)
}
