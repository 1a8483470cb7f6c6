//! Excitation and desired signals, and the tap-delay-line view of an input.
//!
//! Random streams come from ChaCha8 (`rand_chacha`) seeded through
//! `seed_from_u64`, with normals drawn by the ziggurat sampler of
//! `rand_distr::StandardNormal`. Excitation uses ChaCha stream 0 and additive
//! noise uses stream 1, so the same seed gives independent input and noise.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const EXCITATION_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

/// A finite stream of real samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sequence {
    samples: Vec<f64>,
}

impl Sequence {
    /// Wraps `samples`, rejecting NaN and infinities.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Sequence { samples })
    }

    /// Wraps samples without the finiteness check. Used for traces of
    /// diverged runs.
    pub fn from_trace(samples: Vec<f64>) -> Self {
        Sequence { samples }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.samples
    }
}

impl Deref for Sequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.samples
    }
}

/// The unknown plant: an FIR coefficient vector `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirSystem {
    h: Vec<f64>,
}

impl FirSystem {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::invalid("FIR system needs at least one coefficient"));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("FIR coefficients must be finite"));
        }
        Ok(FirSystem { h })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.h
    }

    pub fn order(&self) -> usize {
        self.h.len()
    }
}

/// `[x(n), x(n-1), ..., x(n-N+1)]`, zero before the start of the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorVector(Vec<f64>);

impl RegressorVector {
    pub fn new(values: Vec<f64>) -> Self {
        RegressorVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Deref for RegressorVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn normal_stream(seed: u64, stream: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    std::iter::repeat_with(move || rng.sample::<f64, _>(StandardNormal))
}

/// `n` standard normal samples from a reproducible seeded stream.
pub fn generate_white_gaussian(n: usize, seed: u64) -> Result<Sequence> {
    if n == 0 {
        return Err(Error::invalid("signal length must be at least 1"));
    }
    Ok(Sequence::from_trace(
        normal_stream(seed, EXCITATION_STREAM).take(n).collect(),
    ))
}

/// Linear convolution of `x` with the plant, truncated to `x.len()` samples.
pub fn fir_filter(system: &FirSystem, x: &[f64]) -> Result<Sequence> {
    if x.is_empty() {
        return Err(Error::invalid("cannot filter an empty signal"));
    }
    let h = system.coefficients();
    let out = (0..x.len())
        .map(|n| {
            h.iter()
                .take(n + 1)
                .enumerate()
                .fold(0.0, |acc, (k, hk)| acc + hk * x[n - k])
        })
        .collect();
    Ok(Sequence::from_trace(out))
}

/// Filters each length-`block_len` block of `x` by circular convolution with
/// the plant zero-padded to `block_len`. A trailing partial block is dropped.
///
/// This is the signal model under which per-bin transform-domain LMS has an
/// exact optimum (`dft` of the padded plant).
pub fn block_circular_filter(system: &FirSystem, x: &[f64], block_len: usize) -> Result<Sequence> {
    if block_len == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let h = system.coefficients();
    if h.len() > block_len {
        return Err(Error::invalid(format!(
            "plant order {} exceeds block length {block_len}",
            h.len()
        )));
    }
    let mut out = Vec::with_capacity(x.len() - x.len() % block_len);
    for block in x.chunks_exact(block_len) {
        for n in 0..block_len {
            let mut acc = 0.0;
            for (k, hk) in h.iter().enumerate() {
                acc += hk * block[(n + block_len - k) % block_len];
            }
            out.push(acc);
        }
    }
    Ok(Sequence::from_trace(out))
}

/// Writes the regressor for sample `n` into `out` (length N).
pub(crate) fn fill_taps(x: &[f64], n: usize, out: &mut [f64]) {
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = if k <= n { x[n - k] } else { 0.0 };
    }
}

/// The `taps` most recent samples ending at index `n`.
pub fn tap_vector(x: &[f64], n: usize, taps: usize) -> Result<RegressorVector> {
    if n >= x.len() {
        return Err(Error::invalid(format!(
            "index {n} out of range for signal of length {}",
            x.len()
        )));
    }
    if taps == 0 {
        return Err(Error::invalid("tap count must be at least 1"));
    }
    let mut v = vec![0.0; taps];
    fill_taps(x, n, &mut v);
    Ok(RegressorVector(v))
}

/// Adds zero-mean Gaussian noise of the given variance.
pub fn add_noise(x: &[f64], variance: f64, seed: u64) -> Result<Sequence> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::invalid(format!(
            "noise variance must be finite and non-negative, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(Sequence::from_trace(x.to_vec()));
    }
    let sd = variance.sqrt();
    let out = x
        .iter()
        .zip(normal_stream(seed, NOISE_STREAM))
        .map(|(v, z)| v + sd * z)
        .collect();
    Ok(Sequence::from_trace(out))
}
