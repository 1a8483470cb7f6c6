//! Block transform-domain LMS.
//!
//! Each block of `L` samples is taken to the frequency domain and every bin
//! runs its own complex LMS with one update per block:
//!
//! ```text
//! Y_i(k)     = W_i(k)·U_i(k)
//! E_i(k)     = D_i(k) − Y_i(k)
//! W_{i+1}(k) = W_i(k) + μ·E_i(k)·conj(U_i(k))
//! ```
//!
//! Bin-wise multiplication is circular convolution in time, so the per-bin
//! optimum is exact only when `d` is produced by circularly filtering each
//! block (see [`crate::signal::block_circular_filter`]). For linearly filtered
//! signals the edge samples of every block carry a model mismatch; no
//! overlap-save correction is applied.

use num_complex::Complex64;

use crate::adapt::{dft, idft, ComplexSpectrum, RunTrace};
use crate::error::{Error, Result};
use crate::DIVERGENCE_CEILING;

const IMAG_RESIDUE_TOL: f64 = 1e-6;

/// Outcome of a transform-domain run.
#[derive(Debug, Clone, PartialEq)]
pub struct TdlmsRun {
    /// Time-domain trace. `weight_history` rows hold the per-bin weight
    /// magnitudes `|W(k)|` in effect for each sample.
    pub trace: RunTrace,
    /// Complex per-bin weights, one entry per block plus the initial zeros.
    pub bin_weights: Vec<Vec<Complex64>>,
    pub block_len: usize,
}

impl TdlmsRun {
    pub fn final_bins(&self) -> &[Complex64] {
        self.bin_weights.last().expect("holds the initial weight")
    }

    /// Time-domain circular impulse response equivalent to the final weights
    /// (real part of their inverse DFT).
    pub fn impulse_response(&self) -> Result<Vec<f64>> {
        let spectrum = ComplexSpectrum::new(self.final_bins().to_vec())?;
        Ok(idft(&spectrum)?.iter().map(|v| v.re).collect())
    }
}

/// Runs transform-domain LMS with block length `block_len` and constant step
/// `mu`, starting from all-zero bin weights.
pub fn tdlms_run(x: &[f64], d: &[f64], block_len: usize, mu: f64) -> Result<TdlmsRun> {
    if block_len == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("step size mu must be finite and > 0, got {mu}")));
    }
    if x.len() != d.len() {
        return Err(Error::invalid(format!(
            "input has {} samples but desired has {}",
            x.len(),
            d.len()
        )));
    }
    let blocks = x.len() / block_len;
    if blocks == 0 {
        return Err(Error::invalid(format!(
            "signal of {} samples holds no complete block of {block_len}",
            x.len()
        )));
    }
    let used = blocks * block_len;

    let mut w = vec![Complex64::new(0.0, 0.0); block_len];
    let mut bin_weights = Vec::with_capacity(blocks + 1);
    bin_weights.push(w.clone());
    let mut history = Vec::with_capacity(used + 1);
    let mut y = Vec::with_capacity(used);
    let mut diverged = false;

    for (xb, db) in x.chunks_exact(block_len).zip(d.chunks_exact(block_len)) {
        let u = dft(xb)?.into_bins();
        let dk = dft(db)?.into_bins();
        let yk: Vec<Complex64> = w.iter().zip(&u).map(|(wk, uk)| wk * uk).collect();
        let yt = idft(&ComplexSpectrum::new(yk.clone())?)?;
        check_real(&yt)?;

        let magnitudes: Vec<f64> = w.iter().map(|v| v.norm()).collect();
        for v in &yt {
            y.push(v.re);
            history.push(magnitudes.clone());
        }

        if !diverged {
            for k in 0..block_len {
                let ek = dk[k] - yk[k];
                w[k] += ek.scale(mu) * u[k].conj();
            }
            if w.iter().any(|v| !(v.norm() <= DIVERGENCE_CEILING)) {
                diverged = true;
            }
        }
        bin_weights.push(w.clone());
    }
    history.push(w.iter().map(|v| v.norm()).collect());

    let mut trace = RunTrace::from_outputs(y, &d[..used], history, diverged);
    trace.dropped_samples = x.len() - used;
    Ok(TdlmsRun { trace, bin_weights, block_len })
}

fn check_real(block: &[Complex64]) -> Result<()> {
    let scale = block.iter().fold(1.0f64, |m, v| m.max(v.re.abs()));
    let residue = block.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if residue > IMAG_RESIDUE_TOL * scale {
        return Err(Error::Numeric(format!(
            "time-domain block has imaginary residue {residue:e}"
        )));
    }
    Ok(())
}
