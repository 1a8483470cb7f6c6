//! Stochastic adaptive algorithms: sample-by-sample LMS and block
//! transform-domain LMS.

mod fft;
mod lms;
mod tdlms;

pub use fft::{dft, idft, ComplexSpectrum};
pub use lms::{lms_kernel, lms_run, lms_step, stability_bound, LmsConfig, LmsState};
pub use tdlms::{tdlms_run, TdlmsRun};

use crate::signal::Sequence;

/// Full per-iteration history of an adaptive run.
///
/// `weight_history[n]` is the weight in effect when sample `n` was filtered;
/// the final entry is the weight after the last update, so the history is one
/// longer than the signals.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub y: Sequence,
    pub e: Sequence,
    pub squared_error: Sequence,
    pub weight_history: Vec<Vec<f64>>,
    pub diverged: bool,
    /// Trailing input samples that did not fill a block (block algorithms only).
    pub dropped_samples: usize,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn final_weights(&self) -> &[f64] {
        self.weight_history.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Builds a trace from outputs and the desired signal, deriving `e = d − y`
    /// and `e²`.
    pub(crate) fn from_outputs(y: Vec<f64>, d: &[f64], weight_history: Vec<Vec<f64>>, diverged: bool) -> Self {
        let e: Vec<f64> = d.iter().zip(&y).map(|(d, y)| d - y).collect();
        let squared_error = e.iter().map(|v| v * v).collect();
        RunTrace {
            y: Sequence::from_trace(y),
            e: Sequence::from_trace(e),
            squared_error: Sequence::from_trace(squared_error),
            weight_history,
            diverged,
            dropped_samples: 0,
        }
    }
}
