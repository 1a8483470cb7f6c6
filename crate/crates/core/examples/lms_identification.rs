//! Identify the two-tap plant `h = [1, 2]` with LMS from 1000 white-noise
//! samples, then report MSE, accuracy and when each weight settled.
//!
//! cargo run --example lms_identification

use lms_sysid::adapt::{lms_run, LmsConfig};
use lms_sysid::metrics::{accuracy, convergence_iteration, mse, DEFAULT_TOLERANCE};
use lms_sysid::signal::{fir_filter, generate_white_gaussian, FirSystem};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plant = FirSystem::new(vec![1.0, 2.0])?;
    let x = generate_white_gaussian(1000, 1)?;
    let d = fir_filter(&plant, &x)?;

    for mu in [0.001, 0.01, 0.1] {
        let config = LmsConfig::new(mu, 2)?;
        let trace = lms_run(&x, &d, &config, &[0.0, 0.0])?;
        let w = trace.final_weights();
        let report = convergence_iteration(&trace.weight_history, &plant, DEFAULT_TOLERANCE)?;
        println!(
            "mu={mu:<6} w=[{:.4}, {:.4}] mse={:.4} accuracy={:.4}% settled at {:?}",
            w[0],
            w[1],
            mse(&trace.e)?,
            accuracy(w, &plant)?,
            report.combined,
        );
    }
    Ok(())
}
