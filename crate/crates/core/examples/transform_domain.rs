//! Block transform-domain LMS: each DFT bin adapts its own complex weight once
//! per block. With a desired signal built by circular block filtering, the bin
//! weights converge to the DFT of the plant.
//!
//! cargo run --example transform_domain

use lms_sysid::adapt::{dft, tdlms_run};
use lms_sysid::metrics::steady_state_mse;
use lms_sysid::signal::{block_circular_filter, generate_white_gaussian, FirSystem};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let block = 8;
    let plant = FirSystem::new(vec![1.0, 2.0])?;
    let x = generate_white_gaussian(block * 500, 2)?;
    let d = block_circular_filter(&plant, &x, block)?;
    let run = tdlms_run(&x, &d, block, 0.02)?;

    let mut padded = vec![0.0; block];
    padded[..2].copy_from_slice(plant.coefficients());
    let target = dft(&padded)?;
    for (k, (w, t)) in run.final_bins().iter().zip(target.bins()).enumerate() {
        println!("bin {k}: W = {:>7.4}{:+.4}i   target {:>7.4}{:+.4}i", w.re, w.im, t.re, t.im);
    }
    let h = run.impulse_response()?;
    println!("equivalent impulse response: {:.4?}", &h[..4]);
    println!("steady-state MSE (last 400 samples): {:.3e}", steady_state_mse(&run.trace, 400)?);
    Ok(())
}
