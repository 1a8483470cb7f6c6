//! Step-size limits: the eigenvalue bound `2/λ_max` against the practical
//! input-power bound `2/E‖x‖²`, and how often LMS blows up around them.
//!
//! cargo run --example stability

use lms_sysid::adapt::stability_bound;
use lms_sysid::estimation::{estimate_correlation, max_eigenvalue};
use lms_sysid::harness::{run_single, ExperimentSpec};
use lms_sysid::signal::{fir_filter, generate_white_gaussian, FirSystem};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plant = FirSystem::new(vec![1.0, 2.0])?;
    let x = generate_white_gaussian(50_000, 5)?;
    let d = fir_filter(&plant, &x)?;
    let model = estimate_correlation(&x, &d, 2)?;
    println!("2/lambda_max  = {:.4}", 2.0 / max_eigenvalue(model.r())?);
    println!("2/E|x(n)|^2   = {:.4}", stability_bound(&x, 2)?);

    let spec = ExperimentSpec::default();
    for mu in [0.5, 0.9, 1.0, 1.1, 1.2] {
        let rows: Vec<_> = (1..=20).map(|s| run_single(&spec, mu, s).map(|r| r.0)).collect::<Result<_, _>>()?;
        let diverged = rows.iter().filter(|r| r.diverged).count();
        let huge = rows.iter().filter(|r| r.mse > 1e6).count();
        println!("mu={mu:<4} diverged {diverged:>2}/20, MSE>1e6 {huge:>2}/20");
    }
    Ok(())
}
