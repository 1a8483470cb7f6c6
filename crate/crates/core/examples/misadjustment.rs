//! With measurement noise on the plant output the Wiener error floor is
//! nonzero, so the excess steady-state error of LMS can be measured as a
//! misadjustment `(J_ss − J_min)/J_min`.
//!
//! cargo run --release --example misadjustment

use lms_sysid::adapt::{lms_run, LmsConfig};
use lms_sysid::estimation::{cost, estimate_correlation, wiener_solve};
use lms_sysid::metrics::{misadjustment, steady_state_mse};
use lms_sysid::signal::{add_noise, fir_filter, generate_white_gaussian, FirSystem};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plant = FirSystem::new(vec![1.0, 2.0])?;
    let noise = 0.01;
    for mu in [0.01, 0.05, 0.1] {
        let mut total = 0.0;
        let seeds = 1..=5u64;
        for seed in seeds.clone() {
            let x = generate_white_gaussian(40_000, seed)?;
            let d = add_noise(&fir_filter(&plant, &x)?, noise, seed)?;
            let model = estimate_correlation(&x, &d, 2)?;
            let j_min = cost(&model, &wiener_solve(&model)?)?;
            let trace = lms_run(&x, &d, &LmsConfig::new(mu, 2)?, &[0.0, 0.0])?;
            total += misadjustment(steady_state_mse(&trace, 20_000)?, j_min)?;
        }
        println!("mu={mu:<5} misadjustment {:.4} (approx. mu*tr(R)/2 = {:.4})", total / 5.0, mu);
    }

    // Noiseless identification has J_min = 0 and no defined misadjustment.
    match misadjustment(1e-20, 0.0) {
        Err(e) => println!("noiseless case: {e}"),
        Ok(m) => println!("unexpected: {m}"),
    }
    Ok(())
}
