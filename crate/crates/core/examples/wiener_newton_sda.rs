//! The deterministic end of the ladder: estimate `R`, `p` and `σ_d²` from
//! data, then compare the closed-form Wiener solution with one Newton step and
//! with steepest descent at a few step sizes.
//!
//! cargo run --example wiener_newton_sda

use lms_sysid::estimation::{
    cost, estimate_correlation, gradient, max_eigenvalue, newton_step, sda_run, wiener_solve,
};
use lms_sysid::linalg::norm;
use lms_sysid::signal::{fir_filter, generate_white_gaussian, FirSystem};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plant = FirSystem::new(vec![1.0, 2.0])?;
    let x = generate_white_gaussian(20_000, 3)?;
    let d = fir_filter(&plant, &x)?;
    let model = estimate_correlation(&x, &d, 2)?;

    let w_opt = wiener_solve(&model)?;
    println!("R = {:?}", [model.r().row(0), model.r().row(1)]);
    println!("p = {:?}, sigma_d^2 = {:.4}", model.p(), model.sigma_d2());
    println!("Wiener: {w_opt:?}, J_min = {:.3e}", cost(&model, &w_opt)?);

    let newton = newton_step(&model, &[25.0, -40.0])?;
    println!("Newton from [25, -40] in one step: {newton:?}");

    let lmax = max_eigenvalue(model.r())?;
    println!("lambda_max = {lmax:.4}, steepest descent stable for mu < {:.4}", 2.0 / lmax);
    for scale in [0.1, 1.0, 1.9, 2.1] {
        let mu = scale / lmax;
        let traj = sda_run(&model, &[0.0, 0.0], mu, 500)?;
        println!(
            "  mu={mu:.4}: {} iterates, diverged={}, |grad J| at end = {:.2e}",
            traj.weights.len(),
            traj.diverged,
            norm(&gradient(&model, traj.last())?),
        );
    }
    Ok(())
}
