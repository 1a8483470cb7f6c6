//! Sweep the full 28-value step-size list over several seeds and print a
//! results table (median over seeds), then write the summary CSV and one trace
//! to the system temp directory.
//!
//! cargo run --release --example step_size_sweep

use lms_sysid::harness::{emit_summary, emit_trace, run_single, run_sweep, ExperimentSpec, SummaryFormat};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec { seeds: (1..=5).collect(), ..ExperimentSpec::default() };
    let rows = run_sweep(&spec)?;

    println!("{:>6} {:>12} {:>9} {:>9} {:>9} {:>10} {:>8}", "mu", "mse", "w0", "w1", "settled", "accuracy", "div");
    for chunk in rows.chunks(spec.seeds.len()) {
        let mid = &chunk[chunk.len() / 2];
        let settled = mid.combined_convergence.map_or("-".to_string(), |v| v.to_string());
        let acc = mid.accuracy_percent.map_or("NA".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:>6} {:>12.4e} {:>9.4} {:>9.4} {:>9} {:>10} {:>8}",
            mid.mu,
            mid.mse,
            mid.final_weights[0],
            mid.final_weights[1],
            settled,
            acc,
            chunk.iter().filter(|r| r.diverged).count(),
        );
    }

    let dir = std::env::temp_dir().join("lms-sysid-sweep");
    std::fs::create_dir_all(&dir)?;
    emit_summary(&rows, SummaryFormat::Csv, &dir.join("summary.csv"))?;
    let (_, trace) = run_single(&spec, 0.01, 1)?;
    emit_trace(&trace, &dir.join("trace_mu0.01_seed1.csv"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
