//! Runs a preset experiment with fewer replications and writes its CSV files.
//!
//! cargo run --release --example ensemble -- [fig2|fig3|fig4] [replications] [out-dir]

use relaymatch::experiment::{run_ensemble, write_results, ExperimentConfig};

fn main() -> relaymatch::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "fig4".into());
    let mut config = ExperimentConfig::preset(&preset)?;
    config.replications = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let dir = args
        .next()
        .map_or_else(|| config.resolved_output_dir(), Into::into);

    let result = run_ensemble(&config)?;
    for row in result.satisfaction_vs_n() {
        println!(
            "N={:<3} {:<14} {:.4} ± {:.4}",
            row.num_sources, row.solver, row.mean_proportion, row.std_error
        );
    }
    for s in result.convergence_summary() {
        println!(
            "N={:<3} {:<14} p95 convergence {:?}, non-converged {:.1}%",
            s.num_sources,
            s.solver,
            s.p95_iteration,
            100.0 * s.non_converged_fraction
        );
    }
    for path in write_results(&result, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
