//! Convergence-time distribution of the potential matching approach with 20
//! sources and ten relay radios.
//!
//! cargo run --release --example convergence_cdf -- [replications]

use relaymatch::experiment::{run_ensemble, ExperimentConfig};
use relaymatch::{SolverKind, TopologyParams};

fn main() -> relaymatch::Result<()> {
    let replications = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let config = ExperimentConfig {
        name: "convergence".into(),
        topology: TopologyParams {
            num_sources: 20,
            ..TopologyParams::default()
        },
        solvers: vec![SolverKind::Pma],
        replications,
        master_seed: 3,
        ..ExperimentConfig::default()
    };
    let result = run_ensemble(&config)?;
    let cdf = result.convergence_cdf(20, SolverKind::Pma)?;
    let mut next = 0.0;
    for p in &cdf {
        if p.cumulative_probability >= next {
            println!(
                "{:>5} iterations  {:>5.1}%  {}",
                p.iteration,
                100.0 * p.cumulative_probability,
                "#".repeat((p.cumulative_probability * 50.0) as usize)
            );
            next += 0.05;
        }
    }
    let s = result.convergence_summary()[0];
    println!(
        "p95 {:?}, non-converged {:.1}%",
        s.p95_iteration,
        100.0 * s.non_converged_fraction
    );
    Ok(())
}
