//! Runs the potential matching approach on small instances and compares its
//! final satisfaction with the exhaustive optimum.
//!
//! cargo run --release --example pma_vs_oracle -- [instances]

use relaymatch::radio::SourceRadios;
use relaymatch::solver::exhaustive_search;
use relaymatch::{
    solve, RelayGame, SatisfactionParams, Scenario, SolverConfig, StrategySpace, TopologyParams,
};

fn main() -> relaymatch::Result<()> {
    let instances: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let params = TopologyParams {
        num_sources: 4,
        num_relays: 3,
        radios_per_relay: 1,
        source_radios: SourceRadios::Uniform { min: 1, max: 2 },
        ..TopologyParams::default()
    };
    let mut within = 0;
    for seed in 0..instances {
        let scenario = Scenario::generate(&params, seed)?;
        let game = RelayGame::from_scenario(&scenario, &SatisfactionParams::default())?;
        let (_, optimum) = exhaustive_search(&game, &StrategySpace::default(), u128::MAX)?;
        let out = solve(&game, &SolverConfig::default().with_seed(seed))?;
        let ratio = out.final_lambda() / optimum;
        if ratio >= 0.95 {
            within += 1;
        }
        println!(
            "seed {seed:>3}: optimum {optimum:.4}  pma {:.4}  ratio {ratio:.3}  converged at {:?} of {} iterations",
            out.final_lambda(),
            out.trace.convergence_iteration,
            out.trace.iterations()
        );
    }
    println!("within 5% of the optimum: {within}/{instances}");
    Ok(())
}
