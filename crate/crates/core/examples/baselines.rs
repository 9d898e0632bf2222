//! Every solver on the same 13-source topology with five two-radio relays.
//!
//! cargo run --release --example baselines -- [seed]

use relaymatch::{
    solve, RelayGame, SatisfactionParams, Scenario, SolverConfig, SolverKind, TopologyParams,
};

fn main() -> relaymatch::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let scenario = Scenario::generate(&TopologyParams::default(), seed)?;
    let game = RelayGame::from_scenario(&scenario, &SatisfactionParams::default())?;
    let n = game.num_sources() as f64;
    for kind in SolverKind::ALL {
        let config = SolverConfig::default().with_kind(kind).with_seed(seed);
        match solve(&game, &config) {
            Ok(out) => println!(
                "{:<14} satisfaction {:.4} ({:.1}% of sources)  iterations {:>4}",
                kind.name(),
                out.final_lambda(),
                100.0 * out.final_lambda() / n,
                out.trace.iterations()
            ),
            Err(e) => println!("{:<14} {e}", kind.name()),
        }
    }
    Ok(())
}
