//! Checks final matchings for improving unilateral deviations.
//!
//! cargo run --release --example stability_audit -- [seed]

use relaymatch::matching::stability_report;
use relaymatch::{
    solve, RelayGame, SatisfactionParams, Scenario, SolverConfig, SolverKind, StrategySpace,
    TopologyParams,
};

fn main() -> relaymatch::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(11);
    let params = TopologyParams {
        num_sources: 10,
        ..TopologyParams::default()
    };
    let scenario = Scenario::generate(&params, seed)?;
    let game = RelayGame::from_scenario(&scenario, &SatisfactionParams::default())?;
    for kind in [
        SolverKind::Pma,
        SolverKind::BestResponse,
        SolverKind::ManyToOne,
        SolverKind::Substitutable,
    ] {
        let out = solve(
            &game,
            &SolverConfig::default().with_kind(kind).with_seed(seed),
        )?;
        let report = stability_report(&game, &out.matching, &StrategySpace::default(), u128::MAX)?;
        println!(
            "{kind}: satisfaction {:.4}, {} improving deviations",
            out.final_lambda(),
            report.witnesses.len()
        );
        for w in &report.witnesses {
            let set: Vec<String> = w.strategy.iter().map(ToString::to_string).collect();
            println!(
                "    {} -> {{{}}} gains {:.2e}",
                w.source,
                set.join(","),
                w.gain
            );
        }
    }
    Ok(())
}
