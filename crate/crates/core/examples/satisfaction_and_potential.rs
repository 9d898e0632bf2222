//! Shared rates, satisfaction and the acceptance utility on a hand-made
//! three-source instance. A source's utility change always equals the
//! change in total satisfaction.

use relaymatch::matching::interference_set;
use relaymatch::{CapacityTable, Matching, RadioId, RelayGame, SatisfactionParams, SourceId};

fn main() -> relaymatch::Result<()> {
    // capacities in bit/s, rows are sources, columns are radios
    let caps = CapacityTable::from_rows(vec![
        vec![30e6, 25e6, 5e6],
        vec![35e6, 10e6, 20e6],
        vec![40e6, 0.0, 18e6],
    ])?;
    let params = SatisfactionParams::default();
    let profiles = [25e6, 15e6, 12e6]
        .iter()
        .map(|&req| params.profile(req))
        .collect::<relaymatch::Result<Vec<_>>>()?;
    let game = RelayGame::new(vec![2, 1, 1], caps, profiles)?;

    let m = Matching::from_assignments(
        3,
        vec![vec![RadioId(0)], vec![RadioId(0)], vec![RadioId(0)]],
    )?;
    report(&game, &m, "everyone on c0")?;

    let source = SourceId(0);
    let candidate = [RadioId(1)];
    let dev = game.evaluate_deviation(&m, source, &candidate)?;
    let moved = m.with_strategy(source, &candidate);
    println!(
        "\n{source} moves to c1: affected {:?}, utility {:.6} -> {:.6}",
        interference_set(&m, source, &candidate),
        dev.current_utility,
        dev.candidate_utility
    );
    println!(
        "utility gain {:+.12}, total satisfaction gain {:+.12}",
        dev.gain(),
        game.global_satisfaction(&moved) - game.global_satisfaction(&m)
    );
    report(&game, &moved, "after the move")
}

fn report(game: &RelayGame, m: &Matching, label: &str) -> relaymatch::Result<()> {
    println!("{label}:");
    for n in 0..game.num_sources() {
        let s = SourceId(n);
        println!(
            "  {s} rate {:>6.2} Mbps need {:>5.1} satisfaction {:.4}",
            game.sv_rate(m, s)? / 1e6,
            game.profiles()[n].required_rate_bps / 1e6,
            game.source_satisfaction(m, s)?
        );
    }
    println!("  total {:.4}", game.global_satisfaction(m));
    Ok(())
}
