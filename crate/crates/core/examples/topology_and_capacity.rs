//! Generates a seeded topology and prints the source-to-radio capacity table.
//!
//! cargo run --example topology_and_capacity -- [seed]

use relaymatch::{RadioId, Scenario, TopologyParams};

fn main() -> relaymatch::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);
    let params = TopologyParams {
        num_sources: 8,
        ..TopologyParams::default()
    };
    let scenario = Scenario::generate(&params, seed)?;
    let topo = &scenario.topology;

    println!(
        "destination at ({:.0}, {:.0})",
        topo.destination.x, topo.destination.y
    );
    for relay in &topo.relays {
        let radios: Vec<String> = relay.radios.iter().map(|r| r.id.to_string()).collect();
        println!(
            "relay {} at ({:.0}, {:.0}) radios {}",
            relay.id,
            relay.position.x,
            relay.position.y,
            radios.join(" ")
        );
    }

    let caps = scenario.capacities()?;
    print!("\n{:<4} {:>3} {:>8} |", "src", "q", "need");
    for l in 0..caps.num_radios() {
        print!("{:>7}", RadioId(l).to_string());
    }
    println!("   (Mbps)");
    for s in &topo.sources {
        print!(
            "{:<4} {:>3} {:>8.1} |",
            s.id.to_string(),
            s.num_radios,
            s.required_rate_bps / 1e6
        );
        for c in caps.row(s.id) {
            print!("{:>7.1}", c / 1e6);
        }
        println!();
    }
    Ok(())
}
