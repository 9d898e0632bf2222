//! Many-to-one deferred acceptance with substitution. This is a stand-in
//! for the published substitutable matching baseline, whose exact procedure
//! is not available; it keeps that baseline's defining trait, radios that
//! evict holders instead of sharing them.

use std::collections::VecDeque;

use super::trace::{IterationTrace, TraceStep};
use super::{SolveOutcome, SolverConfig};
use crate::error::Result;
use crate::ids::{RadioId, SourceId};
use crate::matching::{satisfaction, RelayGame};

/// Sources propose to one radio at a time in decreasing order of pair
/// capacity. A radio holds at most `q` proposers; when over quota it evicts
/// the proposer whose removal leaves the highest total satisfaction among
/// the remaining holders (later source ids go first on ties). Evicted
/// sources continue down their list; the run ends when no free source has a
/// radio left to propose to.
pub fn run_substitutable_baseline(game: &RelayGame, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let n = game.num_sources();
    let l = game.num_radios();
    let quota = config.substitutable_quota.unwrap_or(n.div_ceil(l)).max(1);
    let caps = game.capacities();

    let preferences: Vec<Vec<RadioId>> = (0..n)
        .map(|s| {
            let row = caps.row(SourceId(s));
            let mut order: Vec<RadioId> = (0..l).map(RadioId).collect();
            order.sort_by(|a, b| row[b.0].total_cmp(&row[a.0]).then(a.cmp(b)));
            order
        })
        .collect();
    let mut next_choice = vec![0usize; n];
    let mut held: Vec<Vec<SourceId>> = vec![Vec::new(); l];
    let mut free: VecDeque<SourceId> = (0..n).map(SourceId).collect();

    let mut m = game.empty_matching();
    let mut trace = IterationTrace::new(game.global_satisfaction(&m));
    let mut k = 0;

    // radio-local welfare of a holder set
    let welfare = |radio: RadioId, holders: &[SourceId]| -> f64 {
        let share = holders.len() as f64;
        holders
            .iter()
            .map(|&s| satisfaction(caps.get(s, radio) / share, &game.profiles()[s.0]))
            .sum()
    };

    while let Some(source) = free.pop_front() {
        if k >= config.max_iterations {
            break;
        }
        let Some(&radio) = preferences[source.0].get(next_choice[source.0]) else {
            continue;
        };
        next_choice[source.0] += 1;
        k += 1;

        let holders = &mut held[radio.0];
        holders.push(source);
        holders.sort_unstable();
        let mut evicted = None;
        if holders.len() > quota {
            let mut best: Option<(f64, usize)> = None;
            for i in (0..holders.len()).rev() {
                let mut rest = holders.clone();
                rest.remove(i);
                let w = welfare(radio, &rest);
                if best.is_none_or(|(bw, _)| w > bw) {
                    best = Some((w, i));
                }
            }
            let (_, i) = best.expect("holders are non-empty");
            evicted = Some(holders.remove(i));
        }

        if evicted != Some(source) {
            m.set_strategy(source, &[radio]);
        }
        if let Some(out) = evicted {
            if out != source {
                m.set_strategy(out, &[]);
            }
            free.push_back(out);
        }
        trace.steps.push(TraceStep {
            iteration: k,
            lambda: game.global_satisfaction(&m),
            actor: Some(source),
            accepted: evicted != Some(source),
            utility_delta: 0.0,
        });
    }
    trace.convergence_iteration = free.is_empty().then_some(k);
    Ok(SolveOutcome { matching: m, trace })
}
