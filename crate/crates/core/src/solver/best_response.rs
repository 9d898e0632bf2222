use rand::Rng;

use super::trace::{IterationTrace, TraceStep};
use super::{random_matching, SolveOutcome, SolverConfig};
use crate::error::Result;
use crate::ids::{RadioId, SourceId};
use crate::matching::{RelayGame, IMPROVEMENT_EPS};

/// Best-response dynamics on the acceptance utility.
///
/// Each iteration a source that may still improve is drawn uniformly and
/// switches to its utility-maximizing radio set if that strictly improves on
/// its current one. The run ends when every source has failed to improve
/// since the last accepted move, which is a stable matching.
pub fn run_best_response<R: Rng + ?Sized>(
    game: &RelayGame,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<SolveOutcome> {
    config.validate()?;
    let space = &config.strategy_space;
    let mut m = random_matching(game, space, rng);
    let strategies: Vec<Vec<Vec<RadioId>>> = (0..game.num_sources())
        .map(|n| {
            space.enumerate(
                game.quota(SourceId(n)),
                game.num_radios(),
                config.enumeration_cap,
            )
        })
        .collect::<Result<_>>()?;

    let mut lambda = game.global_satisfaction(&m);
    let mut trace = IterationTrace::new(lambda);
    let mut pending: Vec<SourceId> = (0..game.num_sources()).map(SourceId).collect();
    let mut last_move = 0;

    for k in 1..=config.max_iterations {
        if pending.is_empty() {
            break;
        }
        let source = pending[rng.random_range(0..pending.len())];
        let mut best: Option<(f64, &[RadioId])> = None;
        for candidate in &strategies[source.0] {
            if candidate.as_slice() == m.strategy(source) {
                continue;
            }
            let gain = game.evaluate_deviation(&m, source, candidate)?.gain();
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, candidate));
            }
        }
        let mut step = TraceStep {
            iteration: k,
            lambda,
            actor: Some(source),
            accepted: false,
            utility_delta: 0.0,
        };
        match best {
            Some((gain, candidate)) if gain > IMPROVEMENT_EPS => {
                m.set_strategy(source, candidate);
                lambda = game.global_satisfaction(&m);
                step.lambda = lambda;
                step.accepted = true;
                step.utility_delta = gain;
                last_move = k;
                pending = (0..game.num_sources()).map(SourceId).collect();
            }
            _ => pending.retain(|&s| s != source),
        }
        trace.steps.push(step);
    }
    if pending.is_empty() {
        trace.convergence_iteration = Some(last_move);
    }
    Ok(SolveOutcome { matching: m, trace })
}
