//! Potential matching approach: sources sample candidate radio sets in
//! proportion to radio attractiveness and the relays accept a switch with a
//! Boltzmann (logit) probability on the acceptance utility.

use rand::Rng;

use super::trace::{IterationTrace, TraceStep};
use super::{
    max_set_size, random_matching, Attractiveness, ConvergenceMonitor, SolveOutcome, SolverConfig,
};
use crate::error::Result;
use crate::ids::{RadioId, SourceId};
use crate::matching::{Matching, RelayGame};

/// Single-draw selection probabilities: each weight over the total. All
/// zeros when the total is zero.
pub fn selection_probabilities(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![0.0; weights.len()]
    }
}

fn attractiveness(
    game: &RelayGame,
    m: &Matching,
    source: SourceId,
    kind: Attractiveness,
) -> Vec<f64> {
    let caps = game.capacities().row(source);
    match kind {
        Attractiveness::RawCapacity => caps.to_vec(),
        Attractiveness::LoadShared => caps
            .iter()
            .enumerate()
            .map(|(l, c)| {
                let r = RadioId(l);
                let others = m.load(r) - usize::from(m.strategy(source).contains(&r));
                c / (others + 1) as f64
            })
            .collect(),
    }
}

/// Samples a candidate radio set for `source`: a size uniform on
/// `1..=quota`, then radios drawn without replacement, each draw
/// proportional to attractiveness among the radios not yet drawn.
/// Returns an empty set if no radio is attractive.
pub fn pma_propose<R: Rng + ?Sized>(
    game: &RelayGame,
    m: &Matching,
    source: SourceId,
    config: &SolverConfig,
    rng: &mut R,
) -> Vec<RadioId> {
    let mut weights = attractiveness(game, m, source, config.attractiveness);
    let positive = weights.iter().filter(|w| **w > 0.0).count();
    let hi = max_set_size(game, source, &config.strategy_space);
    if positive == 0 || hi == 0 {
        log::debug!("{source} has no attractive radio, empty proposal");
        return Vec::new();
    }
    let size = rng.random_range(1..=hi).min(positive);
    let mut chosen = Vec::with_capacity(size);
    for _ in 0..size {
        let total: f64 = weights.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = None;
        for (l, w) in weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            pick = Some(l);
            if target < *w {
                break;
            }
            target -= w;
        }
        // `pick` falls back to the last positive weight on rounding
        let l = pick.expect("a positive weight remains");
        chosen.push(RadioId(l));
        weights[l] = 0.0;
    }
    chosen.sort_unstable();
    chosen
}

/// Probability that relays accept a switch to a set with utility `u_new`
/// from one with utility `u_old`: `e^(b u_new) / (e^(b u_new) + e^(b u_old))`.
///
/// `pma_accept(a, b, beta) + pma_accept(b, a, beta) == 1.0` holds exactly.
pub fn pma_accept(u_new: f64, u_old: f64, beta: f64) -> f64 {
    if u_new >= u_old {
        1.0 / (1.0 + (-beta * (u_new - u_old)).exp())
    } else {
        1.0 - pma_accept(u_old, u_new, beta)
    }
}

/// Runs the potential matching approach from a random initial matching.
/// One uniformly chosen source acts per iteration.
pub fn run_pma<R: Rng + ?Sized>(
    game: &RelayGame,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<SolveOutcome> {
    config.validate()?;
    let mut m = random_matching(game, &config.strategy_space, rng);
    let mut lambda = game.global_satisfaction(&m);
    let mut trace = IterationTrace::new(lambda);
    let mut monitor = ConvergenceMonitor::new(lambda, config);

    for k in 1..=config.max_iterations {
        let source = SourceId(rng.random_range(0..game.num_sources()));
        let candidate = pma_propose(game, &m, source, config, rng);
        let mut step = TraceStep {
            iteration: k,
            lambda,
            actor: Some(source),
            accepted: false,
            utility_delta: 0.0,
        };
        if !candidate.is_empty() {
            let deviation = game.evaluate_deviation(&m, source, &candidate)?;
            let beta = config.beta.at(k, config.beta_max);
            let p = pma_accept(deviation.candidate_utility, deviation.current_utility, beta);
            step.utility_delta = deviation.gain();
            if rng.random::<f64>() < p {
                step.accepted = true;
                if candidate.as_slice() != m.strategy(source) {
                    m.set_strategy(source, &candidate);
                    lambda = game.global_satisfaction(&m);
                    step.lambda = lambda;
                }
            }
        }
        trace.steps.push(step);
        if monitor.observe(k, lambda) {
            trace.convergence_iteration = Some(monitor.last_improvement());
            break;
        }
    }
    Ok(SolveOutcome { matching: m, trace })
}

/// The potential matching approach with every source limited to one radio.
pub fn run_many_to_one<R: Rng + ?Sized>(
    game: &RelayGame,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<SolveOutcome> {
    run_pma(&game.with_quota_cap(1), config, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{is_feasible, SatisfactionParams};
    use crate::radio::CapacityTable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn game(rows: Vec<Vec<f64>>, quotas: Vec<usize>, req_mbps: &[f64]) -> RelayGame {
        let p = SatisfactionParams::default();
        let profiles = req_mbps
            .iter()
            .map(|&q| p.profile(q * 1e6).unwrap())
            .collect();
        RelayGame::new(quotas, CapacityTable::from_rows(rows).unwrap(), profiles).unwrap()
    }

    #[test]
    fn probabilities_follow_weights() {
        assert_eq!(selection_probabilities(&[10e6, 30e6]), vec![0.25, 0.75]);
        assert_eq!(selection_probabilities(&[1.0; 4]), vec![0.25; 4]);
        assert_eq!(selection_probabilities(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn single_draw_frequencies() {
        let g = game(vec![vec![10e6, 30e6]], vec![1], &[20.0]);
        let m = g.empty_matching();
        let cfg = SolverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|_| pma_propose(&g, &m, SourceId(0), &cfg, &mut rng) == vec![RadioId(1)])
            .count();
        let freq = hits as f64 / trials as f64;
        // binomial sd ~ 0.0022
        assert!((freq - 0.75).abs() < 0.011, "{freq}");
    }

    #[test]
    fn equal_weights_uniform() {
        let g = game(vec![vec![5e6; 4]], vec![1], &[20.0]);
        let m = g.empty_matching();
        let cfg = SolverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            let p = pma_propose(&g, &m, SourceId(0), &cfg, &mut rng);
            assert_eq!(p.len(), 1);
            counts[p[0].0] += 1;
        }
        for c in counts {
            assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.012);
        }
    }

    #[test]
    fn proposals_respect_quota_and_skip_zero_weights() {
        let g = game(
            vec![vec![5e6, 0.0, 7e6, 1e6], vec![0.0; 4]],
            vec![3, 2],
            &[20.0, 20.0],
        );
        let m = g.empty_matching();
        let cfg = SolverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = pma_propose(&g, &m, SourceId(0), &cfg, &mut rng);
            assert!((1..=3).contains(&p.len()));
            assert!(!p.contains(&RadioId(1)));
            assert!(p.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(pma_propose(&g, &m, SourceId(1), &cfg, &mut rng).is_empty());
    }

    #[test]
    fn accept_examples() {
        assert_eq!(pma_accept(0.7, 0.7, 5.0), 0.5);
        assert_eq!(pma_accept(3.0, -1.0, 0.0), 0.5);
        assert!(1.0 - pma_accept(1.0, 0.0, 100.0) <= 1e-40);
        assert!(pma_accept(0.0, 1.0, 100.0) < 1e-40);
        assert_eq!(pma_accept(1e6, 0.0, 1e3), 1.0);
        assert_eq!(pma_accept(0.0, 1e6, 1e3), 0.0);
        let p = pma_accept(1.2, 0.9, 2.0);
        let direct = (2.4f64).exp() / ((2.4f64).exp() + (1.8f64).exp());
        assert!((p - direct).abs() < 1e-15);
    }

    #[test]
    fn one_source_one_radio_converges_matched() {
        let g = game(vec![vec![30e6]], vec![1], &[20.0]);
        let cfg = SolverConfig::default();
        let out = run_pma(&g, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(out.matching.strategy(SourceId(0)), &[RadioId(0)]);
        let f = g.source_satisfaction(&out.matching, SourceId(0)).unwrap();
        assert_eq!(out.final_lambda(), f);
        assert!(out.trace.converged());
    }

    #[test]
    fn many_to_one_keeps_single_radios() {
        let g = game(
            vec![vec![30e6, 10e6, 20e6]; 4],
            vec![3, 2, 3, 1],
            &[35.0, 20.0, 30.0, 10.0],
        );
        let cfg = SolverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = run_many_to_one(&g, &cfg, &mut rng).unwrap();
        for n in 0..4 {
            assert!(out.matching.strategy(SourceId(n)).len() <= 1);
        }
        assert!(is_feasible(&out.matching, &[1; 4]));
    }
}
