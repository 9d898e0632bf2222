use crate::error::{Error, Result};
use crate::ids::SourceId;
use crate::matching::{Matching, RelayGame, StrategySpace};

/// Default limit on the number of joint strategy profiles enumerated.
pub const DEFAULT_ORACLE_CAP: u128 = 100_000_000;

/// Global maximizer of total satisfaction over the full joint strategy
/// space. Profiles are visited in lexicographic order of (source id, sorted
/// radio ids) and the first maximum is kept.
pub fn exhaustive_search(
    game: &RelayGame,
    space: &StrategySpace,
    cap: u128,
) -> Result<(Matching, f64)> {
    let count = space.profile_count(game.quotas(), game.num_radios());
    if count > cap {
        return Err(Error::TooLarge {
            what: "strategy profiles",
            count,
            cap,
        });
    }
    let strategies = (0..game.num_sources())
        .map(|n| space.enumerate(game.quota(SourceId(n)), game.num_radios(), u128::MAX))
        .collect::<Result<Vec<_>>>()?;
    if strategies.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument("a source has no strategy".into()));
    }

    let n = game.num_sources();
    let mut digits = vec![0usize; n];
    let mut m = game.empty_matching();
    for (s, list) in strategies.iter().enumerate() {
        m.set_strategy(SourceId(s), &list[0]);
    }
    let mut best = (m.clone(), game.global_satisfaction(&m));
    loop {
        // odometer: the last source varies fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < strategies[pos].len() {
                m.set_strategy(SourceId(pos), &strategies[pos][digits[pos]]);
                break;
            }
            digits[pos] = 0;
            m.set_strategy(SourceId(pos), &strategies[pos][0]);
        }
        let lambda = game.global_satisfaction(&m);
        if lambda > best.1 {
            best = (m.clone(), lambda);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::RadioId;
    use crate::matching::SatisfactionParams;
    use crate::radio::CapacityTable;

    fn game(rows: Vec<Vec<f64>>, quotas: Vec<usize>, req_mbps: &[f64]) -> RelayGame {
        let p = SatisfactionParams::default();
        let profiles = req_mbps
            .iter()
            .map(|&q| p.profile(q * 1e6).unwrap())
            .collect();
        RelayGame::new(quotas, CapacityTable::from_rows(rows).unwrap(), profiles).unwrap()
    }

    #[test]
    fn picks_better_radio() {
        let g = game(vec![vec![12e6, 28e6]], vec![1], &[25.0]);
        let (m, lambda) = exhaustive_search(&g, &StrategySpace::default(), 100).unwrap();
        assert_eq!(m.strategy(SourceId(0)), &[RadioId(1)]);
        assert_eq!(lambda, g.global_satisfaction(&m));
    }

    #[test]
    fn paper_scale_is_over_cap() {
        let g = game(vec![vec![1e6; 10]; 13], vec![2; 13], &[20.0; 13]);
        let err = exhaustive_search(&g, &StrategySpace::pairs(), DEFAULT_ORACLE_CAP).unwrap_err();
        match err {
            Error::TooLarge { count, .. } => assert_eq!(count, 55u128.pow(13)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn ties_resolve_lexicographically() {
        // two identical radios, one source: both choices tie
        let g = game(vec![vec![30e6, 30e6]], vec![1], &[20.0]);
        let (m, _) = exhaustive_search(&g, &StrategySpace::default(), 100).unwrap();
        assert_eq!(m.strategy(SourceId(0)), &[RadioId(0)]);
    }

    #[test]
    fn matches_naive_enumeration() {
        let g = game(
            vec![
                vec![20e6, 35e6, 10e6],
                vec![30e6, 15e6, 25e6],
                vec![12e6, 22e6, 40e6],
            ],
            vec![2, 1, 2],
            &[30.0, 18.0, 25.0],
        );
        let space = StrategySpace::default();
        let (_, best) = exhaustive_search(&g, &space, u128::MAX).unwrap();
        let lists: Vec<_> = (0..3)
            .map(|n| space.enumerate(g.quota(SourceId(n)), 3, 1000).unwrap())
            .collect();
        let mut naive = f64::NEG_INFINITY;
        for a in &lists[0] {
            for b in &lists[1] {
                for c in &lists[2] {
                    let m = Matching::from_assignments(3, vec![a.clone(), b.clone(), c.clone()])
                        .unwrap();
                    naive = naive.max(g.global_satisfaction(&m));
                }
            }
        }
        assert_eq!(best, naive);
    }
}
