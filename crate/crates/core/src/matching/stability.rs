//! Strategy enumeration and the unilateral-deviation stability check.

use serde::{Deserialize, Serialize};

use super::state::Matching;
use super::utility::RelayGame;
use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};

/// Gains at or below this are treated as ties.
pub const IMPROVEMENT_EPS: f64 = 1e-10;

/// Default limit on the number of strategies enumerated for one source.
pub const DEFAULT_STRATEGY_CAP: u128 = 1_000_000;

/// Which radio sets a source may play.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategySpace {
    /// Whether holding no radio at all is a strategy.
    pub allow_empty: bool,
    /// Extra cap on the set size on top of each source's quota.
    pub max_size: Option<usize>,
}

impl StrategySpace {
    /// Non-empty sets of at most two radios.
    pub fn pairs() -> Self {
        Self {
            allow_empty: false,
            max_size: Some(2),
        }
    }

    fn size_bounds(&self, quota: usize, num_radios: usize) -> (usize, usize) {
        let hi = quota
            .min(num_radios)
            .min(self.max_size.unwrap_or(usize::MAX));
        let lo = if self.allow_empty { 0 } else { 1 };
        (lo, hi)
    }

    /// Number of strategies available to a source with `quota` radios.
    pub fn count(&self, quota: usize, num_radios: usize) -> u128 {
        let (lo, hi) = self.size_bounds(quota, num_radios);
        (lo..=hi)
            .map(|k| binomial(num_radios as u128, k as u128))
            .sum()
    }

    /// All strategies of a source, each sorted, in lexicographic order.
    pub fn enumerate(
        &self,
        quota: usize,
        num_radios: usize,
        cap: u128,
    ) -> Result<Vec<Vec<RadioId>>> {
        let count = self.count(quota, num_radios);
        if count > cap {
            return Err(Error::TooLarge {
                what: "strategies for one source",
                count,
                cap,
            });
        }
        let (lo, hi) = self.size_bounds(quota, num_radios);
        let mut out = Vec::with_capacity(count as usize);
        let mut current = Vec::new();
        collect_subsets(0, num_radios, lo, hi, &mut current, &mut out);
        Ok(out)
    }

    /// Size of the joint strategy space, saturating at `u128::MAX`.
    pub fn profile_count(&self, quotas: &[usize], num_radios: usize) -> u128 {
        quotas.iter().fold(1u128, |acc, &q| {
            acc.saturating_mul(self.count(q, num_radios))
        })
    }
}

// Depth-first over radio ids yields sets in lexicographic order.
fn collect_subsets(
    start: usize,
    n: usize,
    lo: usize,
    hi: usize,
    current: &mut Vec<RadioId>,
    out: &mut Vec<Vec<RadioId>>,
) {
    if current.len() >= lo {
        out.push(current.clone());
    }
    if current.len() == hi {
        return;
    }
    for r in start..n {
        current.push(RadioId(r));
        collect_subsets(r + 1, n, lo, hi, current, out);
        current.pop();
    }
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// An improving unilateral deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub source: SourceId,
    pub strategy: Vec<RadioId>,
    /// Increase of global satisfaction.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// For each unstable source, its best improving deviation, ordered by
    /// source id.
    pub witnesses: Vec<Witness>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

/// Best deviation of `source` by direct recomputation of global
/// satisfaction, ignoring the current strategy. Ties keep the
/// lexicographically smallest set.
pub fn best_deviation(
    game: &RelayGame,
    m: &Matching,
    source: SourceId,
    space: &StrategySpace,
    cap: u128,
) -> Result<Option<Witness>> {
    let base = game.global_satisfaction(m);
    let mut trial = m.clone();
    let mut best: Option<Witness> = None;
    for strategy in space.enumerate(game.quota(source), game.num_radios(), cap)? {
        if strategy.as_slice() == m.strategy(source) {
            continue;
        }
        trial.set_strategy(source, &strategy);
        let gain = game.global_satisfaction(&trial) - base;
        if gain > IMPROVEMENT_EPS && best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(Witness {
                source,
                strategy,
                gain,
            });
        }
    }
    Ok(best)
}

/// Checks every source for a unilateral change of radios that strictly
/// increases global satisfaction.
pub fn stability_report(
    game: &RelayGame,
    m: &Matching,
    space: &StrategySpace,
    cap: u128,
) -> Result<StabilityReport> {
    let mut witnesses = Vec::new();
    for n in 0..game.num_sources() {
        if let Some(w) = best_deviation(game, m, SourceId(n), space, cap)? {
            witnesses.push(w);
        }
    }
    Ok(StabilityReport { witnesses })
}

/// Returns whether `m` is stable and, if not, one witnessing deviation.
pub fn is_stable(
    game: &RelayGame,
    m: &Matching,
    space: &StrategySpace,
    cap: u128,
) -> Result<(bool, Option<Witness>)> {
    for n in 0..game.num_sources() {
        if let Some(w) = best_deviation(game, m, SourceId(n), space, cap)? {
            return Ok((false, Some(w)));
        }
    }
    Ok((true, None))
}

/// Largest disagreement, over every source and every alternative strategy,
/// between the acceptance-utility change and the change of global
/// satisfaction.
pub fn potential_identity_gap(
    game: &RelayGame,
    m: &Matching,
    space: &StrategySpace,
    cap: u128,
) -> Result<f64> {
    let base = game.global_satisfaction(m);
    let mut worst = 0.0f64;
    for n in 0..game.num_sources() {
        let source = SourceId(n);
        for strategy in space.enumerate(game.quota(source), game.num_radios(), cap)? {
            let utility_gain = game.evaluate_deviation(m, source, &strategy)?.gain();
            let lambda_gain = game.global_satisfaction(&m.with_strategy(source, &strategy)) - base;
            worst = worst.max((utility_gain - lambda_gain).abs());
        }
    }
    Ok(worst)
}
