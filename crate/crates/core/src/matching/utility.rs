//! Rates, satisfaction and the relay-side acceptance utility.

use serde::{Deserialize, Serialize};

use super::state::Matching;
use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};
use crate::radio::{CapacityTable, Scenario};

/// Sigmoid satisfaction parameters of one source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionProfile {
    pub required_rate_bps: f64,
    /// Slope, per bit/s.
    pub lambda: f64,
    pub nu: f64,
}

/// Smallest offset for which a source meeting its requirement is
/// essentially fully satisfied.
pub const MIN_NU: f64 = 7.0;

impl SatisfactionProfile {
    pub fn new(required_rate_bps: f64, lambda: f64, nu: f64) -> Result<Self> {
        let p = Self {
            required_rate_bps,
            lambda,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.nu > MIN_NU && self.nu.is_finite()) {
            return Err(Error::Config(format!(
                "nu must exceed {MIN_NU}, got {}",
                self.nu
            )));
        }
        if !(self.required_rate_bps > 0.0 && self.required_rate_bps.is_finite()) {
            return Err(Error::Config("required rate must be positive".into()));
        }
        Ok(())
    }
}

/// Population-wide satisfaction settings; requirements come from the
/// topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SatisfactionParams {
    pub lambda_per_mbps: f64,
    pub nu: f64,
}

impl Default for SatisfactionParams {
    fn default() -> Self {
        Self {
            lambda_per_mbps: 1.0,
            nu: 7.5,
        }
    }
}

impl SatisfactionParams {
    pub fn profile(&self, required_rate_bps: f64) -> Result<SatisfactionProfile> {
        SatisfactionProfile::new(required_rate_bps, self.lambda_per_mbps * 1e-6, self.nu)
    }
}

/// `1 / (1 + exp(-lambda (u - u' + nu / lambda)))`, evaluated without
/// overflow for any finite rate.
pub fn satisfaction(rate_bps: f64, profile: &SatisfactionProfile) -> f64 {
    let z = profile.lambda * (rate_bps - profile.required_rate_bps + profile.nu / profile.lambda);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_source(m: &Matching, source: SourceId) -> Result<()> {
    if source.0 >= m.num_sources() {
        return Err(Error::UnknownSource(source.0));
    }
    Ok(())
}

/// Rate of `source`: each held radio contributes its pair capacity divided by
/// the radio's load.
pub fn sv_rate(m: &Matching, source: SourceId, caps: &CapacityTable) -> Result<f64> {
    check_source(m, source)?;
    Ok(rate_of(m, source, caps))
}

fn rate_of(m: &Matching, source: SourceId, caps: &CapacityTable) -> f64 {
    m.strategy(source)
        .iter()
        .map(|&r| caps.get(source, r) / m.load(r) as f64)
        .sum()
}

/// Throughput delivered by `radio`: the mean pair capacity of the sources
/// sharing it.
pub fn radio_throughput(m: &Matching, radio: RadioId, caps: &CapacityTable) -> Result<f64> {
    if radio.0 >= m.num_radios() {
        return Err(Error::UnknownRadio(radio.0));
    }
    let on = m.sources_on(radio);
    if on.is_empty() {
        return Ok(0.0);
    }
    Ok(on.iter().map(|&s| caps.get(s, radio)).sum::<f64>() / on.len() as f64)
}

/// Sum of all sources' satisfactions.
pub fn global_satisfaction(
    m: &Matching,
    profiles: &[SatisfactionProfile],
    caps: &CapacityTable,
) -> f64 {
    (0..m.num_sources())
        .map(|n| satisfaction(rate_of(m, SourceId(n), caps), &profiles[n]))
        .sum()
}

/// Everything the utilities need about one game instance: quotas, pair
/// capacities and satisfaction profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayGame {
    quotas: Vec<usize>,
    capacities: CapacityTable,
    profiles: Vec<SatisfactionProfile>,
}

impl RelayGame {
    pub fn new(
        quotas: Vec<usize>,
        capacities: CapacityTable,
        profiles: Vec<SatisfactionProfile>,
    ) -> Result<Self> {
        let n = capacities.num_sources();
        if quotas.len() != n || profiles.len() != n {
            return Err(Error::InvalidArgument(
                "quotas, profiles and capacity rows must agree in length".into(),
            ));
        }
        if quotas.contains(&0) {
            return Err(Error::InvalidArgument(
                "every quota must be at least 1".into(),
            ));
        }
        for p in &profiles {
            p.validate()?;
        }
        Ok(Self {
            quotas,
            capacities,
            profiles,
        })
    }

    pub fn from_scenario(scenario: &Scenario, params: &SatisfactionParams) -> Result<Self> {
        let profiles = scenario
            .topology
            .sources
            .iter()
            .map(|s| params.profile(s.required_rate_bps))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scenario.topology.quotas(), scenario.capacities()?, profiles)
    }

    /// The same game with every quota clamped to at most `cap`.
    pub fn with_quota_cap(&self, cap: usize) -> Self {
        Self {
            quotas: self.quotas.iter().map(|&q| q.min(cap.max(1))).collect(),
            ..self.clone()
        }
    }

    pub fn num_sources(&self) -> usize {
        self.quotas.len()
    }

    pub fn num_radios(&self) -> usize {
        self.capacities.num_radios()
    }

    pub fn quota(&self, source: SourceId) -> usize {
        self.quotas[source.0]
    }

    pub fn quotas(&self) -> &[usize] {
        &self.quotas
    }

    pub fn capacities(&self) -> &CapacityTable {
        &self.capacities
    }

    pub fn profiles(&self) -> &[SatisfactionProfile] {
        &self.profiles
    }

    pub fn empty_matching(&self) -> Matching {
        Matching::empty(self.num_sources(), self.num_radios())
    }

    pub fn sv_rate(&self, m: &Matching, source: SourceId) -> Result<f64> {
        sv_rate(m, source, &self.capacities)
    }

    pub fn source_satisfaction(&self, m: &Matching, source: SourceId) -> Result<f64> {
        Ok(satisfaction(
            self.sv_rate(m, source)?,
            &self.profiles[source.0],
        ))
    }

    pub fn global_satisfaction(&self, m: &Matching) -> f64 {
        global_satisfaction(m, &self.profiles, &self.capacities)
    }

    /// Rejects strategies that are unsorted, repeat a radio, name an unknown
    /// radio or exceed the source's quota.
    pub fn check_strategy(&self, source: SourceId, strategy: &[RadioId]) -> Result<()> {
        if source.0 >= self.num_sources() {
            return Err(Error::UnknownSource(source.0));
        }
        if let Some(r) = strategy.iter().find(|r| r.0 >= self.num_radios()) {
            return Err(Error::UnknownRadio(r.0));
        }
        if !strategy.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "strategy must be sorted and free of duplicates".into(),
            ));
        }
        if strategy.len() > self.quota(source) {
            return Err(Error::QuotaViolation {
                source_id: source.0,
                len: strategy.len(),
                quota: self.quota(source),
            });
        }
        Ok(())
    }

    /// Satisfaction of `k` when `deviator` plays `deviation` (`None` meaning
    /// the deviator holds no radio) and everybody else keeps their radios.
    fn satisfaction_under(
        &self,
        m: &Matching,
        k: SourceId,
        deviator: SourceId,
        deviation: Option<&[RadioId]>,
    ) -> f64 {
        let held = m.strategy(deviator);
        let load = |r: RadioId| {
            let mut a = m.load(r);
            if held.binary_search(&r).is_ok() {
                a -= 1;
            }
            if deviation.is_some_and(|d| d.binary_search(&r).is_ok()) {
                a += 1;
            }
            a
        };
        let radios: &[RadioId] = if k == deviator {
            deviation.unwrap_or(&[])
        } else {
            m.strategy(k)
        };
        let rate: f64 = radios
            .iter()
            .map(|&r| self.capacities.get(k, r) / load(r) as f64)
            .sum();
        satisfaction(rate, &self.profiles[k.0])
    }

    /// Acceptance utility of the relay radios for `source` playing
    /// `strategy`: the source's own satisfaction plus, for every `k` in
    /// `affected`, the change in `k`'s satisfaction caused by `source` being
    /// present rather than absent. `source` itself is skipped if listed.
    pub fn relay_utility_over(
        &self,
        m: &Matching,
        source: SourceId,
        strategy: &[RadioId],
        affected: &[SourceId],
    ) -> Result<f64> {
        self.check_strategy(source, strategy)?;
        let own = self.satisfaction_under(m, source, source, Some(strategy));
        let externality: f64 = affected
            .iter()
            .filter(|&&k| k != source)
            .map(|&k| {
                self.satisfaction_under(m, k, source, Some(strategy))
                    - self.satisfaction_under(m, k, source, None)
            })
            .sum();
        Ok(own + externality)
    }

    /// Acceptance utility of `strategy`, with the affected set taken over
    /// the union of `strategy` and the source's current radios.
    pub fn relay_utility(
        &self,
        m: &Matching,
        source: SourceId,
        strategy: &[RadioId],
    ) -> Result<f64> {
        let affected = interference_set(m, source, strategy);
        self.relay_utility_over(m, source, strategy, &affected)
    }

    /// Evaluates a switch of `source` from its current radios to
    /// `candidate`, scoring both with the same affected set.
    pub fn evaluate_deviation(
        &self,
        m: &Matching,
        source: SourceId,
        candidate: &[RadioId],
    ) -> Result<Deviation> {
        let affected = interference_set(m, source, candidate);
        let current = m.strategy(source);
        Ok(Deviation {
            current_utility: self.relay_utility_over(m, source, current, &affected)?,
            candidate_utility: self.relay_utility_over(m, source, candidate, &affected)?,
            affected,
        })
    }
}

/// Utilities of a source's current and candidate radio sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub current_utility: f64,
    pub candidate_utility: f64,
    pub affected: Vec<SourceId>,
}

impl Deviation {
    pub fn gain(&self) -> f64 {
        self.candidate_utility - self.current_utility
    }
}

/// Sources other than `source` that hold any radio in `candidate` or in
/// `source`'s current set. Sorted and deduplicated.
pub fn interference_set(m: &Matching, source: SourceId, candidate: &[RadioId]) -> Vec<SourceId> {
    let mut set: Vec<SourceId> = candidate
        .iter()
        .chain(m.strategy(source))
        .filter(|r| r.0 < m.num_radios())
        .flat_map(|&r| m.sources_on(r).iter().copied())
        .filter(|&k| k != source)
        .collect();
    set.sort_unstable();
    set.dedup();
    set
}

/// True iff `m` is a valid matching for sources with the given quotas: both
/// directions agree, no source holds a radio twice, ids are in range and
/// every source respects its quota.
pub fn is_feasible(m: &Matching, quotas: &[usize]) -> bool {
    let by_source = m.by_source();
    let by_radio = m.by_radio();
    if by_source.len() != quotas.len() {
        return false;
    }
    let num_radios = by_radio.len();
    for (n, radios) in by_source.iter().enumerate() {
        if radios.len() > quotas[n] || !radios.windows(2).all(|w| w[0] < w[1]) {
            return false;
        }
        for r in radios {
            if r.0 >= num_radios || by_radio[r.0].binary_search(&SourceId(n)).is_err() {
                return false;
            }
        }
    }
    let mut links = 0usize;
    for (l, sources) in by_radio.iter().enumerate() {
        if !sources.windows(2).all(|w| w[0] < w[1]) {
            return false;
        }
        for s in sources {
            if s.0 >= by_source.len() || by_source[s.0].binary_search(&RadioId(l)).is_err() {
                return false;
            }
        }
        links += sources.len();
    }
    links == by_source.iter().map(Vec::len).sum::<usize>()
}
