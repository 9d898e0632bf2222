//! Link gains, per-pair capacities and the replayable scenario document.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::channel::{af_capacity, path_gain, snr, PathLossModel};
use super::topology::{generate_topology, Topology, TopologyParams};
use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};

const SHADOWING_STREAM: u64 = 0x5348_4144_4f57_0001;

/// Linear power gains `|h|^2` for every source -> relay and relay ->
/// destination pair, plus the noise density used to derive per-channel noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGainTable {
    /// `source_relay[n][m]`
    pub source_relay: Vec<Vec<f64>>,
    /// `relay_destination[m]`
    pub relay_destination: Vec<f64>,
    pub noise_density_w_per_hz: f64,
}

impl LinkGainTable {
    /// Evaluates the path-loss model on every pair. Shadowing, when
    /// configured, is drawn from a stream derived from the topology seed.
    pub fn compute(
        topology: &Topology,
        model: &PathLossModel,
        noise_density_dbm_per_hz: f64,
    ) -> Result<Self> {
        model.validate()?;
        let mut shadow = ShadowSampler::new(model.shadowing_sigma_db, topology.seed)?;
        let source_relay = topology
            .sources
            .iter()
            .map(|s| {
                topology
                    .relays
                    .iter()
                    .map(|r| shadow.apply(path_gain(s.position, r.position, model)))
                    .collect()
            })
            .collect();
        let relay_destination = topology
            .relays
            .iter()
            .map(|r| shadow.apply(path_gain(r.position, topology.destination, model)))
            .collect();
        Ok(Self {
            source_relay,
            relay_destination,
            noise_density_w_per_hz: super::channel::dbm_to_watts(noise_density_dbm_per_hz),
        })
    }

    pub fn noise_power(&self, bandwidth_hz: f64) -> f64 {
        self.noise_density_w_per_hz * bandwidth_hz
    }

    pub fn validate(&self, topology: &Topology) -> Result<()> {
        let shape_ok = self.source_relay.len() == topology.sources.len()
            && self
                .source_relay
                .iter()
                .all(|row| row.len() == topology.relays.len())
            && self.relay_destination.len() == topology.relays.len();
        if !shape_ok {
            return Err(Error::Config(
                "gain table does not cover the topology".into(),
            ));
        }
        let all_positive = self
            .source_relay
            .iter()
            .flatten()
            .chain(&self.relay_destination)
            .all(|g| *g > 0.0 && g.is_finite());
        if !all_positive || !(self.noise_density_w_per_hz > 0.0) {
            return Err(Error::Config("gains and noise must be positive".into()));
        }
        Ok(())
    }
}

struct ShadowSampler {
    normal: Option<Normal<f64>>,
    rng: ChaCha8Rng,
}

impl ShadowSampler {
    fn new(sigma_db: f64, seed: u64) -> Result<Self> {
        let normal = if sigma_db > 0.0 {
            Some(Normal::new(0.0, sigma_db).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            normal,
            rng: ChaCha8Rng::seed_from_u64(seed ^ SHADOWING_STREAM),
        })
    }

    fn apply(&mut self, gain: f64) -> f64 {
        match &self.normal {
            Some(n) => gain * 10f64.powf(-n.sample(&mut self.rng) / 10.0),
            None => gain,
        }
    }
}

/// AF capacity in bits/s for every (source, relay radio) pair, row-major by
/// source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityTable {
    num_sources: usize,
    num_radios: usize,
    values: Vec<f64>,
}

impl CapacityTable {
    /// Builds a table from explicit rows, one per source.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let num_sources = rows.len();
        let num_radios = rows.first().map_or(0, Vec::len);
        if num_sources == 0 || num_radios == 0 {
            return Err(Error::InvalidArgument(
                "capacity table must be non-empty".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != num_radios) {
            return Err(Error::InvalidArgument("ragged capacity table".into()));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidArgument(
                "capacities must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            num_sources,
            num_radios,
            values,
        })
    }

    pub fn compute(topology: &Topology, gains: &LinkGainTable) -> Result<Self> {
        gains.validate(topology)?;
        let mut rows = Vec::with_capacity(topology.sources.len());
        for (n, source) in topology.sources.iter().enumerate() {
            let mut row = Vec::with_capacity(topology.num_radios());
            for (m, relay) in topology.relays.iter().enumerate() {
                for radio in &relay.radios {
                    let noise = gains.noise_power(radio.bandwidth_hz);
                    let sr = snr(source.tx_power_dbm, gains.source_relay[n][m], noise)?;
                    let rd = snr(relay.tx_power_dbm, gains.relay_destination[m], noise)?;
                    row.push(af_capacity(sr, rd, radio.bandwidth_hz));
                }
            }
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    pub fn num_radios(&self) -> usize {
        self.num_radios
    }

    #[inline]
    pub fn get(&self, source: SourceId, radio: RadioId) -> f64 {
        self.values[source.0 * self.num_radios + radio.0]
    }

    pub fn row(&self, source: SourceId) -> &[f64] {
        &self.values[source.0 * self.num_radios..(source.0 + 1) * self.num_radios]
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }
}

/// A topology together with its gain table: everything needed to replay an
/// experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: Topology,
    pub gains: LinkGainTable,
}

impl Scenario {
    pub fn generate(params: &TopologyParams, seed: u64) -> Result<Self> {
        let topology = generate_topology(params, seed)?;
        let gains = LinkGainTable::compute(
            &topology,
            &params.path_loss,
            params.noise_density_dbm_per_hz,
        )?;
        Ok(Self { topology, gains })
    }

    pub fn capacities(&self) -> Result<CapacityTable> {
        CapacityTable::compute(&self.topology, &self.gains)
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.gains.validate(&self.topology)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Self = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacities_finite_and_non_negative() {
        for seed in 0..10 {
            let sc = Scenario::generate(&TopologyParams::default(), seed).unwrap();
            let caps = sc.capacities().unwrap();
            assert_eq!(caps.num_sources(), 13);
            assert_eq!(caps.num_radios(), 10);
            for n in 0..13 {
                assert!(caps
                    .row(SourceId(n))
                    .iter()
                    .all(|c| c.is_finite() && *c >= 0.0));
            }
        }
    }

    #[test]
    fn radios_of_one_relay_share_capacity() {
        let sc = Scenario::generate(&TopologyParams::default(), 5).unwrap();
        let caps = sc.capacities().unwrap();
        for n in 0..13 {
            assert_eq!(
                caps.get(SourceId(n), RadioId(0)),
                caps.get(SourceId(n), RadioId(1))
            );
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let params = TopologyParams {
            path_loss: PathLossModel {
                shadowing_sigma_db: 4.0,
                ..PathLossModel::default()
            },
            ..Default::default()
        };
        let sc = Scenario::generate(&params, 99).unwrap();
        let back = Scenario::from_json(&sc.to_json().unwrap()).unwrap();
        assert_eq!(sc, back);
        assert_eq!(sc.capacities().unwrap(), back.capacities().unwrap());
    }

    #[test]
    fn shadowing_changes_gains_deterministically() {
        let mut params = TopologyParams::default();
        let plain = Scenario::generate(&params, 11).unwrap();
        params.path_loss.shadowing_sigma_db = 6.0;
        let a = Scenario::generate(&params, 11).unwrap();
        let b = Scenario::generate(&params, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(plain.gains, a.gains);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(CapacityTable::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(CapacityTable::from_rows(vec![]).is_err());
        assert!(CapacityTable::from_rows(vec![vec![-1.0]]).is_err());
    }
}
