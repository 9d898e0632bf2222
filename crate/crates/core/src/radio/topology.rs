//! Seeded scenario generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channel::{PathLossModel, Point};
use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};

/// How many radios each source carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceRadios {
    Fixed(usize),
    /// Uniform over `min..=max`.
    Uniform {
        min: usize,
        max: usize,
    },
}

impl Default for SourceRadios {
    fn default() -> Self {
        SourceRadios::Uniform { min: 1, max: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyParams {
    pub area_side_m: f64,
    pub num_sources: usize,
    pub num_relays: usize,
    pub radios_per_relay: usize,
    pub source_radios: SourceRadios,
    pub source_tx_power_dbm: f64,
    pub relay_tx_power_dbm: f64,
    pub requirement_min_bps: f64,
    pub requirement_max_bps: f64,
    pub bandwidth_hz: f64,
    pub noise_density_dbm_per_hz: f64,
    /// Relays are uniform in a disc of this radius around the destination.
    pub relay_radius_m: f64,
    /// Sources are uniform in the part of the square whose distance from the
    /// centre lies in this range, as fractions of the half diagonal.
    pub source_annulus: (f64, f64),
    pub path_loss: PathLossModel,
}

impl Default for TopologyParams {
    fn default() -> Self {
        Self {
            area_side_m: 2000.0,
            num_sources: 13,
            num_relays: 5,
            radios_per_relay: 2,
            source_radios: SourceRadios::default(),
            source_tx_power_dbm: 20.0,
            relay_tx_power_dbm: 30.0,
            requirement_min_bps: 10e6,
            requirement_max_bps: 40e6,
            bandwidth_hz: 10e6,
            noise_density_dbm_per_hz: -174.0,
            relay_radius_m: 200.0,
            source_annulus: (0.6, 1.0),
            path_loss: PathLossModel::default(),
        }
    }
}

impl TopologyParams {
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.num_sources == 0 || self.num_relays == 0 || self.radios_per_relay == 0 {
            return cfg("source, relay and radio counts must be positive");
        }
        if !(self.area_side_m > 0.0) {
            return cfg("area side must be positive");
        }
        if !(self.relay_radius_m >= 0.0) || self.relay_radius_m > self.area_side_m / 2.0 {
            return cfg("relay placement radius must lie within the area");
        }
        let (lo, hi) = self.source_annulus;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return cfg("source annulus must satisfy 0 <= inner < outer <= 1");
        }
        match self.source_radios {
            SourceRadios::Fixed(0) => return cfg("sources need at least one radio"),
            SourceRadios::Uniform { min, max } if min == 0 || min > max => {
                return cfg("source radio range must satisfy 1 <= min <= max")
            }
            _ => {}
        }
        if !(self.requirement_min_bps > 0.0 && self.requirement_min_bps <= self.requirement_max_bps)
        {
            return cfg("requirements must satisfy 0 < min <= max");
        }
        if !(self.bandwidth_hz > 0.0) {
            return cfg("bandwidth must be positive");
        }
        self.path_loss.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceNode {
    pub id: SourceId,
    pub position: Point,
    pub tx_power_dbm: f64,
    /// Number of radios, i.e. the matching quota.
    pub num_radios: usize,
    pub required_rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayRadio {
    pub id: RadioId,
    pub channel: u32,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayNode {
    pub id: usize,
    pub position: Point,
    pub tx_power_dbm: f64,
    pub radios: Vec<RelayRadio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub area_side_m: f64,
    pub destination: Point,
    pub sources: Vec<SourceNode>,
    pub relays: Vec<RelayNode>,
    pub seed: u64,
}

impl Topology {
    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn num_radios(&self) -> usize {
        self.relays.iter().map(|r| r.radios.len()).sum()
    }

    /// All relay radios with their owning relay, in radio id order.
    pub fn radios(&self) -> impl Iterator<Item = (&RelayNode, &RelayRadio)> {
        self.relays
            .iter()
            .flat_map(|relay| relay.radios.iter().map(move |radio| (relay, radio)))
    }

    pub fn quotas(&self) -> Vec<usize> {
        self.sources.iter().map(|s| s.num_radios).collect()
    }

    /// Checks the structural invariants of a topology: positions inside the
    /// area, destination at the centre, dense ids and globally unique channels.
    pub fn validate(&self) -> Result<()> {
        let side = self.area_side_m;
        let inside = |p: &Point| (0.0..=side).contains(&p.x) && (0.0..=side).contains(&p.y);
        let centre = Point::new(side / 2.0, side / 2.0);
        if self.destination != centre {
            return Err(Error::Config("destination must be at the centre".into()));
        }
        if self.sources.is_empty() || self.relays.is_empty() {
            return Err(Error::Config("topology needs sources and relays".into()));
        }
        for (i, s) in self.sources.iter().enumerate() {
            if s.id.index() != i {
                return Err(Error::Config(format!("source {i} has id {}", s.id)));
            }
            if !inside(&s.position) {
                return Err(Error::Config(format!("source {i} lies outside the area")));
            }
            if s.num_radios == 0 || !(s.required_rate_bps > 0.0) {
                return Err(Error::Config(format!(
                    "source {i} needs a radio and a positive requirement"
                )));
            }
        }
        let mut channels = std::collections::HashSet::new();
        for (i, (relay, radio)) in self.radios().enumerate() {
            if radio.id.index() != i {
                return Err(Error::Config(format!("radio {i} has id {}", radio.id)));
            }
            if !inside(&relay.position) {
                return Err(Error::Config(format!(
                    "relay {} lies outside the area",
                    relay.id
                )));
            }
            if !channels.insert(radio.channel) {
                return Err(Error::Config(format!(
                    "channel {} used twice",
                    radio.channel
                )));
            }
            if !(radio.bandwidth_hz > 0.0) {
                return Err(Error::Config(format!("radio {i} has no bandwidth")));
            }
        }
        if self.relays.iter().any(|r| r.radios.is_empty()) {
            return Err(Error::Config("every relay needs a radio".into()));
        }
        Ok(())
    }
}

/// Builds a topology as a pure function of `(params, seed)`.
pub fn generate_topology(params: &TopologyParams, seed: u64) -> Result<Topology> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = params.area_side_m;
    let centre = Point::new(side / 2.0, side / 2.0);

    let mut relays = Vec::with_capacity(params.num_relays);
    let mut next_radio = 0usize;
    for id in 0..params.num_relays {
        // uniform in the disc
        let r = params.relay_radius_m * rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let position = Point::new(centre.x + r * theta.cos(), centre.y + r * theta.sin());
        let radios = (0..params.radios_per_relay)
            .map(|_| {
                let radio = RelayRadio {
                    id: RadioId(next_radio),
                    channel: next_radio as u32,
                    bandwidth_hz: params.bandwidth_hz,
                };
                next_radio += 1;
                radio
            })
            .collect();
        relays.push(RelayNode {
            id,
            position,
            tx_power_dbm: params.relay_tx_power_dbm,
            radios,
        });
    }

    let half_diag = side / std::f64::consts::SQRT_2;
    let (inner, outer) = (
        params.source_annulus.0 * half_diag,
        params.source_annulus.1 * half_diag,
    );
    let mut sources = Vec::with_capacity(params.num_sources);
    for id in 0..params.num_sources {
        let position = loop {
            let p = Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
            let d = p.distance(&centre);
            if d >= inner && d <= outer {
                break p;
            }
        };
        let num_radios = match params.source_radios {
            SourceRadios::Fixed(k) => k,
            SourceRadios::Uniform { min, max } => rng.random_range(min..=max),
        };
        let required_rate_bps = if params.requirement_max_bps > params.requirement_min_bps {
            rng.random_range(params.requirement_min_bps..params.requirement_max_bps)
        } else {
            params.requirement_min_bps
        };
        sources.push(SourceNode {
            id: SourceId(id),
            position,
            tx_power_dbm: params.source_tx_power_dbm,
            num_radios,
            required_rate_bps,
        });
    }

    Ok(Topology {
        area_side_m: side,
        destination: centre,
        sources,
        relays,
        seed,
    })
}
