use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matching::SatisfactionParams;
use crate::radio::TopologyParams;
use crate::solver::{SolverConfig, SolverKind};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "RELAYMATCH_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean global satisfaction per iteration.
    MeanTrace,
    ConvergenceCdf,
    /// Mean final satisfaction proportion per network size.
    SatisfactionVsN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub name: String,
    pub topology: TopologyParams,
    /// Network sizes to sweep; empty means `topology.num_sources` only.
    pub source_counts: Vec<usize>,
    pub solvers: Vec<SolverKind>,
    /// Shared solver settings; `kind` and `seed` are set per run.
    pub solver: SolverConfig,
    pub satisfaction: SatisfactionParams,
    pub replications: usize,
    pub master_seed: u64,
    pub metrics: Vec<Metric>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            topology: TopologyParams::default(),
            source_counts: Vec::new(),
            solvers: vec![SolverKind::Pma],
            solver: SolverConfig::default(),
            satisfaction: SatisfactionParams::default(),
            replications: 1,
            master_seed: 0,
            metrics: vec![
                Metric::MeanTrace,
                Metric::ConvergenceCdf,
                Metric::SatisfactionVsN,
            ],
            output_dir: None,
        }
    }
}

const FIG2: &str = include_str!("../../presets/fig2.json");
const FIG3: &str = include_str!("../../presets/fig3.json");
const FIG4: &str = include_str!("../../presets/fig4.json");

impl ExperimentConfig {
    pub const PRESETS: [&'static str; 3] = ["fig2", "fig3", "fig4"];

    /// Built-in experiment definitions: `fig2` (convergence against the
    /// optimum), `fig3` (convergence time CDF), `fig4` (satisfaction versus
    /// network size).
    pub fn preset(name: &str) -> Result<Self> {
        let text = match name {
            "fig2" => FIG2,
            "fig3" => FIG3,
            "fig4" => FIG4,
            other => return Err(Error::Config(format!("unknown preset '{other}'"))),
        };
        Self::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("at least one solver is required".into()));
        }
        if self.source_counts.contains(&0) {
            return Err(Error::Config("source counts must be positive".into()));
        }
        self.topology.validate()?;
        self.solver.validate()?;
        self.satisfaction.profile(1.0).map(|_| ())
    }

    pub fn sizes(&self) -> Vec<usize> {
        if self.source_counts.is_empty() {
            vec![self.topology.num_sources]
        } else {
            self.source_counts.clone()
        }
    }

    pub fn wants(&self, metric: Metric) -> bool {
        self.metrics.contains(&metric)
    }

    /// Output directory: the environment override, else the configured
    /// directory, else `results/<name>`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            return PathBuf::from(dir);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("results").join(&self.name))
    }

    /// SHA-256 of the canonical JSON form of this configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed: `splitmix64(parent + stream * phi)`
/// where `phi = 0x9E3779B97F4A7C15`.
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    splitmix64(parent.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Seed of replication `index`, shared by every network size and solver in
/// that replication.
pub fn replication_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64 + 1)
}

/// Seed of the topology for `num_sources` sources in a replication.
pub fn topology_seed(replication_seed: u64, num_sources: usize) -> u64 {
    derive_seed(replication_seed, 1_000_000 + num_sources as u64)
}

/// Seed of one solver's random stream on a given topology.
pub fn solver_seed(topology_seed: u64, kind: SolverKind) -> u64 {
    derive_seed(topology_seed, kind.stream())
}
