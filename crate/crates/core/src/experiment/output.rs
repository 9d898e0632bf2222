use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{replication_seed, ExperimentConfig, Metric};
use super::ensemble::{EnsembleResult, RunRecord, SkippedRun, TracePoint};
use crate::error::{Error, Result};
use crate::ids::RadioId;
use crate::matching::Matching;
use crate::solver::SolverKind;

pub const RUNS_FILE: &str = "runs.csv";
pub const TRACE_EVENTS_FILE: &str = "trace_events.csv";
pub const MEAN_TRACE_FILE: &str = "mean_trace.csv";
pub const CDF_FILE: &str = "convergence_cdf.csv";
pub const CONVERGENCE_SUMMARY_FILE: &str = "convergence_summary.csv";
pub const SATISFACTION_FILE: &str = "satisfaction_vs_n.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunRow {
    replication: usize,
    num_sources: usize,
    solver: SolverKind,
    topology_seed: u64,
    solver_seed: u64,
    initial_lambda: f64,
    final_lambda: f64,
    satisfaction_proportion: f64,
    iterations: usize,
    convergence_iteration: Option<usize>,
    /// Radio sets per source: radios joined by `+`, sources by `;`.
    matching: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TraceEventRow {
    replication: usize,
    num_sources: usize,
    solver: SolverKind,
    iteration: usize,
    lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CdfRow {
    num_sources: usize,
    solver: SolverKind,
    iteration: usize,
    cumulative_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedEntry {
    pub replication: usize,
    pub num_sources: usize,
    pub solver: SolverKind,
    pub reason: String,
}

/// Provenance record written next to the CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub software_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub replication_seeds: Vec<u64>,
    pub runs: usize,
    pub skipped: Vec<SkippedEntry>,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub config: ExperimentConfig,
}

fn encode_matching(m: &Matching) -> String {
    (0..m.num_sources())
        .map(|n| {
            m.strategy(crate::ids::SourceId(n))
                .iter()
                .map(|r| r.index().to_string())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn decode_matching(text: &str, num_sources: usize, num_radios: usize) -> Result<Matching> {
    let lists: Vec<Vec<RadioId>> = text
        .split(';')
        .map(|part| {
            part.split('+')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map(RadioId)
                        .map_err(|_| Error::InvalidArgument(format!("bad radio index '{s}'")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if lists.len() != num_sources {
        return Err(Error::InvalidArgument(format!(
            "matching lists {} sources, expected {num_sources}",
            lists.len()
        )));
    }
    Matching::from_assignments(num_radios, lists)
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Writes the per-run records, the selected metric tables and the manifest
/// into `dir`, returning the paths written.
pub fn write_results(result: &EnsembleResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let config = &result.config;
    let mut files = vec![RUNS_FILE, TRACE_EVENTS_FILE];

    write_csv(
        &dir.join(RUNS_FILE),
        result.runs.iter().map(|r| RunRow {
            replication: r.replication,
            num_sources: r.num_sources,
            solver: r.solver,
            topology_seed: r.topology_seed,
            solver_seed: r.solver_seed,
            initial_lambda: r.initial_lambda(),
            final_lambda: r.final_lambda(),
            satisfaction_proportion: r.satisfaction_proportion(),
            iterations: r.iterations,
            convergence_iteration: r.convergence_iteration,
            matching: encode_matching(&r.matching),
        }),
    )?;
    write_csv(
        &dir.join(TRACE_EVENTS_FILE),
        result.runs.iter().flat_map(|r| {
            r.trace.iter().map(move |p| TraceEventRow {
                replication: r.replication,
                num_sources: r.num_sources,
                solver: r.solver,
                iteration: p.iteration,
                lambda: p.lambda,
            })
        }),
    )?;

    if config.wants(Metric::MeanTrace) {
        write_csv(&dir.join(MEAN_TRACE_FILE), result.mean_trace())?;
        files.push(MEAN_TRACE_FILE);
    }
    if config.wants(Metric::ConvergenceCdf) {
        let mut rows = Vec::new();
        for (n, solver) in result.groups() {
            match result.convergence_cdf(n, solver) {
                Ok(points) => rows.extend(points.into_iter().map(|p| CdfRow {
                    num_sources: n,
                    solver,
                    iteration: p.iteration,
                    cumulative_probability: p.cumulative_probability,
                })),
                Err(_) => log::warn!("no converged {solver} runs at N={n}; CDF omitted"),
            }
        }
        write_csv(&dir.join(CDF_FILE), rows)?;
        write_csv(
            &dir.join(CONVERGENCE_SUMMARY_FILE),
            result.convergence_summary(),
        )?;
        files.extend([CDF_FILE, CONVERGENCE_SUMMARY_FILE]);
    }
    if config.wants(Metric::SatisfactionVsN) {
        write_csv(&dir.join(SATISFACTION_FILE), result.satisfaction_vs_n())?;
        files.push(SATISFACTION_FILE);
    }

    let manifest = Manifest {
        name: config.name.clone(),
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        master_seed: config.master_seed,
        replication_seeds: (0..config.replications)
            .map(|i| replication_seed(config.master_seed, i))
            .collect(),
        runs: result.runs.len(),
        skipped: result
            .skipped
            .iter()
            .map(|s| SkippedEntry {
                replication: s.replication,
                num_sources: s.num_sources,
                solver: s.solver,
                reason: s.reason.clone(),
            })
            .collect(),
        files: files.iter().map(|f| f.to_string()).collect(),
        notes: notes(config),
        config: config.clone(),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(dir.join(MANIFEST_FILE), json)?;
    files.push(MANIFEST_FILE);
    Ok(files.into_iter().map(|f| dir.join(f)).collect())
}

fn notes(config: &ExperimentConfig) -> Vec<String> {
    let mut notes = Vec::new();
    if config.solvers.contains(&SolverKind::Substitutable) {
        notes.push(
            "substitutable: stand-in deferred-acceptance baseline with eviction, \
             not the original published procedure"
                .to_string(),
        );
    }
    notes
}

/// Reloads an ensemble from the manifest, run table and trace events in
/// `dir`. Aggregates computed from the result match the written tables.
pub fn read_results(dir: impl AsRef<Path>) -> Result<EnsembleResult> {
    let dir = dir.as_ref();
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let config = manifest.config;
    let num_radios = config.topology.num_relays * config.topology.radios_per_relay;

    let rows: Vec<RunRow> = read_csv(&dir.join(RUNS_FILE))?;
    let events: Vec<TraceEventRow> = read_csv(&dir.join(TRACE_EVENTS_FILE))?;
    let mut events = events.into_iter().peekable();
    let mut runs = Vec::with_capacity(rows.len());
    for row in rows {
        let mut trace = Vec::new();
        while let Some(e) = events.next_if(|e| {
            e.replication == row.replication
                && e.num_sources == row.num_sources
                && e.solver == row.solver
        }) {
            trace.push(TracePoint {
                iteration: e.iteration,
                lambda: e.lambda,
            });
        }
        if trace.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no trace events for replication {} N={} {}",
                row.replication, row.num_sources, row.solver
            )));
        }
        runs.push(RunRecord {
            replication: row.replication,
            num_sources: row.num_sources,
            solver: row.solver,
            topology_seed: row.topology_seed,
            solver_seed: row.solver_seed,
            trace,
            iterations: row.iterations,
            convergence_iteration: row.convergence_iteration,
            matching: decode_matching(&row.matching, row.num_sources, num_radios)?,
        });
    }
    if events.next().is_some() {
        return Err(Error::InvalidArgument(
            "trace events without a matching run".into(),
        ));
    }
    let skipped = manifest
        .skipped
        .into_iter()
        .map(|s| SkippedRun {
            replication: s.replication,
            num_sources: s.num_sources,
            solver: s.solver,
            reason: s.reason,
        })
        .collect();
    Ok(EnsembleResult {
        config,
        runs,
        skipped,
    })
}
