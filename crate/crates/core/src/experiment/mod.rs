//! Seeded topology ensembles, aggregate metrics and result files.

mod config;
mod ensemble;
pub mod metrics;
mod output;

pub use config::{
    derive_seed, replication_seed, solver_seed, splitmix64, topology_seed, ExperimentConfig,
    Metric, OUTPUT_DIR_ENV,
};
pub use ensemble::{run_ensemble, EnsembleResult, RunRecord, SkippedRun, TracePoint};
pub use metrics::{CdfPoint, ConvergenceSummary, SatisfactionRow, TraceRow};
pub use output::{
    read_results, write_results, Manifest, CDF_FILE, CONVERGENCE_SUMMARY_FILE, MANIFEST_FILE,
    MEAN_TRACE_FILE, RUNS_FILE, SATISFACTION_FILE, TRACE_EVENTS_FILE,
};
