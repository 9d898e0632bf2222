use rayon::prelude::*;

use super::config::{replication_seed, solver_seed, topology_seed, ExperimentConfig};
use super::metrics::{self, CdfPoint, ConvergenceSummary, SatisfactionRow, TraceRow};
use crate::error::{Error, Result};
use crate::matching::{Matching, RelayGame};
use crate::radio::{Scenario, TopologyParams};
use crate::solver::{solve, IterationTrace, SolverKind};

/// Global satisfaction recorded at `iteration` and held until the next point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub lambda: f64,
}

/// Outcome of one solver on one replication's topology.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub replication: usize,
    pub num_sources: usize,
    pub solver: SolverKind,
    pub topology_seed: u64,
    pub solver_seed: u64,
    /// Global satisfaction at iteration 0 and after every iteration that
    /// changed it.
    pub trace: Vec<TracePoint>,
    pub iterations: usize,
    pub convergence_iteration: Option<usize>,
    pub matching: Matching,
}

impl RunRecord {
    fn from_outcome(
        replication: usize,
        num_sources: usize,
        solver: SolverKind,
        seeds: (u64, u64),
        trace: &IterationTrace,
        matching: Matching,
    ) -> Self {
        let mut points = vec![TracePoint {
            iteration: 0,
            lambda: trace.initial_lambda,
        }];
        for step in &trace.steps {
            if step.lambda.to_bits() != points.last().map_or(0, |p| p.lambda.to_bits()) {
                points.push(TracePoint {
                    iteration: step.iteration,
                    lambda: step.lambda,
                });
            }
        }
        Self {
            replication,
            num_sources,
            solver,
            topology_seed: seeds.0,
            solver_seed: seeds.1,
            trace: points,
            iterations: trace.iterations(),
            convergence_iteration: trace.convergence_iteration,
            matching,
        }
    }

    pub fn initial_lambda(&self) -> f64 {
        self.trace[0].lambda
    }

    pub fn final_lambda(&self) -> f64 {
        self.trace
            .last()
            .expect("trace has an initial point")
            .lambda
    }

    /// Final global satisfaction divided by the number of sources.
    pub fn satisfaction_proportion(&self) -> f64 {
        self.final_lambda() / self.num_sources as f64
    }

    /// Global satisfaction after iteration `k`; the final value is carried
    /// past the end of the run.
    pub fn lambda_at(&self, k: usize) -> f64 {
        let idx = self.trace.partition_point(|p| p.iteration <= k);
        self.trace[idx.saturating_sub(1)].lambda
    }
}

/// A run that was not attempted because the instance was too large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRun {
    pub replication: usize,
    pub num_sources: usize,
    pub solver: SolverKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub config: ExperimentConfig,
    /// Ordered by replication, then network size, then solver as configured.
    pub runs: Vec<RunRecord>,
    pub skipped: Vec<SkippedRun>,
}

impl EnsembleResult {
    pub fn runs_for(
        &self,
        num_sources: usize,
        solver: SolverKind,
    ) -> impl Iterator<Item = &RunRecord> {
        self.runs
            .iter()
            .filter(move |r| r.num_sources == num_sources && r.solver == solver)
    }

    /// Solvers and sizes that have at least one run, in configured order.
    pub fn groups(&self) -> Vec<(usize, SolverKind)> {
        let mut out = Vec::new();
        for n in self.config.sizes() {
            for &kind in &self.config.solvers {
                if self.runs_for(n, kind).next().is_some() && !out.contains(&(n, kind)) {
                    out.push((n, kind));
                }
            }
        }
        out
    }

    pub fn mean_trace(&self) -> Vec<TraceRow> {
        metrics::mean_trace(self)
    }

    pub fn convergence_cdf(&self, num_sources: usize, solver: SolverKind) -> Result<Vec<CdfPoint>> {
        metrics::convergence_cdf(self.runs_for(num_sources, solver))
    }

    pub fn convergence_summary(&self) -> Vec<ConvergenceSummary> {
        metrics::convergence_summary(self)
    }

    pub fn satisfaction_vs_n(&self) -> Vec<SatisfactionRow> {
        metrics::satisfaction_vs_n(self)
    }
}

struct WorkItem {
    replication: usize,
    num_sources: usize,
}

enum Slot {
    Run(RunRecord),
    Skipped(SkippedRun),
}

/// Runs every configured solver on every replication and network size.
///
/// All solvers of a replication and size share one topology. Work items run
/// in parallel; results are assembled in replication order, so the output
/// depends only on the configuration.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleResult> {
    config.validate()?;
    let items: Vec<WorkItem> = (0..config.replications)
        .flat_map(|replication| {
            config.sizes().into_iter().map(move |num_sources| WorkItem {
                replication,
                num_sources,
            })
        })
        .collect();

    let slots: Vec<Vec<Slot>> = items
        .par_iter()
        .map(|item| {
            let seed = topology_seed(
                replication_seed(config.master_seed, item.replication),
                item.num_sources,
            );
            run_item(config, item, seed).map_err(|e| Error::Replication {
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut runs = Vec::new();
    let mut skipped = Vec::new();
    for slot in slots.into_iter().flatten() {
        match slot {
            Slot::Run(r) => runs.push(r),
            Slot::Skipped(s) => skipped.push(s),
        }
    }
    Ok(EnsembleResult {
        config: config.clone(),
        runs,
        skipped,
    })
}

fn run_item(config: &ExperimentConfig, item: &WorkItem, topo_seed: u64) -> Result<Vec<Slot>> {
    let params = TopologyParams {
        num_sources: item.num_sources,
        ..config.topology.clone()
    };
    let scenario = Scenario::generate(&params, topo_seed)?;
    let game = RelayGame::from_scenario(&scenario, &config.satisfaction)?;
    let mut out = Vec::with_capacity(config.solvers.len());
    for &kind in &config.solvers {
        let seed = solver_seed(topo_seed, kind);
        let solver = config.solver.with_kind(kind).with_seed(seed);
        match solve(&game, &solver) {
            Ok(outcome) => out.push(Slot::Run(RunRecord::from_outcome(
                item.replication,
                item.num_sources,
                kind,
                (topo_seed, seed),
                &outcome.trace,
                outcome.matching,
            ))),
            Err(Error::TooLarge { what, count, cap }) if kind == SolverKind::Exhaustive => {
                log::warn!("skipping exhaustive search: {count} {what} exceeds {cap}");
                out.push(Slot::Skipped(SkippedRun {
                    replication: item.replication,
                    num_sources: item.num_sources,
                    solver: kind,
                    reason: format!("{count} {what} exceeds cap {cap}"),
                }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
