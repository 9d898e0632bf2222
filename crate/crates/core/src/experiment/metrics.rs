use serde::{Deserialize, Serialize};

use super::ensemble::{EnsembleResult, RunRecord};
use crate::error::{Error, Result};
use crate::solver::SolverKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub num_sources: usize,
    pub solver: SolverKind,
    pub iteration: usize,
    pub mean_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub iteration: usize,
    pub cumulative_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub num_sources: usize,
    pub solver: SolverKind,
    pub runs: usize,
    pub converged: usize,
    pub non_converged_fraction: f64,
    /// 95th percentile over all runs, counting non-converged runs as
    /// infinitely late; empty when more than 5% did not converge.
    pub p95_iteration: Option<usize>,
    pub max_iteration: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionRow {
    pub num_sources: usize,
    pub solver: SolverKind,
    pub replications: usize,
    pub mean_proportion: f64,
    pub std_error: f64,
}

/// Sample mean and standard error of the mean; the error is zero for fewer
/// than two values.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean global satisfaction per iteration for every (size, solver) group,
/// over the longest run of the group.
pub fn mean_trace(result: &EnsembleResult) -> Vec<TraceRow> {
    let mut rows = Vec::new();
    for (n, solver) in result.groups() {
        let runs: Vec<&RunRecord> = result.runs_for(n, solver).collect();
        let horizon = runs.iter().map(|r| r.iterations).max().unwrap_or(0);
        let count = runs.len() as f64;
        for k in 0..=horizon {
            let total: f64 = runs.iter().map(|r| r.lambda_at(k)).sum();
            rows.push(TraceRow {
                num_sources: n,
                solver,
                iteration: k,
                mean_lambda: total / count,
            });
        }
    }
    rows
}

/// Empirical CDF of the convergence iteration over the runs that converged.
///
/// Runs that hit the iteration cap are left out; `convergence_summary`
/// reports them as the non-converged fraction.
pub fn convergence_cdf<'a>(runs: impl IntoIterator<Item = &'a RunRecord>) -> Result<Vec<CdfPoint>> {
    let mut values: Vec<usize> = runs
        .into_iter()
        .filter_map(|r| r.convergence_iteration)
        .collect();
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "no converged runs to build a CDF from".into(),
        ));
    }
    values.sort_unstable();
    let total = values.len() as f64;
    let mut points: Vec<CdfPoint> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let p = (i + 1) as f64 / total;
        match points.last_mut() {
            Some(last) if last.iteration == v => last.cumulative_probability = p,
            _ => points.push(CdfPoint {
                iteration: v,
                cumulative_probability: p,
            }),
        }
    }
    Ok(points)
}

/// Smallest value whose empirical cumulative share reaches `q`, with `None`
/// standing for a run that never converged.
pub fn quantile(values: &[Option<usize>], q: f64) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut sorted: Vec<usize> = values.iter().map(|v| v.unwrap_or(usize::MAX)).collect();
    sorted.sort_unstable();
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1]).filter(|&v| v != usize::MAX)
}

pub fn convergence_summary(result: &EnsembleResult) -> Vec<ConvergenceSummary> {
    result
        .groups()
        .into_iter()
        .map(|(n, solver)| {
            let values: Vec<Option<usize>> = result
                .runs_for(n, solver)
                .map(|r| r.convergence_iteration)
                .collect();
            let converged = values.iter().flatten().count();
            ConvergenceSummary {
                num_sources: n,
                solver,
                runs: values.len(),
                converged,
                non_converged_fraction: (values.len() - converged) as f64 / values.len() as f64,
                p95_iteration: quantile(&values, 0.95),
                max_iteration: values.iter().flatten().copied().max(),
            }
        })
        .collect()
}

/// Mean final satisfaction proportion per network size and solver.
pub fn satisfaction_vs_n(result: &EnsembleResult) -> Vec<SatisfactionRow> {
    result
        .groups()
        .into_iter()
        .map(|(n, solver)| {
            let values: Vec<f64> = result
                .runs_for(n, solver)
                .map(RunRecord::satisfaction_proportion)
                .collect();
            let (mean, se) = mean_and_std_error(&values);
            SatisfactionRow {
                num_sources: n,
                solver,
                replications: values.len(),
                mean_proportion: mean,
                std_error: se,
            }
        })
        .collect()
}

/// Mean and standard error of the per-replication difference in final
/// satisfaction proportion, `a - b`, over replications where both ran.
pub fn paired_difference(
    result: &EnsembleResult,
    num_sources: usize,
    a: SolverKind,
    b: SolverKind,
) -> (f64, f64) {
    let diffs: Vec<f64> = result
        .runs_for(num_sources, a)
        .filter_map(|ra| {
            result
                .runs_for(num_sources, b)
                .find(|rb| rb.replication == ra.replication)
                .map(|rb| ra.satisfaction_proportion() - rb.satisfaction_proportion())
        })
        .collect();
    mean_and_std_error(&diffs)
}
