use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ids::SourceId;

/// One solver iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    /// Global satisfaction after the iteration.
    pub lambda: f64,
    pub actor: Option<SourceId>,
    pub accepted: bool,
    /// Change of the acting source's acceptance utility that was evaluated,
    /// zero where not applicable.
    #[serde(skip)]
    pub utility_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub initial_lambda: f64,
    pub steps: Vec<TraceStep>,
    /// Last iteration that improved the best global satisfaction, when the
    /// run terminated by its own stop rule.
    pub convergence_iteration: Option<usize>,
}

#[derive(Serialize)]
struct CsvRow {
    iteration: usize,
    lambda: f64,
    actor: Option<usize>,
    accepted: bool,
}

impl IterationTrace {
    pub fn new(initial_lambda: f64) -> Self {
        Self {
            initial_lambda,
            steps: Vec::new(),
            convergence_iteration: None,
        }
    }

    pub(crate) fn converged_at(mut self, k: usize) -> Self {
        self.convergence_iteration = Some(k);
        self
    }

    pub fn final_lambda(&self) -> f64 {
        self.steps.last().map_or(self.initial_lambda, |s| s.lambda)
    }

    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn converged(&self) -> bool {
        self.convergence_iteration.is_some()
    }

    /// Global satisfaction after iteration `k`, carrying the final value
    /// forward past the end of the run.
    pub fn lambda_at(&self, k: usize) -> f64 {
        if k == 0 {
            return self.initial_lambda;
        }
        match self.steps.get(k - 1) {
            Some(step) => step.lambda,
            None => self.final_lambda(),
        }
    }

    /// Writes `iteration,lambda,actor,accepted` rows, one per step.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.steps {
            w.serialize(CsvRow {
                iteration: s.iteration,
                lambda: s.lambda,
                actor: s.actor.map(SourceId::index),
                accepted: s.accepted,
            })?;
        }
        if self.steps.is_empty() {
            w.write_record(["iteration", "lambda", "actor", "accepted"])?;
        }
        w.flush()?;
        Ok(())
    }
}
