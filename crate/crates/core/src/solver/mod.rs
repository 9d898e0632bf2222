//! Solvers for the relay matching game.
//!
//! All solvers share [`SolverConfig`] and return a [`SolveOutcome`]: the final
//! matching plus an [`IterationTrace`] of global satisfaction. The
//! substitutable baseline is a deferred-acceptance stand-in for a matching
//! scheme with substitution, not a reproduction of any particular published
//! procedure.

mod best_response;
mod exhaustive;
mod pma;
mod substitutable;
mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use best_response::run_best_response;
pub use exhaustive::{exhaustive_search, DEFAULT_ORACLE_CAP};
pub use pma::{pma_accept, pma_propose, run_many_to_one, run_pma, selection_probabilities};
pub use substitutable::run_substitutable_baseline;
pub use trace::{IterationTrace, TraceStep};

use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};
use crate::matching::{Matching, RelayGame, StrategySpace, DEFAULT_STRATEGY_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Pma,
    BestResponse,
    ManyToOne,
    /// Stand-in deferred-acceptance baseline with eviction.
    Substitutable,
    Exhaustive,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Pma,
        SolverKind::BestResponse,
        SolverKind::ManyToOne,
        SolverKind::Substitutable,
        SolverKind::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pma => "pma",
            SolverKind::BestResponse => "best_response",
            SolverKind::ManyToOne => "many_to_one",
            SolverKind::Substitutable => "substitutable",
            SolverKind::Exhaustive => "exhaustive",
        }
    }

    /// Stable per-kind index used to derive independent random streams.
    pub fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown solver '{s}'")))
    }
}

/// Learning parameter as a function of the iteration number `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSchedule {
    /// `beta(k) = slope * k`
    Linear {
        slope: f64,
    },
    Constant {
        beta: f64,
    },
}

impl Default for BetaSchedule {
    fn default() -> Self {
        BetaSchedule::Linear { slope: 1.0 }
    }
}

impl BetaSchedule {
    pub fn at(&self, k: usize, beta_max: f64) -> f64 {
        let beta = match *self {
            BetaSchedule::Linear { slope } => slope * k as f64,
            BetaSchedule::Constant { beta } => beta,
        };
        beta.min(beta_max)
    }
}

/// What an iteration's global satisfaction is compared with to decide
/// whether it improved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// The value after the previous iteration.
    #[default]
    PreviousIteration,
    /// The best value seen so far in the run.
    BestSoFar,
}

/// Per-radio weight used when a source samples a candidate radio set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attractiveness {
    /// Pair capacity, independent of the other sources.
    #[default]
    RawCapacity,
    /// Pair capacity divided by the load the source would share.
    LoadShared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub beta: BetaSchedule,
    pub beta_max: f64,
    pub max_iterations: usize,
    /// Iterations without an improvement before declaring convergence.
    pub stop_window: usize,
    pub stop_rule: StopRule,
    /// Minimum increase of global satisfaction that counts as an
    /// improvement for the stop rule. The default matches the resolution of
    /// the acceptance rule at `beta_max`.
    pub improvement_tol: f64,
    pub attractiveness: Attractiveness,
    pub strategy_space: StrategySpace,
    /// Per-radio quota of the substitutable baseline; `None` means
    /// `ceil(N / L)`.
    pub substitutable_quota: Option<usize>,
    pub enumeration_cap: u128,
    pub oracle_cap: u128,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Pma,
            beta: BetaSchedule::default(),
            beta_max: 1e3,
            max_iterations: 1000,
            stop_window: 50,
            stop_rule: StopRule::default(),
            improvement_tol: 1e-3,
            attractiveness: Attractiveness::default(),
            strategy_space: StrategySpace::default(),
            substitutable_quota: None,
            enumeration_cap: DEFAULT_STRATEGY_CAP,
            oracle_cap: DEFAULT_ORACLE_CAP,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_kind(&self, kind: SolverKind) -> Self {
        Self {
            kind,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.stop_window == 0 {
            return Err(Error::Config(
                "max_iterations and stop_window must be at least 1".into(),
            ));
        }
        if !(self.beta_max >= 0.0) {
            return Err(Error::Config("beta_max must be non-negative".into()));
        }
        let beta_ok = match self.beta {
            BetaSchedule::Linear { slope } => slope >= 0.0 && slope.is_finite(),
            BetaSchedule::Constant { beta } => beta >= 0.0 && beta.is_finite(),
        };
        if !beta_ok {
            return Err(Error::Config("beta must be finite and non-negative".into()));
        }
        if !(self.improvement_tol >= 0.0) {
            return Err(Error::Config("improvement_tol must be non-negative".into()));
        }
        if self.substitutable_quota == Some(0) {
            return Err(Error::Config(
                "substitutable quota must be at least 1".into(),
            ));
        }
        if self.strategy_space.max_size == Some(0) && !self.strategy_space.allow_empty {
            return Err(Error::Config("strategy space is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub matching: Matching,
    pub trace: IterationTrace,
}

impl SolveOutcome {
    pub fn final_lambda(&self) -> f64 {
        self.trace.final_lambda()
    }
}

/// Runs the solver selected by `config.kind` with a generator seeded from
/// `config.seed`.
pub fn solve(game: &RelayGame, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.kind {
        SolverKind::Pma => run_pma(game, config, &mut rng),
        SolverKind::ManyToOne => run_many_to_one(game, config, &mut rng),
        SolverKind::BestResponse => run_best_response(game, config, &mut rng),
        SolverKind::Substitutable => run_substitutable_baseline(game, config),
        SolverKind::Exhaustive => {
            let (matching, lambda) =
                exhaustive_search(game, &config.strategy_space, config.oracle_cap)?;
            Ok(SolveOutcome {
                matching,
                trace: IterationTrace::new(lambda).converged_at(0),
            })
        }
    }
}

/// Largest set size a source may play under `space`.
pub(crate) fn max_set_size(game: &RelayGame, source: SourceId, space: &StrategySpace) -> usize {
    game.quota(source)
        .min(game.num_radios())
        .min(space.max_size.unwrap_or(usize::MAX))
}

/// Initial state: every source picks a uniformly random non-empty radio set
/// of uniformly random size.
pub fn random_matching<R: Rng + ?Sized>(
    game: &RelayGame,
    space: &StrategySpace,
    rng: &mut R,
) -> Matching {
    let mut m = game.empty_matching();
    for n in 0..game.num_sources() {
        let hi = max_set_size(game, SourceId(n), space);
        if hi == 0 {
            continue;
        }
        let size = rng.random_range(1..=hi);
        let mut radios: Vec<RadioId> = rand::seq::index::sample(rng, game.num_radios(), size)
            .into_iter()
            .map(RadioId)
            .collect();
        radios.sort_unstable();
        m.set_strategy(SourceId(n), &radios);
    }
    m
}

/// Tracks the stop rule shared by the iterative solvers.
pub(crate) struct ConvergenceMonitor {
    reference: f64,
    last_improvement: usize,
    tol: f64,
    window: usize,
    rule: StopRule,
}

impl ConvergenceMonitor {
    pub(crate) fn new(initial: f64, config: &SolverConfig) -> Self {
        Self {
            reference: initial,
            last_improvement: 0,
            tol: config.improvement_tol,
            window: config.stop_window,
            rule: config.stop_rule,
        }
    }

    /// Records iteration `k` and returns true once the window has passed
    /// without an improvement.
    pub(crate) fn observe(&mut self, k: usize, lambda: f64) -> bool {
        if lambda > self.reference + self.tol {
            self.last_improvement = k;
        }
        if self.rule == StopRule::PreviousIteration || lambda > self.reference + self.tol {
            self.reference = lambda;
        }
        k - self.last_improvement >= self.window
    }

    pub(crate) fn last_improvement(&self) -> usize {
        self.last_improvement
    }
}
