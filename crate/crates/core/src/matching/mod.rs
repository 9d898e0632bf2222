//! The many-to-many relay matching game: matchings, satisfaction-based
//! utilities, feasibility and stability.

mod stability;
mod state;
mod utility;

pub use stability::{
    best_deviation, binomial, is_stable, potential_identity_gap, stability_report, StabilityReport,
    StrategySpace, Witness, DEFAULT_STRATEGY_CAP, IMPROVEMENT_EPS,
};
pub use state::{normalize_strategy, Matching, MatchingDocument};
pub use utility::{
    global_satisfaction, interference_set, is_feasible, radio_throughput, satisfaction, sv_rate,
    Deviation, RelayGame, SatisfactionParams, SatisfactionProfile, MIN_NU,
};
