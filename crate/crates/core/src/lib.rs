//! Satisfaction-aware relay selection for multi-radio UAV networks, modelled
//! as a many-to-many matching game without substitutability.
//!
//! Source UAVs share relay radios by equal time division; each source's
//! satisfaction is a sigmoid of its achieved rate against its requirement,
//! and the network objective is total satisfaction. The relays score a
//! source's proposed change of radios with an acceptance utility whose
//! differences equal the change in total satisfaction, so the distributed
//! dynamics climb the global objective.
//!
//! * [`radio`]: topology generation, path loss, SNR and AF capacity.
//! * [`matching`]: matchings, utilities, feasibility and stability.
//! * [`solver`]: the potential matching approach, best response,
//!   many-to-one, a substitutable deferred-acceptance baseline and an
//!   exhaustive oracle.
//! * [`experiment`]: seeded ensembles, aggregate metrics and CSV output.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod ids;
pub mod matching;
pub mod radio;
pub mod solver;

pub use error::{Error, Result};
pub use ids::{RadioId, SourceId};
pub use matching::{Matching, RelayGame, SatisfactionParams, SatisfactionProfile, StrategySpace};
pub use radio::{CapacityTable, Scenario, Topology, TopologyParams};
pub use solver::{solve, IterationTrace, SolveOutcome, SolverConfig, SolverKind};
