//! Physical scenario: node placement, path loss, SNR and AF capacity.

mod channel;
mod links;
mod topology;

pub use channel::{af_capacity, dbm_to_watts, path_gain, snr, snr_watts, PathLossModel, Point};
pub use links::{CapacityTable, LinkGainTable, Scenario};
pub use topology::{
    generate_topology, RelayNode, RelayRadio, SourceNode, SourceRadios, Topology, TopologyParams,
};
