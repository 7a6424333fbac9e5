//! Characterization of communities in dynamic attributed networks.
//!
//! The pipeline turns a dynamic network into one item sequence per node
//! (discretized topological measures and attributes, one itemset per time
//! slice, followed by the node's community), mines closed frequent
//! sequential patterns, and ranks them per community by growth rate.
//! Representative patterns are picked greedily to cover the community; the
//! members they miss are reported as anomalies.
//!
//! ```
//! use commchar_core::{DynamicNetwork, NodeId, louvain};
//!
//! let mut b = DynamicNetwork::builder(4, 1);
//! b.edge(1, NodeId(0), NodeId(1)).unwrap();
//! b.edge(1, NodeId(2), NodeId(3)).unwrap();
//! let net = b.build().unwrap();
//! let comm = louvain(&net.aggregate(), 7);
//! assert_eq!(comm.count(), 2);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod characterize;
pub mod community;
mod error;
pub mod measures;
pub mod miner;
pub mod network;
mod nodeset;
pub mod sequence;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use characterize::{
    build_report, detect_anomalies, growth_rate, most_emerging, most_supported,
    select_representatives, CommunityReport, Growth, RankedPattern,
};
pub use community::{filter_small, louvain, modularity, CommunityStructure};
pub use error::{Error, Result};
pub use measures::{Measure, MeasureTable, NodeMeasures, HUB_THRESHOLD};
pub use miner::{brute_force_closed, mine_closed, mine_closed_with, split_by_class, MinedPattern, MinerLimits};
pub use network::{DynamicNetwork, DynamicNetworkBuilder, GlobalWeightedNetwork, NodeId};
pub use nodeset::NodeSet;
pub use sequence::{
    DescriptorSet, DescriptorSource, DescriptorSpec, Item, Scope, Sequence, SequenceDatabase,
    Support,
};
