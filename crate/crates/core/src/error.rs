use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slice {slice} out of range 1..={slices}")]
    SliceOutOfRange { slice: usize, slices: usize },
    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("network must have at least one slice")]
    NoSlices,
    #[error("attribute `{0}` is not defined on this network")]
    UnknownAttribute(String),
    #[error("community structure covers {got} nodes, network has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("community ids must be dense: id {0} has no members")]
    EmptyCommunity(usize),
    #[error("modularity is undefined on a graph without edges")]
    EmptyGraph,
    #[error("descriptor `{name}`: {reason}")]
    InvalidDescriptor { name: String, reason: String },
    #[error("descriptor `{0}` received a NaN value")]
    NanValue(String),
    #[error("support is undefined on an empty node scope")]
    EmptyScope,
    #[error("patterns must contain at least one itemset and no empty itemset")]
    EmptyPattern,
    #[error("minimum support {0} is outside (0, 1]")]
    MinSupport(f64),
    #[error("sequence database is empty")]
    EmptyDatabase,
    #[error("candidate lattice exceeded {limit} nodes; raise min_sup")]
    CandidateLimit { limit: usize },
    #[error("brute-force oracle is limited to {max_items} items and an alphabet of {max_alphabet} (got {items} items, {alphabet} symbols)")]
    OracleGuard {
        items: usize,
        alphabet: usize,
        max_items: usize,
        max_alphabet: usize,
    },
    #[error("class item found before the last itemset of a pattern")]
    MisplacedClassItem,
    #[error("no patterns available for community {0}")]
    NoPatterns(usize),
}
