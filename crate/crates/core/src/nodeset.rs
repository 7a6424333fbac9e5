use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;

use crate::network::NodeId;

/// A set of nodes over a fixed universe `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NodeSet {
    bits: FixedBitSet,
}

impl NodeSet {
    pub fn new(universe: usize) -> Self {
        NodeSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn from_nodes(universe: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut set = NodeSet::new(universe);
        for v in nodes {
            set.insert(v);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: NodeId) {
        self.bits.insert(v.index());
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.bits.contains(v.index())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits.ones().map(NodeId::from)
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn union_len(&self, other: &NodeSet) -> usize {
        self.bits.union_count(&other.bits)
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        NodeSet { bits }
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}
