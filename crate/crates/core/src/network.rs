//! Dynamic attributed networks: a fixed node set observed over a sequence of
//! time slices, each with its own undirected edge set and attribute values.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense node index, stable across every slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

/// One slice stored as a compressed adjacency list.
#[derive(Debug, Clone, PartialEq)]
struct SliceGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl SliceGraph {
    fn from_edges(n: usize, edges: &BTreeSet<(NodeId, NodeId)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u.index()] += 1;
            degree[v.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![NodeId(0); 2 * edges.len()];
        for &(u, v) in edges {
            targets[cursor[u.index()]] = v;
            cursor[u.index()] += 1;
            targets[cursor[v.index()]] = u;
            cursor[v.index()] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        SliceGraph {
            offsets,
            targets,
            edges: edges.iter().copied().collect(),
        }
    }

    #[inline]
    fn neighbors(&self, v: usize) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// A dynamic attributed network `G = <G_1, ..., G_θ>`.
///
/// Slices are addressed 1-based everywhere in the public API. Attribute
/// values may be absent at any (node, slice).
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicNetwork {
    n: usize,
    slices: Vec<SliceGraph>,
    attr_names: Vec<String>,
    // [attr][slice][node]
    attr_values: Vec<Option<f64>>,
    labels: Option<Vec<String>>,
}

impl DynamicNetwork {
    pub fn builder(n: usize, slices: usize) -> DynamicNetworkBuilder {
        DynamicNetworkBuilder::new(n, slices)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of slices θ.
    pub fn slices(&self) -> usize {
        self.slices.len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(v.index())).map(String::as_str)
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        // labels are kept in the order the caller supplied; loaders sort them
        self.labels
            .as_ref()?
            .iter()
            .position(|l| l == label)
            .map(NodeId::from)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).map(NodeId::from)
    }

    fn check_slice(&self, t: usize) -> Result<usize> {
        if t == 0 || t > self.slices.len() {
            return Err(Error::SliceOutOfRange {
                slice: t,
                slices: self.slices.len(),
            });
        }
        Ok(t - 1)
    }

    fn check_node(&self, v: NodeId) -> Result<usize> {
        if v.index() >= self.n {
            return Err(Error::NodeOutOfRange {
                node: v.index(),
                n: self.n,
            });
        }
        Ok(v.index())
    }

    /// `f_t(u, v)`: 1 if the undirected link exists at slice `t`, else 0.
    pub fn adjacency(&self, t: usize, u: NodeId, v: NodeId) -> Result<u8> {
        let s = self.check_slice(t)?;
        let ui = self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(ui));
        }
        Ok(self.slices[s].neighbors(ui).binary_search(&v).is_ok() as u8)
    }

    /// `N_t(v)`, sorted by node id.
    pub fn neighborhood(&self, t: usize, v: NodeId) -> Result<&[NodeId]> {
        let s = self.check_slice(t)?;
        let vi = self.check_node(v)?;
        Ok(self.slices[s].neighbors(vi))
    }

    pub fn degree(&self, t: usize, v: NodeId) -> Result<usize> {
        self.neighborhood(t, v).map(<[NodeId]>::len)
    }

    /// Edges of slice `t` as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self, t: usize) -> Result<&[(NodeId, NodeId)]> {
        let s = self.check_slice(t)?;
        Ok(&self.slices[s].edges)
    }

    // 0-based slice, no bounds checks beyond slice indexing
    #[inline]
    pub(crate) fn neighbors_at(&self, slice: usize, v: usize) -> &[NodeId] {
        self.slices[slice].neighbors(v)
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attr_names.iter().position(|a| a == name)
    }

    pub fn attribute(&self, attr: usize, t: usize, v: NodeId) -> Result<Option<f64>> {
        let s = self.check_slice(t)?;
        let vi = self.check_node(v)?;
        Ok(self.attr_values[(attr * self.slices.len() + s) * self.n + vi])
    }

    #[inline]
    pub(crate) fn attribute_at(&self, attr: usize, slice: usize, v: usize) -> Option<f64> {
        self.attr_values[(attr * self.slices.len() + slice) * self.n + v]
    }

    /// Integrates the network over time: `f(u, v) = Σ_t f_t(u, v)`.
    pub fn aggregate(&self) -> GlobalWeightedNetwork {
        let mut weights: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
        for slice in &self.slices {
            for &e in &slice.edges {
                *weights.entry(e).or_insert(0) += 1;
            }
        }
        GlobalWeightedNetwork { n: self.n, weights }
    }
}

/// Incremental construction of a [`DynamicNetwork`].
#[derive(Debug, Clone)]
pub struct DynamicNetworkBuilder {
    n: usize,
    slices: usize,
    edges: Vec<BTreeSet<(NodeId, NodeId)>>,
    attrs: BTreeMap<String, Vec<Option<f64>>>,
    labels: Option<Vec<String>>,
}

impl DynamicNetworkBuilder {
    pub fn new(n: usize, slices: usize) -> Self {
        DynamicNetworkBuilder {
            n,
            slices,
            edges: vec![BTreeSet::new(); slices],
            attrs: BTreeMap::new(),
            labels: None,
        }
    }

    /// Adds an undirected edge at slice `t` (1-based). Returns `false` if the
    /// edge was already present in that slice.
    pub fn edge(&mut self, t: usize, u: NodeId, v: NodeId) -> Result<bool> {
        if t == 0 || t > self.slices {
            return Err(Error::SliceOutOfRange {
                slice: t,
                slices: self.slices,
            });
        }
        for x in [u, v] {
            if x.index() >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: x.index(),
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u.index()));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        Ok(self.edges[t - 1].insert(key))
    }

    /// Declares an attribute without assigning values (all absent).
    pub fn declare_attribute(&mut self, name: &str) {
        let len = self.n * self.slices;
        self.attrs
            .entry(String::from(name))
            .or_insert_with(|| vec![None; len]);
    }

    /// Sets an attribute value, returning the previous value if one existed.
    pub fn attribute(&mut self, name: &str, t: usize, v: NodeId, value: f64) -> Result<Option<f64>> {
        if t == 0 || t > self.slices {
            return Err(Error::SliceOutOfRange {
                slice: t,
                slices: self.slices,
            });
        }
        if v.index() >= self.n {
            return Err(Error::NodeOutOfRange {
                node: v.index(),
                n: self.n,
            });
        }
        self.declare_attribute(name);
        let slot = &mut self.attrs.get_mut(name).unwrap()[(t - 1) * self.n + v.index()];
        Ok(slot.replace(value))
    }

    pub fn labels(&mut self, labels: Vec<String>) -> &mut Self {
        self.labels = Some(labels);
        self
    }

    pub fn build(self) -> Result<DynamicNetwork> {
        if self.slices == 0 {
            return Err(Error::NoSlices);
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(Error::NodeOutOfRange {
                    node: labels.len(),
                    n: self.n,
                });
            }
        }
        let slices = self
            .edges
            .iter()
            .map(|e| SliceGraph::from_edges(self.n, e))
            .collect();
        let mut attr_names = Vec::with_capacity(self.attrs.len());
        let mut attr_values = Vec::with_capacity(self.attrs.len() * self.n * self.slices);
        for (name, values) in self.attrs {
            attr_names.push(name);
            attr_values.extend(values);
        }
        Ok(DynamicNetwork {
            n: self.n,
            slices,
            attr_names,
            attr_values,
            labels: self.labels,
        })
    }
}

/// The time-aggregated network `𝒢`, with link weight equal to the number of
/// slices containing the link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalWeightedNetwork {
    n: usize,
    weights: BTreeMap<(NodeId, NodeId), u32>,
}

impl GlobalWeightedNetwork {
    /// Builds a weighted network directly; pairs are normalized to `u < v`
    /// and repeated pairs accumulate.
    pub fn from_weighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId, u32)>,
    ) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x.index() >= n {
                    return Err(Error::NodeOutOfRange { node: x.index(), n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u.index()));
            }
            if w == 0 {
                continue;
            }
            let key = if u < v { (u, v) } else { (v, u) };
            *weights.entry(key).or_insert(0) += w;
        }
        Ok(GlobalWeightedNetwork { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> u32 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.weights.get(&key).copied().unwrap_or(0)
    }

    /// Weighted edges with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u32)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Total link weight `m`.
    pub fn total_weight(&self) -> u64 {
        self.weights.values().map(|&w| w as u64).sum()
    }

    pub fn weighted_degrees(&self) -> Vec<u64> {
        let mut k = vec![0u64; self.n];
        for (&(u, v), &w) in &self.weights {
            k[u.index()] += w as u64;
            k[v.index()] += w as u64;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn three_node() -> DynamicNetwork {
        let mut b = DynamicNetwork::builder(3, 2);
        b.edge(1, n(0), n(1)).unwrap();
        b.edge(2, n(0), n(1)).unwrap();
        b.edge(2, n(1), n(2)).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn adjacency_is_per_slice() {
        let mut b = DynamicNetwork::builder(3, 2);
        b.edge(1, n(0), n(1)).unwrap();
        let net = b.build().unwrap();
        assert_eq!(net.adjacency(1, n(0), n(1)).unwrap(), 1);
        assert_eq!(net.adjacency(1, n(1), n(0)).unwrap(), 1);
        assert_eq!(net.adjacency(1, n(0), n(2)).unwrap(), 0);
        assert_eq!(net.adjacency(2, n(0), n(1)).unwrap(), 0);
    }

    #[test]
    fn adjacency_rejects_bad_input() {
        let net = three_node();
        assert!(matches!(
            net.adjacency(3, n(0), n(1)),
            Err(Error::SliceOutOfRange { .. })
        ));
        assert!(matches!(
            net.adjacency(0, n(0), n(1)),
            Err(Error::SliceOutOfRange { .. })
        ));
        assert!(matches!(
            net.adjacency(1, n(0), n(7)),
            Err(Error::NodeOutOfRange { .. })
        ));
        assert!(matches!(net.adjacency(1, n(1), n(1)), Err(Error::SelfLoop(1))));
    }

    #[test]
    fn builder_rejects_self_loops_and_dedups() {
        let mut b = DynamicNetwork::builder(2, 1);
        assert_eq!(b.edge(1, n(0), n(0)), Err(Error::SelfLoop(0)));
        assert!(b.edge(1, n(0), n(1)).unwrap());
        assert!(!b.edge(1, n(1), n(0)).unwrap());
        assert_eq!(b.build().unwrap().edges(1).unwrap().len(), 1);
    }

    #[test]
    fn aggregate_counts_slices() {
        let gw = three_node().aggregate();
        assert_eq!(gw.weight(n(0), n(1)), 2);
        assert_eq!(gw.weight(n(2), n(1)), 1);
        assert_eq!(gw.weight(n(0), n(2)), 0);
        assert_eq!(gw.edge_count(), 2);
        assert_eq!(gw.n(), 3);
    }

    #[test]
    fn single_slice_aggregate_has_unit_weights() {
        let mut b = DynamicNetwork::builder(4, 1);
        b.edge(1, n(0), n(1)).unwrap();
        b.edge(1, n(2), n(3)).unwrap();
        let net = b.build().unwrap();
        let gw = net.aggregate();
        assert!(gw.edges().all(|(_, _, w)| w == 1));
        let edges: Vec<_> = gw.edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(edges, net.edges(1).unwrap());
    }

    #[test]
    fn neighborhoods() {
        let mut b = DynamicNetwork::builder(4, 1);
        b.edge(1, n(0), n(1)).unwrap();
        b.edge(1, n(1), n(2)).unwrap();
        b.edge(1, n(0), n(2)).unwrap();
        let net = b.build().unwrap();
        assert_eq!(net.neighborhood(1, n(0)).unwrap(), &[n(1), n(2)]);
        assert!(net.neighborhood(1, n(3)).unwrap().is_empty());
    }

    #[test]
    fn attributes_absent_by_default() {
        let mut b = DynamicNetwork::builder(2, 2);
        b.attribute("a", 2, n(1), 3.0).unwrap();
        let net = b.build().unwrap();
        let a = net.attribute_index("a").unwrap();
        assert_eq!(net.attribute(a, 2, n(1)).unwrap(), Some(3.0));
        assert_eq!(net.attribute(a, 1, n(1)).unwrap(), None);
        assert_eq!(net.attribute(a, 2, n(0)).unwrap(), None);
    }
}
