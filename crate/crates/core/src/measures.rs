//! Per-node, per-slice topological measures computed against a static
//! community structure: degree, internal degree, local transitivity,
//! within-module degree, participation coefficient and embeddedness.
//!
//! Degenerate cases are totalized: transitivity is 0 below degree 2,
//! participation and embeddedness are 0 for isolated nodes, and z is 0 when
//! the community's internal degrees have zero spread.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::community::CommunityStructure;
use crate::error::{Error, Result};
use crate::network::{DynamicNetwork, NodeId};

/// Nodes with `z >= HUB_THRESHOLD` are community hubs.
pub const HUB_THRESHOLD: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Degree,
    InternalDegree,
    Transitivity,
    WithinModuleDegree,
    Participation,
    Embeddedness,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Degree,
        Measure::InternalDegree,
        Measure::Transitivity,
        Measure::WithinModuleDegree,
        Measure::Participation,
        Measure::Embeddedness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::InternalDegree => "int_degree",
            Measure::Transitivity => "transitivity",
            Measure::WithinModuleDegree => "z",
            Measure::Participation => "participation",
            Measure::Embeddedness => "embeddedness",
        }
    }

    pub fn from_name(name: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeMeasures {
    pub degree: u32,
    pub internal_degree: u32,
    pub transitivity: f64,
    pub z: f64,
    pub participation: f64,
    pub embeddedness: f64,
}

impl NodeMeasures {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::Degree => self.degree as f64,
            Measure::InternalDegree => self.internal_degree as f64,
            Measure::Transitivity => self.transitivity,
            Measure::WithinModuleDegree => self.z,
            Measure::Participation => self.participation,
            Measure::Embeddedness => self.embeddedness,
        }
    }

    pub fn is_hub(&self) -> bool {
        self.z >= HUB_THRESHOLD
    }
}

/// All node measures of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMeasures {
    rows: Vec<NodeMeasures>,
}

impl SliceMeasures {
    pub fn rows(&self) -> &[NodeMeasures] {
        &self.rows
    }
}

/// Measures for every (node, slice) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTable {
    n: usize,
    slices: Vec<SliceMeasures>,
}

impl MeasureTable {
    pub fn compute(net: &DynamicNetwork, comm: &CommunityStructure) -> Result<Self> {
        let slices = (1..=net.slices())
            .map(|t| Self::compute_slice(net, comm, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasureTable { n: net.n(), slices })
    }

    /// Measures of a single slice `t` (1-based). Slices are independent, so
    /// callers may compute them concurrently and join with [`Self::from_slices`].
    pub fn compute_slice(
        net: &DynamicNetwork,
        comm: &CommunityStructure,
        t: usize,
    ) -> Result<SliceMeasures> {
        comm.check_covers(net.n())?;
        if t == 0 || t > net.slices() {
            return Err(Error::SliceOutOfRange {
                slice: t,
                slices: net.slices(),
            });
        }
        let s = t - 1;
        let n = net.n();
        let mut rows = vec![NodeMeasures::default(); n];
        let mut mark = vec![false; n];
        let mut per_comm = vec![0u32; comm.count()];
        let mut touched = Vec::new();

        for (v, row) in rows.iter_mut().enumerate() {
            let nbrs = net.neighbors_at(s, v);
            let d = nbrs.len() as u32;
            let own = comm.community_of(NodeId::from(v));
            row.degree = d;

            touched.clear();
            for &w in nbrs {
                let c = comm.community_of(w);
                if per_comm[c] == 0 {
                    touched.push(c);
                }
                per_comm[c] += 1;
            }
            row.internal_degree = per_comm[own];
            if d > 0 {
                let sq: u64 = touched.iter().map(|&c| (per_comm[c] as u64).pow(2)).sum();
                row.participation = 1.0 - sq as f64 / (d as u64 * d as u64) as f64;
                row.embeddedness = row.internal_degree as f64 / d as f64;
            }
            for &c in &touched {
                per_comm[c] = 0;
            }

            row.transitivity = transitivity_with(net, s, v, &mut mark);
        }

        let internal: Vec<u32> = rows.iter().map(|r| r.internal_degree).collect();
        for (row, z) in rows.iter_mut().zip(z_scores(&internal, comm)) {
            row.z = z;
        }
        Ok(SliceMeasures { rows })
    }

    pub fn from_slices(n: usize, slices: Vec<SliceMeasures>) -> Self {
        MeasureTable { n, slices }
    }

    /// Assembles a table from per-slice row vectors (e.g. read back from disk).
    pub fn from_rows(n: usize, rows: Vec<Vec<NodeMeasures>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::PartitionSize {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(MeasureTable {
            n,
            slices: rows.into_iter().map(|rows| SliceMeasures { rows }).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slices(&self) -> usize {
        self.slices.len()
    }

    /// Row for node `v` at slice `t` (1-based).
    pub fn get(&self, t: usize, v: NodeId) -> &NodeMeasures {
        &self.slices[t - 1].rows[v.index()]
    }

    pub fn slice(&self, t: usize) -> &SliceMeasures {
        &self.slices[t - 1]
    }
}

fn transitivity_with(net: &DynamicNetwork, s: usize, v: usize, mark: &mut [bool]) -> f64 {
    let nbrs = net.neighbors_at(s, v);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    for w in nbrs {
        mark[w.index()] = true;
    }
    let mut links = 0u64;
    for &w in nbrs {
        for &x in net.neighbors_at(s, w.index()) {
            if x > w && mark[x.index()] {
                links += 1;
            }
        }
    }
    for w in nbrs {
        mark[w.index()] = false;
    }
    links as f64 / (d * (d - 1) / 2) as f64
}

/// z-score of each node's internal degree within its community, using the
/// population standard deviation; 0 where the community has no spread.
pub fn z_scores(internal_degrees: &[u32], comm: &CommunityStructure) -> Vec<f64> {
    let mut z = vec![0.0; internal_degrees.len()];
    for c in 0..comm.count() {
        let members = comm.members(c);
        let size = members.len() as i128;
        let (sum, sq) = members.iter().fold((0i128, 0i128), |(s, q), v| {
            let x = internal_degrees[v.index()] as i128;
            (s + x, q + x * x)
        });
        // z = (N x - S) / sqrt(N Q - S^2), exact numerator and radicand
        let radicand = size * sq - sum * sum;
        if radicand == 0 {
            continue;
        }
        let denom = libm::sqrt(radicand as f64);
        for v in members {
            let x = internal_degrees[v.index()] as i128;
            z[v.index()] = (size * x - sum) as f64 / denom;
        }
    }
    z
}

/// `d_t^int(v) = |N_t(v) ∩ C(v)|`.
pub fn internal_degree(
    net: &DynamicNetwork,
    t: usize,
    v: NodeId,
    comm: &CommunityStructure,
) -> Result<usize> {
    comm.check_covers(net.n())?;
    let own = comm.community_of(v);
    Ok(net
        .neighborhood(t, v)?
        .iter()
        .filter(|&&w| comm.community_of(w) == own)
        .count())
}

/// `d_t^c(v)` for every community with at least one neighbor of `v`.
pub fn community_degrees(
    net: &DynamicNetwork,
    t: usize,
    v: NodeId,
    comm: &CommunityStructure,
) -> Result<BTreeMap<usize, usize>> {
    comm.check_covers(net.n())?;
    let mut out = BTreeMap::new();
    for &w in net.neighborhood(t, v)? {
        *out.entry(comm.community_of(w)).or_insert(0) += 1;
    }
    Ok(out)
}

/// Ratio of links among the neighbors of `v` to the possible `d(d-1)/2`.
pub fn local_transitivity(net: &DynamicNetwork, t: usize, v: NodeId) -> Result<f64> {
    net.neighborhood(t, v)?;
    let mut mark = vec![false; net.n()];
    Ok(transitivity_with(net, t - 1, v.index(), &mut mark))
}

/// Within-module degree of `v` from the internal degrees stored in `table`.
pub fn within_module_degree(
    table: &MeasureTable,
    t: usize,
    v: NodeId,
    comm: &CommunityStructure,
) -> f64 {
    let internal: Vec<u32> = table
        .slice(t)
        .rows()
        .iter()
        .map(|r| r.internal_degree)
        .collect();
    let members = comm.members(comm.community_of(v));
    let size = members.len() as f64;
    let mean = members
        .iter()
        .map(|w| internal[w.index()] as f64)
        .sum::<f64>()
        / size;
    let var = members
        .iter()
        .map(|w| {
            let dx = internal[w.index()] as f64 - mean;
            dx * dx
        })
        .sum::<f64>()
        / size;
    if var == 0.0 {
        return 0.0;
    }
    (internal[v.index()] as f64 - mean) / libm::sqrt(var)
}

/// `1 - Σ_c (d^c / d)^2`; 0 for isolated nodes.
pub fn participation(
    net: &DynamicNetwork,
    t: usize,
    v: NodeId,
    comm: &CommunityStructure,
) -> Result<f64> {
    let d = net.degree(t, v)?;
    if d == 0 {
        return Ok(0.0);
    }
    let d = d as f64;
    Ok(1.0
        - community_degrees(net, t, v, comm)?
            .values()
            .map(|&dc| (dc as f64 / d) * (dc as f64 / d))
            .sum::<f64>())
}

/// `d^int / d`; 0 for isolated nodes.
pub fn embeddedness(table: &MeasureTable, t: usize, v: NodeId) -> f64 {
    let row = table.get(t, v);
    if row.degree == 0 {
        0.0
    } else {
        row.internal_degree as f64 / row.degree as f64
    }
}
