//! Static community structure of the aggregated network: the partition type,
//! weighted Newman modularity, and a seeded Louvain detector.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{GlobalWeightedNetwork, NodeId};

/// A partition of the node set into `λ` communities with dense ids `0..λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityStructure {
    assignment: Vec<usize>,
    members: Vec<Vec<NodeId>>,
}

impl CommunityStructure {
    /// Wraps an assignment whose ids are already dense (`0..λ`, none empty).
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Self> {
        let count = assignment.iter().max().map_or(0, |&c| c + 1);
        let mut members = vec![Vec::new(); count];
        for (v, &c) in assignment.iter().enumerate() {
            members[c].push(NodeId::from(v));
        }
        if let Some(empty) = members.iter().position(Vec::is_empty) {
            return Err(Error::EmptyCommunity(empty));
        }
        Ok(CommunityStructure {
            assignment,
            members,
        })
    }

    /// Builds a partition from arbitrary labels, re-indexing communities by
    /// decreasing size (ties: smallest member first).
    pub fn from_labels<L: Ord + Clone>(labels: &[L]) -> Self {
        let mut groups: BTreeMap<L, Vec<NodeId>> = BTreeMap::new();
        for (v, l) in labels.iter().enumerate() {
            groups.entry(l.clone()).or_default().push(NodeId::from(v));
        }
        let mut members: Vec<Vec<NodeId>> = groups.into_values().collect();
        members.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut assignment = vec![0; labels.len()];
        for (c, group) in members.iter().enumerate() {
            for v in group {
                assignment[v.index()] = c;
            }
        }
        CommunityStructure {
            assignment,
            members,
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Number of communities `λ`.
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// `C(v)`.
    #[inline]
    pub fn community_of(&self, v: NodeId) -> usize {
        self.assignment[v.index()]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn size(&self, c: usize) -> usize {
        self.members[c].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Members of community `c`, sorted by node id.
    pub fn members(&self, c: usize) -> &[NodeId] {
        &self.members[c]
    }

    pub(crate) fn check_covers(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::PartitionSize {
                expected: n,
                got: self.n(),
            });
        }
        Ok(())
    }
}

/// Ids of communities with at least `min_size` members, in id order.
///
/// The assignment itself is untouched; small communities still count as
/// "outside" when supports and growth rates are computed.
pub fn filter_small(comm: &CommunityStructure, min_size: usize) -> Vec<usize> {
    (0..comm.count())
        .filter(|&c| comm.size(c) >= min_size)
        .collect()
}

/// Weighted Newman modularity at resolution 1.
pub fn modularity(gw: &GlobalWeightedNetwork, comm: &CommunityStructure) -> Result<f64> {
    comm.check_covers(gw.n())?;
    let m = gw.total_weight();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = gw.weighted_degrees();
    let mut internal = vec![0u64; comm.count()];
    let mut strength = vec![0u64; comm.count()];
    for (u, v, w) in gw.edges() {
        let cu = comm.community_of(u);
        if cu == comm.community_of(v) {
            internal[cu] += w as u64;
        }
    }
    for (v, &kv) in k.iter().enumerate() {
        strength[comm.community_of(NodeId::from(v))] += kv;
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&strength)
        .map(|(&l, &s)| {
            let frac = s as f64 / (2.0 * m);
            l as f64 / m - frac * frac
        })
        .sum())
}

// Gains closer than this are treated as ties.
const GAIN_EPS: f64 = 1e-10;

struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
}

impl LevelGraph {
    fn from_network(gw: &GlobalWeightedNetwork) -> Self {
        let n = gw.n();
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for (u, v, w) in gw.edges() {
            let w = w as f64;
            adj[u.index()].push((v.index(), w));
            adj[v.index()].push((u.index(), w));
            degree[u.index()] += w;
            degree[v.index()] += w;
        }
        LevelGraph {
            adj,
            self_loops: vec![0.0; n],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Greedy local moves until no node improves modularity. Returns the
    /// community of each node (ids are node ids of the level) and whether
    /// anything moved.
    fn local_moves(&self, m2: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;

        loop {
            let mut moved = false;
            for &i in &order {
                let current = comm[i];
                let ki = self.degree[i];
                touched.clear();
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[current] -= ki;

                let mut best = current;
                let mut best_gain = link[current] - tot[current] * ki / m2;
                touched.sort_unstable();
                for &c in &touched {
                    if c == current {
                        continue;
                    }
                    let gain = link[c] - tot[c] * ki / m2;
                    if gain > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = gain;
                    }
                }

                tot[best] += ki;
                if best != current {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                    seen[c] = false;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    /// Collapses each community into a single node. `comm` must be dense.
    fn aggregate(&self, comm: &[usize], count: usize) -> LevelGraph {
        let mut self_loops = vec![0.0; count];
        let mut degree = vec![0.0; count];
        let mut between: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        for i in 0..self.len() {
            let ci = comm[i];
            degree[ci] += self.degree[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal link is seen from both ends
                    self_loops[ci] += w / 2.0;
                } else {
                    *between[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        LevelGraph {
            adj: between.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
            degree,
        }
    }
}

/// Louvain detection: repeated local moves then aggregation, until a level
/// produces no move. Deterministic for a given `seed`; output ids are ordered
/// by decreasing community size.
pub fn louvain(gw: &GlobalWeightedNetwork, seed: u64) -> CommunityStructure {
    let n = gw.n();
    let mut membership: Vec<usize> = (0..n).collect();
    let m2 = 2.0 * gw.total_weight() as f64;
    if m2 == 0.0 {
        return CommunityStructure::from_labels(&membership);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = LevelGraph::from_network(gw);
    loop {
        let (comm, moved) = graph.local_moves(m2, &mut rng);
        if !moved {
            break;
        }
        let mut dense = vec![usize::MAX; graph.len()];
        let mut count = 0;
        for &c in &comm {
            if dense[c] == usize::MAX {
                dense[c] = count;
                count += 1;
            }
        }
        let comm: Vec<usize> = comm.iter().map(|&c| dense[c]).collect();
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if count == graph.len() {
            break;
        }
        graph = graph.aggregate(&comm, count);
    }
    CommunityStructure::from_labels(&membership)
}
