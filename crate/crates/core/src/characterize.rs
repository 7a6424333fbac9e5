//! Per-community ranking of mined patterns, representative selection and
//! anomaly detection.
//!
//! Growth rates are kept as exact count ratios so that rankings and ties do
//! not depend on floating-point rounding.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::miner::MinedPattern;
use crate::nodeset::NodeSet;
use crate::sequence::{Scope, SequenceDatabase};

/// `Sup(s, C) / Sup(s, C̄)` as the exact ratio
/// `(in_count · |C̄|) / (out_count · |C|)`, or `+∞` when nothing outside
/// supports the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Growth {
    Finite { num: u64, den: u64 },
    Infinite,
}

impl Growth {
    pub fn from_counts(in_count: usize, in_size: usize, out_count: usize, out_size: usize) -> Self {
        if out_count == 0 {
            return Growth::Infinite;
        }
        Growth::Finite {
            num: (in_count * out_size) as u64,
            den: (out_count * in_size) as u64,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Growth::Finite { num, den } => num as f64 / den as f64,
            Growth::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Growth::Infinite
    }

    /// Strictly greater than 1.
    pub fn is_emerging(self) -> bool {
        match self {
            Growth::Finite { num, den } => num > den,
            Growth::Infinite => true,
        }
    }
}

impl PartialOrd for Growth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Growth {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self, *other) {
            (Growth::Infinite, Growth::Infinite) => Ordering::Equal,
            (Growth::Infinite, _) => Ordering::Greater,
            (_, Growth::Infinite) => Ordering::Less,
            (Growth::Finite { num: a, den: b }, Growth::Finite { num: c, den: d }) => {
                (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
            }
        }
    }
}

/// A class-stripped pattern with its supports inside and outside one
/// community.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPattern {
    pub community: usize,
    pub pattern: MinedPattern,
    pub in_count: usize,
    pub in_size: usize,
    pub out_count: usize,
    pub out_size: usize,
    pub growth: Growth,
    /// `S(s, C)`: supporting members of the community.
    pub supporters_in: NodeSet,
}

impl RankedPattern {
    /// `Sup(s, C)`.
    pub fn sup_in(&self) -> f64 {
        self.in_count as f64 / self.in_size as f64
    }

    /// `Sup(s, C̄)`; 0 when the community is the whole network.
    pub fn sup_out(&self) -> f64 {
        if self.out_size == 0 {
            0.0
        } else {
            self.out_count as f64 / self.out_size as f64
        }
    }
}

/// Higher growth first, then higher inside support, then canonical order.
pub fn emerging_order(a: &RankedPattern, b: &RankedPattern) -> Ordering {
    b.growth
        .cmp(&a.growth)
        .then_with(|| b.in_count.cmp(&a.in_count))
        .then_with(|| a.pattern.sequence.cmp(&b.pattern.sequence))
}

/// Ranks every pattern tagged with community `c`.
///
/// The inside support and supporter set come from a scan of the community;
/// the outside support from a scan of its complement.
pub fn growth_rate(
    db: &SequenceDatabase,
    patterns_by_class: &BTreeMap<Option<u32>, Vec<MinedPattern>>,
    c: usize,
) -> Result<Vec<RankedPattern>> {
    let comm = db.communities();
    if c >= comm.count() {
        return Err(Error::NoPatterns(c));
    }
    let Some(patterns) = patterns_by_class.get(&Some(c as u32)) else {
        return Ok(Vec::new());
    };
    let in_size = comm.size(c);
    let out_size = db.n() - in_size;
    patterns
        .iter()
        .map(|p| {
            let inside = db.support(&p.sequence, Scope::Community(c))?;
            debug_assert_eq!(inside.count, p.support_count);
            let out_count = if out_size == 0 {
                0
            } else {
                db.support(&p.sequence, Scope::Complement(c))?.count
            };
            Ok(RankedPattern {
                community: c,
                pattern: p.clone(),
                in_count: inside.count,
                in_size,
                out_count,
                out_size,
                growth: Growth::from_counts(inside.count, in_size, out_count, out_size),
                supporters_in: inside.nodes,
            })
        })
        .collect()
}

/// The pattern with the highest inside support; ties go to the longer
/// sequence, then canonical order.
pub fn most_supported(ranked: &[RankedPattern], community: usize) -> Result<&RankedPattern> {
    ranked
        .iter()
        .min_by(|a, b| {
            b.in_count
                .cmp(&a.in_count)
                .then_with(|| b.pattern.sequence.len().cmp(&a.pattern.sequence.len()))
                .then_with(|| a.pattern.sequence.cmp(&b.pattern.sequence))
        })
        .ok_or(Error::NoPatterns(community))
}

/// The emerging pattern (growth > 1) ranked first by [`emerging_order`].
pub fn most_emerging(ranked: &[RankedPattern]) -> Option<&RankedPattern> {
    ranked
        .iter()
        .filter(|r| r.growth.is_emerging())
        .min_by(|a, b| emerging_order(a, b))
}

/// Greedy cover of `members` by emerging patterns.
///
/// Starts from the most emerging pattern, then repeatedly adds the pattern
/// whose supporters are farthest (Jaccard distance) from the nodes covered
/// so far, among patterns that cover at least one new node. Stops when every
/// member is covered, nothing new can be covered, or `max_patterns` are
/// selected.
pub fn select_representatives(
    ranked: &[RankedPattern],
    members: &NodeSet,
    max_patterns: usize,
) -> Vec<RankedPattern> {
    let mut pool: Vec<&RankedPattern> = ranked.iter().filter(|r| r.growth.is_emerging()).collect();
    pool.sort_by(|a, b| emerging_order(a, b));
    let mut selected: Vec<RankedPattern> = Vec::new();
    if pool.is_empty() || max_patterns == 0 {
        return selected;
    }
    let seed = pool.remove(0);
    let mut covered = seed.supporters_in.clone();
    selected.push(seed.clone());

    while selected.len() < max_patterns && !members.is_subset(&covered) {
        // smallest |S∩K|/|S∪K| wins; pool order already encodes tie-breaks
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in pool.iter().enumerate() {
            let s = &r.supporters_in;
            let inter = s.intersection_len(&covered);
            if inter == s.len() {
                continue;
            }
            let union = s.union_len(&covered);
            let better = match best {
                None => true,
                Some((_, bi, bu)) => (inter as u128 * bu as u128) < (bi as u128 * union as u128),
            };
            if better {
                best = Some((i, inter, union));
            }
        }
        let Some((i, _, _)) = best else { break };
        let next = pool.remove(i);
        covered.union_with(&next.supporters_in);
        selected.push(next.clone());
    }
    selected
}

/// `E = C \ K`, where `K` is the union of the given supporter sets.
pub fn detect_anomalies<'a>(
    members: &NodeSet,
    supporters: impl IntoIterator<Item = &'a NodeSet>,
) -> NodeSet {
    let mut covered = NodeSet::new(members.universe());
    for s in supporters {
        covered.union_with(s);
    }
    members.difference(&covered)
}

/// Characterization of one community.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityReport {
    pub community: usize,
    pub members: NodeSet,
    /// Class-tagged patterns available for this community.
    pub pattern_count: usize,
    pub most_supported: Option<RankedPattern>,
    pub most_emerging: Option<RankedPattern>,
    /// Representatives selected after the most emerging pattern.
    pub supplementary: Vec<RankedPattern>,
    /// `K`: members supporting at least one representative.
    pub coverage: NodeSet,
    /// `C \ K` over the representatives.
    pub anomalies: NodeSet,
    /// Members not supporting the most supported pattern.
    pub anomalies_most_supported: NodeSet,
    /// Members supporting neither the representatives nor the most
    /// supported pattern.
    pub anomalies_combined: NodeSet,
}

impl CommunityReport {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// False when mining found nothing for this community at the chosen
    /// minimum support.
    pub fn is_characterized(&self) -> bool {
        self.pattern_count > 0
    }

    /// Representatives in selection order.
    pub fn representatives(&self) -> impl Iterator<Item = &RankedPattern> {
        self.most_emerging.iter().chain(&self.supplementary)
    }

    pub fn coverage_fraction(&self) -> f64 {
        self.coverage.len() as f64 / self.size() as f64
    }
}

pub fn build_report(
    db: &SequenceDatabase,
    patterns_by_class: &BTreeMap<Option<u32>, Vec<MinedPattern>>,
    c: usize,
    max_patterns: usize,
) -> Result<CommunityReport> {
    let ranked = growth_rate(db, patterns_by_class, c)?;
    let n = db.n();
    let members = NodeSet::from_nodes(n, db.communities().members(c).iter().copied());
    let supported = most_supported(&ranked, c).ok().cloned();
    let mut reps = select_representatives(&ranked, &members, max_patterns).into_iter();
    let emerging = reps.next();
    let supplementary: Vec<RankedPattern> = reps.collect();

    let rep_sets = || {
        emerging
            .iter()
            .chain(&supplementary)
            .map(|r| &r.supporters_in)
    };
    let anomalies = detect_anomalies(&members, rep_sets());
    let coverage = members.difference(&anomalies);
    let anomalies_most_supported =
        detect_anomalies(&members, supported.iter().map(|r| &r.supporters_in));
    let anomalies_combined = detect_anomalies(
        &members,
        rep_sets().chain(supported.iter().map(|r| &r.supporters_in)),
    );
    Ok(CommunityReport {
        community: c,
        members,
        pattern_count: ranked.len(),
        most_supported: supported,
        most_emerging: emerging,
        supplementary,
        coverage,
        anomalies,
        anomalies_most_supported,
        anomalies_combined,
    })
}
