//! Discretization of descriptors into items, node sequences, and the
//! class-concatenated sequence database used for mining.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::community::CommunityStructure;
use crate::error::{Error, Result};
use crate::measures::{Measure, MeasureTable};
use crate::network::{DynamicNetwork, NodeId};
use crate::nodeset::NodeSet;

/// A (descriptor, discretized value) pair, or the community class marker.
///
/// Ordering is by descriptor id then bin; class items sort after every
/// descriptor item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Descriptor { descriptor: u16, bin: u32 },
    Class(u32),
}

impl Item {
    pub fn is_class(self) -> bool {
        matches!(self, Item::Class(_))
    }
}

/// A chronologically ordered list of itemsets. Items inside an itemset are
/// kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Sequence {
    itemsets: Vec<Vec<Item>>,
}

impl Sequence {
    /// Builds a sequence, normalizing each itemset. Empty itemsets are kept;
    /// node sequences use them as placeholders for slices without data.
    pub fn new(itemsets: Vec<Vec<Item>>) -> Self {
        let itemsets = itemsets
            .into_iter()
            .map(|mut set| {
                set.sort_unstable();
                set.dedup();
                set
            })
            .collect();
        Sequence { itemsets }
    }

    /// Builds a pattern: at least one itemset and no empty itemset.
    pub fn pattern(itemsets: Vec<Vec<Item>>) -> Result<Self> {
        if itemsets.is_empty() || itemsets.iter().any(Vec::is_empty) {
            return Err(Error::EmptyPattern);
        }
        Ok(Sequence::new(itemsets))
    }

    pub fn itemsets(&self) -> &[Vec<Item>] {
        &self.itemsets
    }

    /// Size: the number of itemsets.
    pub fn len(&self) -> usize {
        self.itemsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    pub fn item_count(&self) -> usize {
        self.itemsets.iter().map(Vec::len).sum()
    }

    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.itemsets.iter().flatten().copied()
    }

    /// `self ⊑ other`.
    pub fn is_subsequence_of(&self, other: &Sequence) -> bool {
        is_subsequence(self, other)
    }

    /// `α • C`: appends the singleton itemset `{item}`.
    pub fn concat(&self, item: Item) -> Sequence {
        let mut itemsets = self.itemsets.clone();
        itemsets.push(alloc::vec![item]);
        Sequence { itemsets }
    }

    /// Canonical order: size first, then lexicographic over itemsets.
    pub fn canonical_cmp(&self, other: &Sequence) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.itemsets.cmp(&other.itemsets))
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

/// Sorted-slice containment.
pub(crate) fn itemset_contains(outer: &[Item], inner: &[Item]) -> bool {
    let mut it = outer.iter();
    'next: for x in inner {
        for y in it.by_ref() {
            match y.cmp(x) {
                Ordering::Less => continue,
                Ordering::Equal => continue 'next,
                Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Order-preserving embedding with itemset containment. The greedy
/// left-most embedding is optimal, so a single pass decides it.
pub fn is_subsequence(a: &Sequence, b: &Sequence) -> bool {
    let mut pos = 0;
    for needle in &a.itemsets {
        match b.itemsets[pos..]
            .iter()
            .position(|hay| itemset_contains(hay, needle))
        {
            Some(off) => pos += off + 1,
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorSource {
    Measure(Measure),
    Attribute(String),
}

/// How one descriptor is turned into items.
///
/// `p` breakpoints yield `p + 1` left-closed, right-open bins; bin `j` holds
/// values in `[b_j, b_{j+1})` with `b_0 = -∞` and `b_{p+1} = +∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSpec {
    name: String,
    source: DescriptorSource,
    breakpoints: Vec<f64>,
    emit_zero: bool,
}

impl DescriptorSpec {
    pub fn new(
        name: impl Into<String>,
        source: DescriptorSource,
        breakpoints: Vec<f64>,
        emit_zero: bool,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: &str| Error::InvalidDescriptor {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if name.is_empty()
            || name
                .chars()
                .any(|c| matches!(c, ',' | '(' | ')' | '=') || c.is_whitespace() || c.is_control())
        {
            return Err(invalid("names must be non-empty without whitespace or `,()=`"));
        }
        if breakpoints.is_empty() {
            return Err(invalid("at least one breakpoint is required"));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(invalid("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        Ok(DescriptorSpec {
            name,
            source,
            breakpoints,
            emit_zero,
        })
    }

    pub fn measure(m: Measure, breakpoints: Vec<f64>) -> Result<Self> {
        Self::new(m.name(), DescriptorSource::Measure(m), breakpoints, true)
    }

    pub fn attribute(name: &str, breakpoints: Vec<f64>, emit_zero: bool) -> Result<Self> {
        Self::new(
            name,
            DescriptorSource::Attribute(name.to_string()),
            breakpoints,
            emit_zero,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &DescriptorSource {
        &self.source
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn emit_zero(&self) -> bool {
        self.emit_zero
    }

    pub fn bin_count(&self) -> usize {
        self.breakpoints.len() + 1
    }

    /// Bin of `value`, or `None` for absent values and (unless `emit_zero`)
    /// for an exact zero.
    pub fn bin(&self, value: Option<f64>) -> Result<Option<u32>> {
        let Some(x) = value else { return Ok(None) };
        if x.is_nan() {
            return Err(Error::NanValue(self.name.clone()));
        }
        if x == 0.0 && !self.emit_zero {
            return Ok(None);
        }
        Ok(Some(self.breakpoints.partition_point(|&b| b <= x) as u32))
    }

    /// Human-readable bin: `<3`, `3..10`, `>=30`.
    pub fn bin_label(&self, bin: u32) -> String {
        let bin = bin as usize;
        let p = self.breakpoints.len();
        if bin == 0 {
            format!("<{}", self.breakpoints[0])
        } else if bin >= p {
            format!(">={}", self.breakpoints[p - 1])
        } else {
            format!("{}..{}", self.breakpoints[bin - 1], self.breakpoints[bin])
        }
    }

    pub fn bin_from_label(&self, label: &str) -> Option<u32> {
        (0..self.bin_count() as u32).find(|&b| self.bin_label(b) == label)
    }
}

/// The ordered descriptor set `D`; a descriptor's id is its position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescriptorSet {
    specs: Vec<DescriptorSpec>,
}

impl DescriptorSet {
    pub fn new(specs: Vec<DescriptorSpec>) -> Result<Self> {
        for (i, s) in specs.iter().enumerate() {
            if specs[..i].iter().any(|o| o.name == s.name) || s.name == "class" {
                return Err(Error::InvalidDescriptor {
                    name: s.name.clone(),
                    reason: "duplicate or reserved descriptor name".to_string(),
                });
            }
        }
        if specs.len() > u16::MAX as usize {
            return Err(Error::InvalidDescriptor {
                name: String::new(),
                reason: "too many descriptors".to_string(),
            });
        }
        Ok(DescriptorSet { specs })
    }

    pub fn specs(&self) -> &[DescriptorSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn get(&self, id: u16) -> &DescriptorSpec {
        &self.specs[id as usize]
    }

    pub fn find(&self, name: &str) -> Option<u16> {
        self.specs.iter().position(|s| s.name == name).map(|i| i as u16)
    }

    pub fn discretize(&self, id: u16, value: Option<f64>) -> Result<Option<Item>> {
        Ok(self
            .get(id)
            .bin(value)?
            .map(|bin| Item::Descriptor { descriptor: id, bin }))
    }

    /// `name=label` for descriptor items, `class=c` for class items.
    pub fn item_label(&self, item: Item) -> String {
        match item {
            Item::Descriptor { descriptor, bin } => {
                let spec = self.get(descriptor);
                format!("{}={}", spec.name, spec.bin_label(bin))
            }
            Item::Class(c) => format!("class={c}"),
        }
    }

    /// Inverse of [`Self::item_label`].
    pub fn parse_item(&self, label: &str) -> Option<Item> {
        let (name, value) = label.split_once('=')?;
        if name == "class" {
            return value.parse().ok().map(Item::Class);
        }
        let id = self.find(name)?;
        let bin = self.get(id).bin_from_label(value)?;
        Some(Item::Descriptor { descriptor: id, bin })
    }

    /// `(a,b)(c)` rendering; empty itemsets render as `()`.
    pub fn format_sequence(&self, s: &Sequence) -> String {
        let mut out = String::new();
        for set in s.itemsets() {
            out.push('(');
            for (i, &item) in set.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&self.item_label(item));
            }
            out.push(')');
        }
        out
    }

    /// Inverse of [`Self::format_sequence`]; `None` on malformed input.
    pub fn parse_sequence(&self, text: &str) -> Option<Sequence> {
        let mut itemsets = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            rest = rest.strip_prefix('(')?;
            let end = rest.find(')')?;
            let body = &rest[..end];
            let set = if body.is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|l| self.parse_item(l))
                    .collect::<Option<Vec<_>>>()?
            };
            itemsets.push(set);
            rest = &rest[end + 1..];
        }
        Some(Sequence::new(itemsets))
    }
}

fn descriptor_value(
    spec: &DescriptorSpec,
    attr: Option<usize>,
    measures: &MeasureTable,
    net: &DynamicNetwork,
    t: usize,
    v: NodeId,
) -> Option<f64> {
    match spec.source() {
        DescriptorSource::Measure(m) => Some(measures.get(t, v).get(*m)),
        DescriptorSource::Attribute(_) => net.attribute_at(attr?, t - 1, v.index()),
    }
}

fn attribute_columns(net: &DynamicNetwork, specs: &DescriptorSet) -> Result<Vec<Option<usize>>> {
    specs
        .specs()
        .iter()
        .map(|s| match s.source() {
            DescriptorSource::Measure(_) => Ok(None),
            DescriptorSource::Attribute(a) => net
                .attribute_index(a)
                .map(Some)
                .ok_or_else(|| Error::UnknownAttribute(a.clone())),
        })
        .collect()
}

/// `u(v)`: one itemset per slice holding the discretized value of every
/// descriptor defined at that slice.
pub fn node_sequence(
    v: NodeId,
    measures: &MeasureTable,
    net: &DynamicNetwork,
    specs: &DescriptorSet,
) -> Result<Sequence> {
    let columns = attribute_columns(net, specs)?;
    node_sequence_with(v, measures, net, specs, &columns)
}

fn node_sequence_with(
    v: NodeId,
    measures: &MeasureTable,
    net: &DynamicNetwork,
    specs: &DescriptorSet,
    columns: &[Option<usize>],
) -> Result<Sequence> {
    let mut itemsets = Vec::with_capacity(net.slices());
    for t in 1..=net.slices() {
        let mut set = Vec::with_capacity(specs.len());
        for (id, spec) in specs.specs().iter().enumerate() {
            let value = descriptor_value(spec, columns[id], measures, net, t, v);
            if let Some(item) = specs.discretize(id as u16, value)? {
                set.push(item);
            }
        }
        itemsets.push(set);
    }
    Ok(Sequence::new(itemsets))
}

/// The mining database `𝓜`: for each node, `u(v) • C(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDatabase {
    entries: Vec<Sequence>,
    slices: usize,
    comm: CommunityStructure,
}

/// Node scope for support computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Whole,
    Community(usize),
    Complement(usize),
}

/// Support of a sequence within a scope, with its supporting nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub count: usize,
    pub scope_size: usize,
    pub nodes: NodeSet,
}

impl Support {
    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.scope_size as f64
    }
}

impl SequenceDatabase {
    pub fn build(
        net: &DynamicNetwork,
        measures: &MeasureTable,
        comm: &CommunityStructure,
        specs: &DescriptorSet,
    ) -> Result<Self> {
        comm.check_covers(net.n())?;
        let columns = attribute_columns(net, specs)?;
        let entries = net
            .nodes()
            .map(|v| {
                let u = node_sequence_with(v, measures, net, specs, &columns)?;
                Ok(u.concat(Item::Class(comm.community_of(v) as u32)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SequenceDatabase {
            entries,
            slices: net.slices(),
            comm: comm.clone(),
        })
    }

    /// Reassembles a database from already concatenated entries, checking
    /// that each one is `θ` descriptor itemsets followed by `{C(v)}`.
    pub fn from_entries(entries: Vec<Sequence>, comm: CommunityStructure) -> Result<Self> {
        comm.check_covers(entries.len())?;
        let slices = entries.first().map_or(0, |s| s.len().saturating_sub(1));
        for (v, s) in entries.iter().enumerate() {
            let c = comm.community_of(NodeId::from(v)) as u32;
            let (last, body) = s.itemsets().split_last().ok_or(Error::MisplacedClassItem)?;
            if s.len() != slices + 1
                || last.as_slice() != [Item::Class(c)]
                || body.iter().flatten().any(|i| i.is_class())
            {
                return Err(Error::MisplacedClassItem);
            }
        }
        Ok(SequenceDatabase {
            entries,
            slices,
            comm,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn communities(&self) -> &CommunityStructure {
        &self.comm
    }

    /// All entries `u(v) • C(v)`, indexed by node.
    pub fn sequences(&self) -> &[Sequence] {
        &self.entries
    }

    pub fn sequence(&self, v: NodeId) -> &Sequence {
        &self.entries[v.index()]
    }

    /// `Sup(s)` / `Sup(s, C_c)` / `Sup(s, C̄_c)` by scanning the database.
    pub fn support(&self, s: &Sequence, scope: Scope) -> Result<Support> {
        if s.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let n = self.n();
        let in_scope = |v: NodeId| match scope {
            Scope::Whole => true,
            Scope::Community(c) => self.comm.community_of(v) == c,
            Scope::Complement(c) => self.comm.community_of(v) != c,
        };
        let mut nodes = NodeSet::new(n);
        let mut scope_size = 0;
        for (i, entry) in self.entries.iter().enumerate() {
            let v = NodeId::from(i);
            if !in_scope(v) {
                continue;
            }
            scope_size += 1;
            if is_subsequence(s, entry) {
                nodes.insert(v);
            }
        }
        if scope_size == 0 {
            return Err(Error::EmptyScope);
        }
        Ok(Support {
            count: nodes.len(),
            scope_size,
            nodes,
        })
    }
}
