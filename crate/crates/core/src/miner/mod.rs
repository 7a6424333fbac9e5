//! Closed frequent sequential pattern mining.
//!
//! Mining runs in two steps over a prefix lattice:
//!
//! 1. **Candidate generation.** Depth-first prefix growth with itemset- and
//!    sequence-extensions over pseudo-projected databases. Each projected
//!    entry keeps the full set of positions where the prefix's last itemset
//!    can end, which makes both extension kinds exact. A prefix `s` whose
//!    projection equals that of an already explored super-pattern `s'`
//!    (with `s ⊑ s'` aligned on the last itemset) has only non-closed
//!    descendants, so its subtree is skipped. Equal projections are looked up
//!    through a key made of the support count, the sum of supporting entry
//!    ids and the total number of projected positions; because `s ⊑ s'`
//!    implies the projection of `s'` is contained in that of `s`, equal keys
//!    plus the verified subsequence relation imply equal projections.
//! 2. **Elimination.** A candidate is closed iff no single-item insertion
//!    (into an existing itemset or as a new itemset, at any position) keeps
//!    every supporter. The insertion windows come from the left-most and
//!    right-most embeddings of the candidate in each supporter.

mod oracle;

pub use oracle::{brute_force_closed, ORACLE_MAX_ALPHABET, ORACLE_MAX_ITEMS};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sequence::{Item, Sequence};

/// A closed frequent sequence with its absolute support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinedPattern {
    pub sequence: Sequence,
    pub support_count: usize,
    /// Community of the trailing class item, if the pattern ends with one.
    pub class_tag: Option<u32>,
}

impl MinedPattern {
    pub fn new(sequence: Sequence, support_count: usize) -> Self {
        let class_tag = sequence.itemsets().last().and_then(|last| {
            last.iter().find_map(|i| match *i {
                Item::Class(c) => Some(c),
                _ => None,
            })
        });
        MinedPattern {
            sequence,
            support_count,
            class_tag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinerLimits {
    /// Upper bound on explored lattice nodes.
    pub max_candidates: usize,
}

impl Default for MinerLimits {
    fn default() -> Self {
        MinerLimits {
            max_candidates: 5_000_000,
        }
    }
}

/// Smallest absolute count meeting `min_sup` on `n` entries.
pub fn min_count(min_sup: f64, n: usize) -> usize {
    let c = libm::ceil(min_sup * n as f64 - 1e-9);
    (c.max(1.0)) as usize
}

pub(crate) fn check_min_sup(min_sup: f64) -> Result<()> {
    if !(min_sup > 0.0 && min_sup <= 1.0) {
        return Err(Error::MinSupport(min_sup));
    }
    Ok(())
}

/// All closed frequent sequences of `db` at relative support `min_sup`,
/// sorted canonically.
pub fn mine_closed(db: &[Sequence], min_sup: f64) -> Result<Vec<MinedPattern>> {
    mine_closed_with(db, min_sup, MinerLimits::default())
}

pub fn mine_closed_with(
    db: &[Sequence],
    min_sup: f64,
    limits: MinerLimits,
) -> Result<Vec<MinedPattern>> {
    check_min_sup(min_sup)?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let encoded = EncodedDb::new(db);
    let mut miner = Miner {
        db: &encoded,
        min_count: min_count(min_sup, db.len()),
        limits,
        visited: 0,
        registry: BTreeMap::new(),
        arena: Vec::new(),
        spans: Vec::new(),
        counts: vec![0; encoded.alphabet.len()],
        stamps: vec![u32::MAX; encoded.alphabet.len()],
        touched: Vec::new(),
        prefix: Vec::new(),
        out: Vec::new(),
    };
    miner.run()?;
    let mut out: Vec<MinedPattern> = miner
        .out
        .into_iter()
        .map(|(pattern, count)| {
            let itemsets = pattern
                .into_iter()
                .map(|set| set.into_iter().map(|c| encoded.alphabet[c as usize]).collect())
                .collect();
            MinedPattern::new(Sequence::new(itemsets), count)
        })
        .collect();
    out.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    Ok(out)
}

/// Groups mined patterns by the class item they end with, stripping it.
///
/// Patterns made of the class itemset alone are dropped: their stripped
/// form is the empty sequence.
pub fn split_by_class(
    patterns: &[MinedPattern],
) -> Result<BTreeMap<Option<u32>, Vec<MinedPattern>>> {
    let mut out: BTreeMap<Option<u32>, Vec<MinedPattern>> = BTreeMap::new();
    for p in patterns {
        let sets = p.sequence.itemsets();
        let (last, body) = match sets.split_last() {
            Some(x) => x,
            None => return Err(Error::EmptyPattern),
        };
        if body.iter().flatten().any(|i| i.is_class()) {
            return Err(Error::MisplacedClassItem);
        }
        let class = match last.iter().find(|i| i.is_class()) {
            None => {
                out.entry(None).or_default().push(p.clone());
                continue;
            }
            Some(&Item::Class(c)) if last.len() == 1 => c,
            Some(_) => return Err(Error::MisplacedClassItem),
        };
        if body.is_empty() {
            continue;
        }
        out.entry(Some(class)).or_default().push(MinedPattern {
            sequence: Sequence::new(body.to_vec()),
            support_count: p.support_count,
            class_tag: Some(class),
        });
    }
    Ok(out)
}

struct EncodedSeq {
    itemsets: Vec<Vec<u32>>,
    occ_codes: Vec<u32>,
    occ_spans: Vec<(u32, u32)>,
    occ_positions: Vec<u32>,
}

impl EncodedSeq {
    fn occurrences(&self, code: u32) -> &[u32] {
        match self.occ_codes.binary_search(&code) {
            Ok(i) => {
                let (start, len) = self.occ_spans[i];
                &self.occ_positions[start as usize..(start + len) as usize]
            }
            Err(_) => &[],
        }
    }
}

struct EncodedDb {
    alphabet: Vec<Item>,
    seqs: Vec<EncodedSeq>,
}

impl EncodedDb {
    fn new(db: &[Sequence]) -> Self {
        let mut alphabet: Vec<Item> = db.iter().flat_map(|s| s.items()).collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        let code = |i: &Item| alphabet.binary_search(i).unwrap() as u32;
        let seqs = db
            .iter()
            .map(|s| {
                let itemsets: Vec<Vec<u32>> = s
                    .itemsets()
                    .iter()
                    .map(|set| set.iter().map(code).collect())
                    .collect();
                let mut occ: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
                for (p, set) in itemsets.iter().enumerate() {
                    for &c in set {
                        occ.entry(c).or_default().push(p as u32);
                    }
                }
                let mut occ_codes = Vec::with_capacity(occ.len());
                let mut occ_spans = Vec::with_capacity(occ.len());
                let mut occ_positions = Vec::new();
                for (c, positions) in occ {
                    occ_codes.push(c);
                    occ_spans.push((occ_positions.len() as u32, positions.len() as u32));
                    occ_positions.extend(positions);
                }
                EncodedSeq {
                    itemsets,
                    occ_codes,
                    occ_spans,
                    occ_positions,
                }
            })
            .collect();
        EncodedDb { alphabet, seqs }
    }
}

/// Pseudo-projection: for each supporting entry, the sorted positions where
/// the prefix's last itemset can end.
#[derive(Default)]
struct Projection {
    entries: Vec<(u32, u32, u32)>,
    positions: Vec<u32>,
}

impl Projection {
    fn push(&mut self, seq: u32, positions: impl IntoIterator<Item = u32>) {
        let start = self.positions.len();
        self.positions.extend(positions);
        let len = self.positions.len() - start;
        if len > 0 {
            self.entries.push((seq, start as u32, len as u32));
        } else {
            self.positions.truncate(start);
        }
    }

    fn ends(&self, entry: &(u32, u32, u32)) -> &[u32] {
        &self.positions[entry.1 as usize..(entry.1 + entry.2) as usize]
    }

    fn key(&self) -> (u32, u64, u64) {
        let ids = self.entries.iter().map(|e| e.0 as u64).sum();
        (self.entries.len() as u32, ids, self.positions.len() as u64)
    }
}

const SEP: u32 = u32::MAX;

struct Miner<'a> {
    db: &'a EncodedDb,
    min_count: usize,
    limits: MinerLimits,
    visited: usize,
    registry: BTreeMap<(u32, u64, u64), Vec<u32>>,
    arena: Vec<u32>,
    spans: Vec<(u32, u32)>,
    counts: Vec<u32>,
    stamps: Vec<u32>,
    touched: Vec<u32>,
    prefix: Vec<Vec<u32>>,
    out: Vec<(Vec<Vec<u32>>, usize)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ext {
    Itemset,
    Sequence,
}

impl Miner<'_> {
    fn run(&mut self) -> Result<()> {
        for (s, seq) in self.db.seqs.iter().enumerate() {
            for &c in &seq.occ_codes {
                self.bump(c, s as u32);
            }
        }
        let roots = self.take_frequent();
        for code in roots {
            let mut proj = Projection::default();
            for (s, seq) in self.db.seqs.iter().enumerate() {
                proj.push(s as u32, seq.occurrences(code).iter().copied());
            }
            self.prefix.push(vec![code]);
            self.visit(&proj)?;
            self.prefix.pop();
        }
        Ok(())
    }

    #[inline]
    fn bump(&mut self, code: u32, seq: u32) {
        let c = code as usize;
        if self.stamps[c] != seq {
            if self.counts[c] == 0 {
                self.touched.push(code);
            }
            self.stamps[c] = seq;
            self.counts[c] += 1;
        }
    }

    /// Frequent codes counted since the last call, ascending; resets scratch.
    fn take_frequent(&mut self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .touched
            .iter()
            .copied()
            .filter(|&c| self.counts[c as usize] as usize >= self.min_count)
            .collect();
        out.sort_unstable();
        for &c in &self.touched {
            self.counts[c as usize] = 0;
            self.stamps[c as usize] = u32::MAX;
        }
        self.touched.clear();
        out
    }

    fn take_counts(&mut self, codes: &[u32]) -> Vec<u32> {
        codes.iter().map(|&c| self.counts[c as usize]).collect()
    }

    fn visit(&mut self, proj: &Projection) -> Result<()> {
        let key = proj.key();
        if let Some(bucket) = self.registry.get(&key) {
            for &id in bucket {
                let (start, len) = self.spans[id as usize];
                let other = &self.arena[start as usize..(start + len) as usize];
                if aligned_subsequence(&self.prefix, other) {
                    return Ok(());
                }
            }
        }
        self.visited += 1;
        if self.visited > self.limits.max_candidates {
            return Err(Error::CandidateLimit {
                limit: self.limits.max_candidates,
            });
        }
        let id = self.spans.len() as u32;
        let start = self.arena.len() as u32;
        for (i, set) in self.prefix.iter().enumerate() {
            if i > 0 {
                self.arena.push(SEP);
            }
            self.arena.extend_from_slice(set);
        }
        self.spans.push((start, self.arena.len() as u32 - start));
        self.registry.entry(key).or_default().push(id);

        let support = proj.entries.len();
        let last_max = *self.prefix.last().unwrap().last().unwrap();

        // itemset extensions: items after the last prefix item, same itemset
        for &(s, st, len) in &proj.entries {
            let seq = &self.db.seqs[s as usize];
            for &p in &proj.positions[st as usize..(st + len) as usize] {
                for &c in &seq.itemsets[p as usize] {
                    if c > last_max {
                        self.bump(c, s);
                    }
                }
            }
        }
        let iset_codes = self.take_frequent_keep();
        let iset_counts = self.take_counts(&iset_codes);
        self.reset_scratch();

        // sequence extensions: items in any itemset after the first end
        for &(s, st, _) in &proj.entries {
            let seq = &self.db.seqs[s as usize];
            let first = proj.positions[st as usize] as usize;
            for set in &seq.itemsets[first + 1..] {
                for &c in set {
                    self.bump(c, s);
                }
            }
        }
        let seq_codes = self.take_frequent_keep();
        let seq_counts = self.take_counts(&seq_codes);
        self.reset_scratch();

        let forward_equal = iset_counts
            .iter()
            .chain(&seq_counts)
            .any(|&c| c as usize == support);
        if !forward_equal && self.is_closed(proj) {
            self.out.push((self.prefix.clone(), support));
        }

        for &code in &iset_codes {
            let child = self.extend(proj, code, Ext::Itemset);
            self.prefix.last_mut().unwrap().push(code);
            let r = self.visit(&child);
            self.prefix.last_mut().unwrap().pop();
            r?;
        }
        for &code in &seq_codes {
            let child = self.extend(proj, code, Ext::Sequence);
            self.prefix.push(vec![code]);
            let r = self.visit(&child);
            self.prefix.pop();
            r?;
        }
        Ok(())
    }

    fn take_frequent_keep(&mut self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .touched
            .iter()
            .copied()
            .filter(|&c| self.counts[c as usize] as usize >= self.min_count)
            .collect();
        out.sort_unstable();
        out
    }

    fn reset_scratch(&mut self) {
        for &c in &self.touched {
            self.counts[c as usize] = 0;
            self.stamps[c as usize] = u32::MAX;
        }
        self.touched.clear();
    }

    fn extend(&self, proj: &Projection, code: u32, ext: Ext) -> Projection {
        let mut child = Projection::default();
        for e in &proj.entries {
            let seq = &self.db.seqs[e.0 as usize];
            let occ = seq.occurrences(code);
            if occ.is_empty() {
                continue;
            }
            let ends = proj.ends(e);
            match ext {
                Ext::Itemset => {
                    child.push(e.0, intersect_sorted(ends, occ));
                }
                Ext::Sequence => {
                    let first = ends[0];
                    let from = occ.partition_point(|&p| p <= first);
                    child.push(e.0, occ[from..].iter().copied());
                }
            }
        }
        child
    }

    /// True iff no single-item insertion keeps all supporters.
    fn is_closed(&self, proj: &Projection) -> bool {
        let k = self.prefix.len();
        // per supporter: left-most ends and right-most starts
        let bounds: Vec<(Vec<u32>, Vec<u32>)> = proj
            .entries
            .iter()
            .map(|e| {
                let seq = &self.db.seqs[e.0 as usize];
                (leftmost_ends(&self.prefix, seq), rightmost_starts(&self.prefix, seq))
            })
            .collect();
        let window = |b: &(Vec<u32>, Vec<u32>), m: usize, before: usize, after: usize| {
            // positions strictly after the end of prefix[..before] and strictly
            // before the start of prefix[after..]
            let lo = if before == 0 { 0 } else { b.0[before - 1] as usize + 1 };
            let hi = if after >= k { m } else { b.1[after] as usize };
            (lo, hi)
        };

        // new itemset inserted before prefix[i]
        for i in 0..=k {
            let mut cand: Option<Vec<u32>> = None;
            for (e, b) in proj.entries.iter().zip(&bounds) {
                let seq = &self.db.seqs[e.0 as usize];
                let (lo, hi) = window(b, seq.itemsets.len(), i, i);
                match cand.as_mut() {
                    None => {
                        let mut items: Vec<u32> = seq
                            .itemsets
                            .get(lo..hi)
                            .unwrap_or(&[])
                            .iter()
                            .flatten()
                            .copied()
                            .collect();
                        items.sort_unstable();
                        items.dedup();
                        cand = Some(items);
                    }
                    Some(items) => items.retain(|&c| {
                        seq.occurrences(c).iter().any(|&p| (p as usize) >= lo && (p as usize) < hi)
                    }),
                }
                if cand.as_ref().is_some_and(Vec::is_empty) {
                    break;
                }
            }
            if cand.is_some_and(|c| !c.is_empty()) {
                return false;
            }
        }

        // one more item inside prefix[i]
        for i in 0..k {
            let target = &self.prefix[i];
            let mut cand: Option<Vec<u32>> = None;
            for (e, b) in proj.entries.iter().zip(&bounds) {
                let seq = &self.db.seqs[e.0 as usize];
                let (lo, hi) = window(b, seq.itemsets.len(), i, i + 1);
                let fits = |p: usize| sorted_contains(&seq.itemsets[p], target);
                match cand.as_mut() {
                    None => {
                        let mut items = Vec::new();
                        for p in lo..hi.min(seq.itemsets.len()) {
                            if fits(p) {
                                items.extend(
                                    seq.itemsets[p].iter().filter(|c| target.binary_search(c).is_err()),
                                );
                            }
                        }
                        items.sort_unstable();
                        items.dedup();
                        cand = Some(items);
                    }
                    Some(items) => items.retain(|&c| {
                        seq.occurrences(c)
                            .iter()
                            .any(|&p| (p as usize) >= lo && (p as usize) < hi && fits(p as usize))
                    }),
                }
                if cand.as_ref().is_some_and(Vec::is_empty) {
                    break;
                }
            }
            if cand.is_some_and(|c| !c.is_empty()) {
                return false;
            }
        }
        true
    }
}

fn intersect_sorted<'a>(a: &'a [u32], b: &'a [u32]) -> impl Iterator<Item = u32> + 'a {
    let mut j = 0;
    a.iter().copied().filter(move |&x| {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        j < b.len() && b[j] == x
    })
}

fn sorted_contains(outer: &[u32], inner: &[u32]) -> bool {
    let mut j = 0;
    for &x in inner {
        while j < outer.len() && outer[j] < x {
            j += 1;
        }
        if j == outer.len() || outer[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// End position of the left-most embedding of `pattern[..=i]`, for every i.
fn leftmost_ends(pattern: &[Vec<u32>], seq: &EncodedSeq) -> Vec<u32> {
    let mut out = Vec::with_capacity(pattern.len());
    let mut pos = 0;
    for set in pattern {
        while !sorted_contains(&seq.itemsets[pos], set) {
            pos += 1;
        }
        out.push(pos as u32);
        pos += 1;
    }
    out
}

/// Start position of the right-most embedding of `pattern[i..]`, for every i.
fn rightmost_starts(pattern: &[Vec<u32>], seq: &EncodedSeq) -> Vec<u32> {
    let mut out = vec![0; pattern.len()];
    let mut pos = seq.itemsets.len();
    for (i, set) in pattern.iter().enumerate().rev() {
        pos -= 1;
        while !sorted_contains(&seq.itemsets[pos], set) {
            pos -= 1;
        }
        out[i] = pos as u32;
    }
    out
}

/// `s[..-1] ⊑ t[..-1]` and `last(s) ⊆ last(t)`, with `t` in arena encoding.
fn aligned_subsequence(s: &[Vec<u32>], t: &[u32]) -> bool {
    let mut t_sets: Vec<&[u32]> = t.split(|&c| c == SEP).collect();
    let (Some(s_last), Some(t_last)) = (s.last(), t_sets.pop()) else {
        return false;
    };
    if !sorted_contains(t_last, s_last) {
        return false;
    }
    let mut pos = 0;
    for set in &s[..s.len() - 1] {
        match t_sets[pos..].iter().position(|hay| sorted_contains(hay, set)) {
            Some(off) => pos += off + 1,
            None => return false,
        }
    }
    true
}
