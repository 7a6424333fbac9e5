//! Exhaustive reference miner for small databases.
//!
//! Enumerates every distinct subsequence of every entry, counts support with
//! a backtracking matcher, and removes non-closed patterns pairwise. Shares
//! no code with the lattice miner.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{check_min_sup, MinedPattern};
use crate::error::{Error, Result};
use crate::sequence::{Item, Sequence};

pub const ORACLE_MAX_ITEMS: usize = 40;
pub const ORACLE_MAX_ALPHABET: usize = 8;

type Raw = Vec<Vec<Item>>;

pub fn brute_force_closed(db: &[Sequence], min_sup: f64) -> Result<Vec<MinedPattern>> {
    check_min_sup(min_sup)?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let items: usize = db.iter().map(Sequence::item_count).sum();
    let alphabet = db.iter().flat_map(Sequence::items).collect::<BTreeSet<_>>().len();
    if items > ORACLE_MAX_ITEMS || alphabet > ORACLE_MAX_ALPHABET {
        return Err(Error::OracleGuard {
            items,
            alphabet,
            max_items: ORACLE_MAX_ITEMS,
            max_alphabet: ORACLE_MAX_ALPHABET,
        });
    }

    let raw: Vec<Raw> = db.iter().map(|s| s.itemsets().to_vec()).collect();
    let mut candidates: BTreeSet<Raw> = BTreeSet::new();
    for s in &raw {
        let mut current = Vec::new();
        enumerate(s, 0, &mut current, &mut candidates);
    }

    let n = raw.len() as f64;
    let frequent: Vec<(Raw, usize)> = candidates
        .into_iter()
        .map(|c| {
            let count = raw.iter().filter(|s| embeds(&c, s)).count();
            (c, count)
        })
        .filter(|&(_, count)| count as f64 / n + 1e-12 >= min_sup)
        .collect();

    // a proper super-pattern with equal support has strictly more items
    let mut by_count: BTreeMap<usize, Vec<(&Raw, usize)>> = BTreeMap::new();
    for (p, count) in &frequent {
        by_count.entry(*count).or_default().push((p, size(p)));
    }
    let mut out: Vec<MinedPattern> = frequent
        .iter()
        .filter(|(p, count)| {
            let n = size(p);
            !by_count[count]
                .iter()
                .any(|&(q, m)| m > n && embeds(p, q))
        })
        .map(|(p, count)| MinedPattern::new(Sequence::new(p.clone()), *count))
        .collect();
    out.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    Ok(out)
}

/// Every non-empty subsequence of `s[from..]` appended to `current`.
fn enumerate(s: &Raw, from: usize, current: &mut Raw, out: &mut BTreeSet<Raw>) {
    for p in from..s.len() {
        let set = &s[p];
        // every non-empty subset of the itemset, via bitmask
        for mask in 1u64..(1u64 << set.len()) {
            let subset: Vec<Item> = set
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect();
            current.push(subset);
            out.insert(current.clone());
            enumerate(s, p + 1, current, out);
            current.pop();
        }
    }
}

fn size(p: &Raw) -> usize {
    p.iter().map(Vec::len).sum()
}

fn subset(inner: &[Item], outer: &[Item]) -> bool {
    inner.iter().all(|x| outer.contains(x))
}

/// Does `pattern` embed into `seq`? Tries every placement.
fn embeds(pattern: &[Vec<Item>], seq: &[Vec<Item>]) -> bool {
    match pattern.split_first() {
        None => true,
        Some((head, rest)) => (0..seq.len())
            .any(|p| subset(head, &seq[p]) && embeds(rest, &seq[p + 1..])),
    }
}
