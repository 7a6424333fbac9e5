//! Synthetic planted-signature network.
//!
//! Two communities `A` (nodes `a01..a20`) and `B` (`b01..b20`) over five
//! slices. In every slice a pair inside a community is linked with
//! probability 0.3 and a pair across communities with probability 0.02.
//! Exactly 17 nodes of `A` and one node of `B` carry the attribute `x = 1` in
//! one or two random slices; every node carries a noise attribute `y` with
//! the same distribution in both communities.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const COMMUNITY_SIZE: usize = 20;
pub const SLICES: usize = 5;
pub const P_IN: f64 = 0.3;
pub const P_OUT: f64 = 0.02;
pub const CARRIERS_A: usize = 17;
pub const CARRIERS_B: usize = 1;
pub const SIGNATURE: &str = "x";

#[derive(Debug, Clone, PartialEq)]
pub struct Planted {
    pub edges: Vec<(usize, String, String)>,
    pub attributes: Vec<(usize, String, String, f64)>,
    /// `(label, community)` with `A = 0`, `B = 1`.
    pub truth: Vec<(String, usize)>,
    /// Labels carrying the signature attribute.
    pub carriers: Vec<String>,
}

fn node_label(community: usize, i: usize) -> String {
    let prefix = if community == 0 { 'a' } else { 'b' };
    format!("{prefix}{:02}", i + 1)
}

pub fn planted(seed: u64) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<(String, usize)> = (0..2)
        .flat_map(|c| (0..COMMUNITY_SIZE).map(move |i| (node_label(c, i), c)))
        .collect();

    let mut edges = Vec::new();
    for t in 1..=SLICES {
        for (i, (u, cu)) in nodes.iter().enumerate() {
            for (v, cv) in &nodes[i + 1..] {
                let p = if cu == cv { P_IN } else { P_OUT };
                if rng.random_bool(p) {
                    edges.push((t, u.clone(), v.clone()));
                }
            }
        }
    }

    let mut carriers = Vec::new();
    for (c, count) in [(0, CARRIERS_A), (1, CARRIERS_B)] {
        let mut idx: Vec<usize> = (0..COMMUNITY_SIZE).collect();
        idx.shuffle(&mut rng);
        idx.truncate(count);
        idx.sort_unstable();
        carriers.extend(idx.into_iter().map(|i| node_label(c, i)));
    }

    let mut attributes = Vec::new();
    for (label, _) in &nodes {
        if carriers.contains(label) {
            let mut slices: Vec<usize> = (1..=SLICES).collect();
            slices.shuffle(&mut rng);
            slices.truncate(rng.random_range(1..=2));
            slices.sort_unstable();
            for t in slices {
                attributes.push((t, label.clone(), SIGNATURE.to_string(), 1.0));
            }
        }
        for t in 1..=SLICES {
            if rng.random_bool(0.3) {
                let y = rng.random_range(1..=3) as f64;
                attributes.push((t, label.clone(), "y".to_string(), y));
            }
        }
    }
    attributes.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));

    Planted {
        edges,
        attributes,
        truth: nodes,
        carriers,
    }
}

/// Writes `edges.csv`, `attrs.csv` and `truth.csv` into `dir`.
pub fn write_planted(dir: &Path, seed: u64) -> Result<Planted> {
    let p = planted(seed);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    let mut edges = String::from("t,u,v\n");
    for (t, u, v) in &p.edges {
        edges.push_str(&format!("{t},{u},{v}\n"));
    }
    write("edges.csv", edges)?;
    let mut attrs = String::from("t,node,attr,value\n");
    for (t, node, attr, value) in &p.attributes {
        attrs.push_str(&format!("{t},{node},{attr},{value}\n"));
    }
    write("attrs.csv", attrs)?;
    let mut truth = String::from("node,community\n");
    for (label, c) in &p.truth {
        truth.push_str(&format!("{label},{c}\n"));
    }
    write("truth.csv", truth)?;
    Ok(p)
}
