#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrashift::dsl::parse_ultragraph;
use ultrashift::Ultragraph;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Ultragraph {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_ultragraph(&text).unwrap()
}

pub const FIXTURES: [&str; 6] =
    ["two_family.ug", "two_loops.ug", "loop_family.ug", "single_cycle.ug", "ladder.ug", "sieve.ug"];

/// A finite ultragraph as raw data: `(source, range)` per edge.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub vertices: u64,
    pub edges: Vec<(u64, Vec<u64>)>,
}

impl RawGraph {
    pub fn build(&self) -> Ultragraph {
        Ultragraph::from_edge_list(self.vertices, &self.edges).unwrap()
    }
}

/// At most 6 vertices and 12 edges, every vertex a source, ranges of 1 to 3
/// vertices (mostly 1).
pub fn random_graph(rng: &mut ChaCha8Rng) -> RawGraph {
    let n = rng.gen_range(1..=6u64);
    let m = (n as usize + rng.gen_range(0..=3)).min(12);
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let src = if (i as u64) < n { i as u64 } else { rng.gen_range(0..n) };
        let size = match rng.gen_range(0..10) {
            0..=6 => 1,
            7..=8 => 2,
            _ => 3,
        }
        .min(n as usize);
        let mut range = BTreeSet::new();
        while range.len() < size {
            range.insert(rng.gen_range(0..n));
        }
        edges.push((src, range.into_iter().collect()));
    }
    RawGraph { vertices: n, edges }
}

pub fn seeded_graphs(seed: u64, count: usize) -> Vec<RawGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_graph(&mut rng)).collect()
}

/// Counts returning walks at `v`, stopping at `cap`. A returning walk starts
/// with an edge out of `v`, never leaves from `v` again, and ends with an
/// edge whose range holds `v`.
///
/// Shortcutting a repeated edge keeps a walk returning, so with two distinct
/// returning walks there are two of length at most `2·|E|`; the search is
/// complete up to that length.
pub fn returning_walks(g: &RawGraph, v: u64, cap: usize) -> usize {
    // edges from which a returning end is still reachable
    let mut live = vec![false; g.edges.len()];
    loop {
        let mut changed = false;
        for (i, (_, range)) in g.edges.iter().enumerate() {
            if live[i] {
                continue;
            }
            let reaches = range.contains(&v)
                || g.edges.iter().enumerate().any(|(k, (s, _))| live[k] && *s != v && range.contains(s));
            if reaches {
                live[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let max_len = 2 * g.edges.len();
    let mut found = 0;
    let mut stack: Vec<(usize, usize)> =
        g.edges.iter().enumerate().filter(|(i, (s, _))| *s == v && live[*i]).map(|(i, _)| (i, 1)).collect();
    while let Some((e, len)) = stack.pop() {
        let range = &g.edges[e].1;
        if range.contains(&v) {
            found += 1;
            if found >= cap {
                return found;
            }
        }
        if len == max_len {
            continue;
        }
        for (k, (s, _)) in g.edges.iter().enumerate() {
            if live[k] && *s != v && range.contains(s) {
                stack.push((k, len + 1));
            }
        }
    }
    found
}

/// Some vertex has at least two returning walks.
pub fn oracle_chaotic(g: &RawGraph) -> bool {
    (0..g.vertices).any(|v| returning_walks(g, v, 2) >= 2)
}
