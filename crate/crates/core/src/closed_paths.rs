//! Closed paths based at a vertex: `e₁…e_k` with `s(e₁) = v ∈ r(e_k)` and
//! `s(e_i) ≠ v` for `i > 1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::{ClosedPath, InfinitePath, Occurrence};
use crate::ultragraph::{EdgeId, Ultragraph};
use crate::vertex_set::{VertexId, VertexSet};

/// DFS nodes visited before a bounded search gives up.
const NODE_BUDGET: usize = 500_000;

#[derive(Debug, Clone, Serialize)]
pub struct ClosedPathSearch {
    pub paths: Vec<ClosedPath>,
    /// The space within the bounds was searched in full.
    pub exhausted: bool,
    /// No bound was reached, so `paths` is all of `CP(v)`.
    pub complete: bool,
}

/// Closed paths at `v` with at most `length_bound` edges, each of index at
/// most `index_bound`, stopping after `limit` paths.
pub fn closed_paths(
    g: &Ultragraph,
    v: &VertexId,
    length_bound: usize,
    index_bound: u64,
    limit: usize,
) -> ClosedPathSearch {
    let mut s = Search {
        g,
        v,
        length_bound,
        index_bound,
        limit: limit.max(1),
        paths: Vec::new(),
        nodes: 0,
        hit_bound: false,
        stopped: false,
    };
    let first = VertexSet::singleton(v);
    let mut cur = Vec::new();
    s.extend(&first, &mut cur);
    ClosedPathSearch { exhausted: !s.stopped, complete: !s.stopped && !s.hit_bound, paths: s.paths }
}

struct Search<'a> {
    g: &'a Ultragraph,
    v: &'a VertexId,
    length_bound: usize,
    index_bound: u64,
    limit: usize,
    paths: Vec<ClosedPath>,
    nodes: usize,
    hit_bound: bool,
    stopped: bool,
}

impl Search<'_> {
    fn extend(&mut self, from: &VertexSet, cur: &mut Vec<EdgeId>) {
        let eps = self.g.epsilon(from);
        if eps.is_empty() {
            return;
        }
        if cur.len() == self.length_bound {
            self.hit_bound = true;
            return;
        }
        let edges = eps.edges_up_to(self.index_bound);
        if eps.cardinality() != crate::Cardinality::Finite(edges.len() as u64) {
            self.hit_bound = true;
        }
        for e in edges {
            if self.stopped {
                return;
            }
            self.nodes += 1;
            if self.nodes > NODE_BUDGET {
                self.stopped = true;
                return;
            }
            let range = self.g.range(&e).expect("edge from epsilon");
            cur.push(e);
            if range.contains(self.v) {
                self.paths.push(ClosedPath { vertex: self.v.clone(), edges: cur.clone() });
                if self.paths.len() >= self.limit {
                    self.stopped = true;
                    cur.pop();
                    return;
                }
            }
            let rest = range.difference(&VertexSet::singleton(self.v));
            self.extend(&rest, cur);
            cur.pop();
        }
    }
}

/// Outcome of deciding `#CP(v) ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum CpDecision {
    Yes {
        c1: ClosedPath,
        c2: ClosedPath,
    },
    /// Fewer than two; `single` is the unique closed path when there is one.
    No {
        single: Option<ClosedPath>,
    },
    Unknown,
}

/// Decides `#CP(v) ≥ 2`. Exact on finite ultragraphs; otherwise a bounded
/// search that can only answer `Yes`.
pub fn cp_at_least_two(g: &Ultragraph, v: &VertexId, length_bound: usize, index_bound: u64) -> CpDecision {
    if g.is_finite() {
        return EdgeGraph::new(g, v).decide();
    }
    let found = closed_paths(g, v, length_bound, index_bound, 2);
    match found.paths.as_slice() {
        [a, b, ..] => CpDecision::Yes { c1: a.clone(), c2: b.clone() },
        [a] if found.complete => CpDecision::No { single: Some(a.clone()) },
        [] if found.complete => CpDecision::No { single: None },
        _ => CpDecision::Unknown,
    }
}

/// Edges as nodes; `e → e′` when `s(e′) ∈ r(e)` and `s(e′) ≠ v`. Closed
/// paths at `v` are exactly the walks from an edge leaving `v` to an edge
/// whose range contains `v`.
struct EdgeGraph {
    v: VertexId,
    edges: Vec<EdgeId>,
    next: Vec<Vec<usize>>,
    starts: Vec<usize>,
    ends: Vec<bool>,
}

impl EdgeGraph {
    fn new(g: &Ultragraph, v: &VertexId) -> Self {
        let edges: Vec<EdgeId> = g.all_edges().edges_up_to(u64::MAX);
        let mut by_source: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            by_source.entry(g.source(e).expect("declared edge")).or_default().push(i);
        }
        let mut next = Vec::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        for e in &edges {
            let r = g.range(e).expect("declared edge");
            ends.push(r.contains(v));
            let mut out = Vec::new();
            for (w, ids) in &by_source {
                if w != v && r.contains(w) {
                    out.extend(ids.iter().copied());
                }
            }
            next.push(out);
        }
        let starts = by_source.get(v).cloned().unwrap_or_default();
        EdgeGraph { v: v.clone(), edges, next, starts, ends }
    }

    fn path(&self, walk: &[usize]) -> ClosedPath {
        ClosedPath { vertex: self.v.clone(), edges: walk.iter().map(|&i| self.edges[i].clone()).collect() }
    }

    fn decide(&self) -> CpDecision {
        let n = self.edges.len();
        let mut reach = vec![false; n];
        let mut stack: Vec<usize> = self.starts.clone();
        for &s in &self.starts {
            reach[s] = true;
        }
        while let Some(a) = stack.pop() {
            for &b in &self.next[a] {
                if !reach[b] {
                    reach[b] = true;
                    stack.push(b);
                }
            }
        }
        let mut prev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in 0..n {
            for &b in &self.next[a] {
                prev[b].push(a);
            }
        }
        let mut coreach = self.ends.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.ends[i]).collect();
        while let Some(b) = stack.pop() {
            for &a in &prev[b] {
                if !coreach[a] {
                    coreach[a] = true;
                    stack.push(a);
                }
            }
        }
        let live: Vec<bool> = (0..n).map(|i| reach[i] && coreach[i]).collect();
        if let Some(cycle) = self.find_cycle(&live) {
            // pump: start → u → end, and start → u → (cycle) → u → end
            let u = cycle[0];
            let to_u = self.route_from_start(&live, u);
            let from_u = self.route_to_end(&live, u);
            let mut short = to_u.clone();
            short.extend_from_slice(&from_u[1..]);
            let mut long = to_u;
            long.extend_from_slice(&cycle[1..]);
            long.push(u);
            long.extend_from_slice(&from_u[1..]);
            return CpDecision::Yes { c1: self.path(&short), c2: self.path(&long) };
        }
        let mut found: Vec<Vec<usize>> = Vec::new();
        for &s in &self.starts {
            if live[s] {
                self.collect(&live, &mut vec![s], &mut found);
            }
            if found.len() >= 2 {
                break;
            }
        }
        match found.as_slice() {
            [a, b, ..] => CpDecision::Yes { c1: self.path(a), c2: self.path(b) },
            [a] => CpDecision::No { single: Some(self.path(a)) },
            [] => CpDecision::No { single: None },
        }
    }

    /// Walks in the acyclic live region, stopping once two are found.
    fn collect(&self, live: &[bool], walk: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
        let a = *walk.last().unwrap();
        if self.ends[a] {
            found.push(walk.clone());
        }
        for &b in &self.next[a] {
            if found.len() >= 2 {
                return;
            }
            if live[b] {
                walk.push(b);
                self.collect(live, walk, found);
                walk.pop();
            }
        }
    }

    /// A cycle `[u, …]` (returning to `u`) inside the live region.
    fn find_cycle(&self, live: &[bool]) -> Option<Vec<usize>> {
        let n = self.edges.len();
        let mut color = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for root in (0..n).filter(|&i| live[i]) {
            if color[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            color[root] = 1;
            while let Some(&mut (a, ref mut k)) = stack.last_mut() {
                if let Some(&b) = self.next[a].get(*k) {
                    *k += 1;
                    if !live[b] {
                        continue;
                    }
                    match color[b] {
                        0 => {
                            color[b] = 1;
                            parent[b] = a;
                            stack.push((b, 0));
                        }
                        1 => {
                            let mut cycle = vec![a];
                            let mut x = a;
                            while x != b {
                                x = parent[x];
                                cycle.push(x);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color[a] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    fn route_from_start(&self, live: &[bool], u: usize) -> Vec<usize> {
        let mut back: HashMap<usize, usize> = HashMap::new();
        let mut queue: std::collections::VecDeque<usize> = self.starts.iter().copied().filter(|&s| live[s]).collect();
        let mut seen: BTreeSet<usize> = queue.iter().copied().collect();
        while let Some(a) = queue.pop_front() {
            if a == u {
                let mut walk = vec![u];
                let mut x = u;
                while let Some(&p) = back.get(&x) {
                    walk.push(p);
                    x = p;
                }
                walk.reverse();
                return walk;
            }
            for &b in &self.next[a] {
                if live[b] && seen.insert(b) {
                    back.insert(b, a);
                    queue.push_back(b);
                }
            }
        }
        unreachable!("live nodes are reachable")
    }

    fn route_to_end(&self, live: &[bool], u: usize) -> Vec<usize> {
        let mut back: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([u]);
        let mut seen = BTreeSet::from([u]);
        while let Some(a) = queue.pop_front() {
            if self.ends[a] {
                let mut walk = vec![a];
                let mut x = a;
                while let Some(&p) = back.get(&x) {
                    walk.push(p);
                    x = p;
                }
                walk.reverse();
                return walk;
            }
            for &b in &self.next[a] {
                if live[b] && seen.insert(b) {
                    back.insert(b, a);
                    queue.push_back(b);
                }
            }
        }
        unreachable!("live nodes are co-reachable")
    }
}

/// What the repeated-edge lemma yields for a path in which `e` recurs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepeatedEdge {
    Witness {
        path: ClosedPath,
    },
    /// `CP(s(e)) = {c}` and the path is `γ c^∞`.
    Forced {
        gamma: Vec<EdgeId>,
        cycle: ClosedPath,
    },
}

/// Window scanned for the first two occurrences of the edge.
const OCCURRENCE_WINDOW: usize = 100_000;

/// A closed path at `s(e)` read off between two occurrences of `e`; when
/// `CP(s(e))` is a singleton on a finite ultragraph, the forced form.
pub fn repeated_edge(g: &Ultragraph, x: &InfinitePath, e: &EdgeId) -> Result<RepeatedEdge> {
    if !matches!(x.occurrences(e), Occurrence::Infinite(_)) {
        return Err(Error::Precondition(format!("{e} does not occur infinitely often")));
    }
    let window = x.prefix(OCCURRENCE_WINDOW);
    let mut hits = window.iter().enumerate().filter(|(_, f)| *f == e).map(|(i, _)| i);
    let (Some(i1), Some(i2)) = (hits.next(), hits.next()) else {
        return Err(Error::Precondition(format!("{e} does not recur within {OCCURRENCE_WINDOW} entries")));
    };
    let v = g.source(e)?;
    let stop = (i1 + 1..i2).find(|&j| g.source(&window[j]).is_ok_and(|s| s == v)).unwrap_or(i2);
    let path = ClosedPath::new(g, v.clone(), window[i1..stop].to_vec())?;
    if g.is_finite() {
        if let CpDecision::No { single: Some(c) } = cp_at_least_two(g, &v, 0, 0) {
            let tail = InfinitePath::periodic(Vec::new(), c.edges.clone());
            if crate::metric::same_point(
                &crate::path::ShiftPoint::Infinite(x.shift_by(i1)),
                &crate::path::ShiftPoint::Infinite(tail),
            ) != Some(true)
            {
                return Err(Error::Precondition(format!("path is not of the form γ({c})^∞")));
            }
            return Ok(RepeatedEdge::Forced { gamma: window[..i1].to_vec(), cycle: c });
        }
    }
    Ok(RepeatedEdge::Witness { path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::IndexSet;
    use crate::ultragraph::fixtures::{example, loops};

    fn w() -> VertexId {
        VertexId::new("w", 0)
    }

    #[test]
    fn two_loops() {
        let g = loops(&[("a", IndexSet::singleton(0)), ("b", IndexSet::singleton(0))]);
        let s = closed_paths(&g, &w(), 1, 10, 2);
        assert_eq!(s.paths.len(), 2);
        assert!(matches!(cp_at_least_two(&g, &w(), 5, 5), CpDecision::Yes { .. }));
    }

    #[test]
    fn single_loop_is_one() {
        let g = loops(&[("a", IndexSet::singleton(0))]);
        let CpDecision::No { single: Some(c) } = cp_at_least_two(&g, &w(), 5, 5) else { panic!() };
        assert_eq!(c.edges, vec![EdgeId::new("a", 0)]);
        let x = InfinitePath::periodic(vec![], vec![EdgeId::new("a", 0)]);
        let r = repeated_edge(&g, &x, &EdgeId::new("a", 0)).unwrap();
        assert!(matches!(r, RepeatedEdge::Forced { ref gamma, .. } if gamma.is_empty()));
    }

    #[test]
    fn example_has_none_within_bounds() {
        let g = example();
        for v in [VertexId::new("u", 0), VertexId::new("u", 3), VertexId::new("v", 0), VertexId::new("v", 5)] {
            let s = closed_paths(&g, &v, 20, 50, 5);
            assert!(s.paths.is_empty());
            assert!(s.exhausted);
            assert!(!s.complete);
        }
    }
}
