//! Minimal infinite emitters.
//!
//! A minimal infinite emitter is either a single vertex emitting infinitely
//! many edges or a finite intersection of ranges. The search here starts from
//! a set `R` and refines it by intersecting with ranges, one at a time, up to
//! a depth bound.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::ultragraph::{EdgeId, Ultragraph};
use crate::vertex_set::{VertexId, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitterOptions {
    /// Maximum number of ranges intersected into the starting set.
    pub depth: usize,
    /// Instances sampled from a range clause whose body moves with the index.
    pub instances: u64,
}

impl Default for EmitterOptions {
    fn default() -> Self {
        EmitterOptions { depth: 3, instances: 6 }
    }
}

/// How a minimal emitter is built from the generators of the vertex algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitterTrace {
    Singleton(VertexId),
    /// The emitter equals `⋂ r(e)` over these edges.
    Intersection(Vec<EdgeId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalEmitter {
    pub set: VertexSet,
    pub trace: EmitterTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmitterSearch {
    pub emitters: Vec<MinimalEmitter>,
    /// A candidate still had proper refinements when the depth ran out.
    pub depth_exhausted: bool,
    /// Some range clause has infinitely many distinct infinite instances,
    /// of which only a sample was used.
    pub catalog_truncated: bool,
}

impl EmitterSearch {
    pub fn complete(&self) -> bool {
        !self.depth_exhausted && !self.catalog_truncated
    }
}

/// An infinite range (or an intersection of sampled instances of a moving
/// clause) together with the edges whose ranges produce it.
#[derive(Debug, Clone)]
struct CatalogEntry {
    set: VertexSet,
    edges: Vec<EdgeId>,
}

struct Catalog {
    entries: Vec<CatalogEntry>,
    truncated: bool,
}

fn catalog(g: &Ultragraph, opts: EmitterOptions) -> Catalog {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut seen = HashSet::new();
    let mut truncated = false;
    let mut push = |set: VertexSet, edges: Vec<EdgeId>, entries: &mut Vec<CatalogEntry>| {
        if seen.insert(set.clone()) {
            entries.push(CatalogEntry { set, edges });
        }
    };
    for ef in g.edge_families() {
        for clause in &ef.ranges {
            // finite ranges only refine by finite sets, which are covered by
            // the singleton check
            if !clause.is_infinite() {
                continue;
            }
            let ks = ef.clause_indices(clause);
            if !clause.depends_on_index() {
                if let Some(k) = crate::IndexSet::min(&ks) {
                    push(clause.eval(k), vec![EdgeId::new(ef.name.clone(), k)], &mut entries);
                }
                continue;
            }
            let sample: Vec<u64> = ks.iter().take(opts.instances as usize).collect();
            if !ks.is_finite() {
                truncated = true;
            }
            let mut common: Option<VertexSet> = None;
            for &k in &sample {
                let r = clause.eval(k);
                common = Some(match common {
                    None => r.clone(),
                    Some(c) => c.intersect(&r),
                });
                push(r, vec![EdgeId::new(ef.name.clone(), k)], &mut entries);
            }
            if let Some(c) = common {
                if sample.len() > 1 {
                    let edges = sample.iter().map(|&k| EdgeId::new(ef.name.clone(), k)).collect();
                    push(c, edges, &mut entries);
                }
            }
        }
    }
    Catalog { entries, truncated }
}

/// Infinite-emitter vertices lying in `s`.
fn emitter_vertices_in(g: &Ultragraph, s: &VertexSet) -> Vec<VertexId> {
    g.infinite_emitter_vertices().into_iter().filter(|v| s.contains(v)).collect()
}

/// Proper subsets of `s` of the form `s ∩ r` that are still infinite
/// emitters.
fn refinements(g: &Ultragraph, cat: &Catalog, s: &VertexSet) -> Vec<(VertexSet, Vec<EdgeId>)> {
    let mut out: Vec<(VertexSet, Vec<EdgeId>)> = Vec::new();
    for entry in &cat.entries {
        let t = s.intersect(&entry.set);
        if t != *s && g.is_infinite_emitter(&t) && !out.iter().any(|(u, _)| *u == t) {
            out.push((t, entry.edges.clone()));
        }
    }
    out
}

/// Whether `s` has a proper infinite-emitter subset that is a generator
/// intersection. Only the single-step refinements need checking: any smaller
/// emitter contains a generator term that is itself an emitter, and some range
/// in that term already cuts `s` down properly.
fn has_smaller_emitter(g: &Ultragraph, cat: &Catalog, s: &VertexSet) -> bool {
    let vertices = emitter_vertices_in(g, s);
    let is_single = vertices.len() == 1 && *s == VertexSet::singleton(&vertices[0]);
    (!vertices.is_empty() && !is_single) || !refinements(g, cat, s).is_empty()
}

fn trace_for(cat: &Catalog, set: &VertexSet) -> Vec<EdgeId> {
    let mut edges: BTreeSet<EdgeId> = BTreeSet::new();
    for entry in &cat.entries {
        if set.is_subset(&entry.set) {
            edges.extend(entry.edges.iter().cloned());
        }
    }
    edges.into_iter().collect()
}

/// Minimal infinite emitters contained in `r`.
pub fn minimal_infinite_emitters(g: &Ultragraph, r: &VertexSet, opts: EmitterOptions) -> EmitterSearch {
    let cat = catalog(g, opts);
    let mut found: Vec<MinimalEmitter> = Vec::new();
    let mut depth_exhausted = false;

    for v in emitter_vertices_in(g, r) {
        found.push(MinimalEmitter { set: VertexSet::singleton(&v), trace: EmitterTrace::Singleton(v) });
    }

    let mut visited: HashSet<VertexSet> = HashSet::new();
    let mut frontier: Vec<VertexSet> = Vec::new();
    if g.is_infinite_emitter(r) {
        frontier.push(r.clone());
        visited.insert(r.clone());
    }
    for level in 0..=opts.depth {
        let mut next = Vec::new();
        for s in frontier {
            let holds_vertex = !emitter_vertices_in(g, &s).is_empty();
            let refs = refinements(g, &cat, &s);
            if refs.is_empty() {
                // a set holding an emitting vertex is beaten by that singleton
                if !holds_vertex && !found.iter().any(|m| m.set == s) {
                    let trace = EmitterTrace::Intersection(trace_for(&cat, &s));
                    found.push(MinimalEmitter { set: s, trace });
                }
                continue;
            }
            if level == opts.depth {
                depth_exhausted = true;
                continue;
            }
            for (t, _) in refs {
                if visited.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    found.sort_by_key(|m| m.set.serialize());
    EmitterSearch { emitters: found, depth_exhausted, catalog_truncated: cat.truncated }
}

/// `Some(true)` when `a` is a minimal infinite emitter, `Some(false)` when a
/// proper emitter subset is found, `None` when the range catalog was
/// truncated and nothing was found.
pub fn is_minimal_emitter(g: &Ultragraph, a: &VertexSet, opts: EmitterOptions) -> Option<bool> {
    if !g.is_infinite_emitter(a) {
        return Some(false);
    }
    let cat = catalog(g, opts);
    if has_smaller_emitter(g, &cat, a) {
        Some(false)
    } else if cat.truncated {
        None
    } else {
        Some(true)
    }
}
