//! Membership in the vertex algebra generated by singletons and ranges.
//!
//! Every element is `I ∪ F` with `F` finite and `I` in the union/intersection
//! closure of the infinite generators: constant infinite ranges, and for a
//! clause whose body moves with the index, its constant part (the
//! intersection of two instances whose moving parts are disjoint).

use std::collections::HashSet;

use crate::ultragraph::Ultragraph;
use crate::vertex_set::VertexSet;

/// Cap on the size of the closure.
pub const CLOSURE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct Lattice {
    /// Infinite members of the closure.
    cores: Vec<VertexSet>,
    universe: VertexSet,
    /// The cap was hit before the closure stabilized.
    pub truncated: bool,
}

impl Lattice {
    pub fn new(g: &Ultragraph) -> Self {
        let mut gens: Vec<VertexSet> = Vec::new();
        for ef in g.edge_families() {
            for clause in &ef.ranges {
                let ks = ef.clause_indices(clause);
                if ks.is_empty() || !clause.is_infinite() {
                    continue;
                }
                if !clause.depends_on_index() {
                    gens.push(clause.eval(crate::IndexSet::min(&ks).unwrap()));
                } else if ks.is_finite() {
                    gens.extend(ks.iter().map(|k| clause.eval(k)));
                } else {
                    gens.push(clause.constant_part());
                }
            }
        }
        let mut seen: HashSet<VertexSet> = HashSet::new();
        let mut cores: Vec<VertexSet> = Vec::new();
        for s in gens {
            if seen.insert(s.clone()) {
                cores.push(s);
            }
        }
        let mut truncated = false;
        let mut i = 0;
        'grow: while i < cores.len() {
            for j in 0..i {
                for t in [cores[i].union(&cores[j]), cores[i].intersect(&cores[j])] {
                    if t.cardinality().is_infinite() && seen.insert(t.clone()) {
                        if cores.len() >= CLOSURE_CAP {
                            truncated = true;
                            break 'grow;
                        }
                        cores.push(t);
                    }
                }
            }
            i += 1;
        }
        cores.sort_by_key(|s| s.serialize());
        Lattice { cores, universe: g.all_vertices(), truncated }
    }

    pub fn cores(&self) -> &[VertexSet] {
        &self.cores
    }

    /// Whether `s` belongs to the algebra.
    pub fn contains(&self, s: &VertexSet) -> bool {
        if s.is_empty() || !s.is_subset(&self.universe) {
            return false;
        }
        if !s.cardinality().is_infinite() {
            return true;
        }
        self.cores.iter().any(|i| i.is_subset(s) && !s.difference(i).cardinality().is_infinite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::IndexSet;
    use crate::ultragraph::fixtures::{example, loops};
    use crate::vertex_set::VertexId;

    #[test]
    fn example_algebra() {
        let g = example();
        let lat = Lattice::new(&g);
        let evens = VertexSet::from_family("u", IndexSet::progression(2, 2, 0));
        assert_eq!(lat.cores(), std::slice::from_ref(&evens));
        assert!(lat.contains(&evens));
        assert!(lat.contains(&evens.union(&VertexSet::singleton(&VertexId::new("v", 7)))));
        assert!(lat.contains(&VertexSet::from_family("u", IndexSet::finite([1, 3]))));
        assert!(!lat.contains(&VertexSet::from_family("u", IndexSet::progression(4, 4, 0))));
        assert!(!lat.contains(&VertexSet::from_family("u", IndexSet::naturals())));
        assert!(!lat.contains(&VertexSet::empty()));
        assert!(!lat.contains(&VertexSet::singleton(&VertexId::new("z", 0))));
    }

    #[test]
    fn one_vertex() {
        let g = loops(&[("g", IndexSet::naturals())]);
        let lat = Lattice::new(&g);
        assert!(lat.cores().is_empty());
        assert!(lat.contains(&VertexSet::singleton(&VertexId::new("w", 0))));
    }
}
