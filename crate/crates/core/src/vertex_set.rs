//! Vertex sets of a family-indexed ultragraph: one [`IndexSet`] per vertex
//! family, with empty families omitted so that equal sets have equal
//! representations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::index_set::{Cardinality, IndexSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub family: String,
    pub index: u64,
}

impl VertexId {
    pub fn new(family: impl Into<String>, index: u64) -> Self {
        VertexId { family: family.into(), index }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family, self.index)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexSet {
    atoms: BTreeMap<String, IndexSet>,
}

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet::default()
    }

    pub fn singleton(v: &VertexId) -> Self {
        VertexSet::from_family(&v.family, IndexSet::singleton(v.index))
    }

    pub fn from_family(family: &str, set: IndexSet) -> Self {
        let mut atoms = BTreeMap::new();
        if !set.is_empty() {
            atoms.insert(family.to_string(), set);
        }
        VertexSet { atoms }
    }

    pub fn from_vertices<'a>(vertices: impl IntoIterator<Item = &'a VertexId>) -> Self {
        vertices.into_iter().fold(VertexSet::empty(), |acc, v| acc.union(&VertexSet::singleton(v)))
    }

    pub fn atoms(&self) -> &BTreeMap<String, IndexSet> {
        &self.atoms
    }

    /// The index set of `family` (empty if the family is absent).
    pub fn family(&self, family: &str) -> IndexSet {
        self.atoms.get(family).cloned().unwrap_or_else(IndexSet::empty)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.atoms.get(&v.family).is_some_and(|s| s.contains(v.index))
    }

    fn merge(&self, other: &VertexSet, op: impl Fn(&IndexSet, &IndexSet) -> IndexSet) -> VertexSet {
        let mut atoms = BTreeMap::new();
        let families = self.atoms.keys().chain(other.atoms.keys());
        for family in families {
            if atoms.contains_key(family) {
                continue;
            }
            let set = op(&self.family(family), &other.family(family));
            if !set.is_empty() {
                atoms.insert(family.clone(), set);
            }
        }
        VertexSet { atoms }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.merge(other, IndexSet::union)
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        self.merge(other, IndexSet::intersect)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.merge(other, IndexSet::difference)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn cardinality(&self) -> Cardinality {
        let mut total = 0;
        for set in self.atoms.values() {
            match set.cardinality() {
                Cardinality::Infinite => return Cardinality::Infinite,
                Cardinality::Finite(n) => total += n,
            }
        }
        Cardinality::Finite(total)
    }

    /// Members with index below `bound`, ordered by family then index.
    pub fn vertices_below(&self, bound: u64) -> Vec<VertexId> {
        self.atoms
            .iter()
            .flat_map(|(family, set)| set.iter_below(bound).map(move |i| VertexId::new(family.clone(), i)))
            .collect()
    }

    /// Canonical, byte-stable serialization: `family:T;explicit;p;residues`
    /// per family, sorted by family name and separated by a single space.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Option<VertexSet> {
        let mut out = VertexSet::empty();
        for part in text.split_whitespace() {
            let (family, set) = part.split_once(':')?;
            if family.is_empty() {
                return None;
            }
            out = out.union(&VertexSet::from_family(family, IndexSet::parse(set)?));
        }
        Some(out)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (family, set) in &self.atoms {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{family}:{set}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> VertexSet {
        VertexSet::from_family("u", IndexSet::progression(2, 2, 0))
    }

    #[test]
    fn union_identity_and_disjoint_families() {
        assert_eq!(evens().union(&VertexSet::empty()), evens());
        let two = evens().union(&VertexSet::from_family("v", IndexSet::finite([1, 2])));
        assert_eq!(two.atoms().len(), 2);
        assert_eq!(two.serialize(), "u:1;;2;0 v:3;1,2;1;");
    }

    #[test]
    fn intersection_cases() {
        let threes = VertexSet::from_family("u", IndexSet::progression(3, 0, 0));
        assert_eq!(evens().intersect(&threes), VertexSet::from_family("u", IndexSet::progression(6, 6, 0)));
        assert_eq!(evens().intersect(&evens()), evens());
        let a = VertexSet::singleton(&VertexId::new("u", 1));
        let b = VertexSet::singleton(&VertexId::new("v", 1));
        assert!(a.intersect(&b).is_empty());
    }

    #[test]
    fn membership_subset_cardinality() {
        assert!(evens().contains(&VertexId::new("u", 4)));
        assert!(!evens().contains(&VertexId::new("u", 0)));
        let sixes = VertexSet::from_family("u", IndexSet::progression(6, 6, 0));
        assert!(sixes.is_subset(&evens()));
        let fin = VertexSet::from_family("u", IndexSet::finite([1, 5]));
        assert_eq!(fin.cardinality(), Cardinality::Finite(2));
        assert_eq!(evens().cardinality(), Cardinality::Infinite);
    }

    #[test]
    fn serialization_parses_back() {
        let s = evens().union(&VertexSet::from_family("v", IndexSet::finite([3])));
        assert_eq!(VertexSet::parse(&s.serialize()), Some(s));
        assert_eq!(VertexSet::parse(""), Some(VertexSet::empty()));
    }
}
