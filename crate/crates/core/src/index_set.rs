//! Eventually periodic subsets of the naturals.
//!
//! An [`IndexSet`] is described by a threshold `T`, the explicit members
//! below `T`, and a period `p` with a residue set: a number `n >= T` is a
//! member iff `n mod p` is one of the residues. Every set built from
//! singletons and arithmetic progressions with finite unions,
//! intersections and differences has such a description, and the
//! canonical form (minimal period, then minimal threshold) makes set
//! equality a structural comparison.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Cardinality class of a set of naturals or vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl Cardinality {
    pub fn is_infinite(self) -> bool {
        matches!(self, Cardinality::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet {
    threshold: u64,
    explicit: BTreeSet<u64>,
    period: u64,
    residues: BTreeSet<u64>,
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl IndexSet {
    /// Builds a set from raw parts and canonicalizes it. Explicit entries at
    /// or above the threshold and residues at or above the period are
    /// ignored.
    pub fn from_parts(
        threshold: u64,
        explicit: impl IntoIterator<Item = u64>,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Self {
        let period = period.max(1);
        let mut set = IndexSet {
            threshold,
            explicit: explicit.into_iter().filter(|&n| n < threshold).collect(),
            period,
            residues: residues.into_iter().filter(|&r| r < period).collect(),
        };
        set.canonicalize();
        set
    }

    pub fn empty() -> Self {
        IndexSet::from_parts(0, [], 1, [])
    }

    /// All naturals.
    pub fn naturals() -> Self {
        IndexSet::from_parts(0, [], 1, [0])
    }

    pub fn singleton(n: u64) -> Self {
        IndexSet::from_parts(n + 1, [n], 1, [])
    }

    pub fn finite(items: impl IntoIterator<Item = u64>) -> Self {
        let items: BTreeSet<u64> = items.into_iter().collect();
        let threshold = items.iter().next_back().map_or(0, |&m| m + 1);
        IndexSet::from_parts(threshold, items, 1, [])
    }

    /// `{n : n >= start}`.
    pub fn at_least(start: u64) -> Self {
        IndexSet::from_parts(start, [], 1, [0])
    }

    /// `{n : n < end}`.
    pub fn below(end: u64) -> Self {
        IndexSet::from_parts(end, 0..end, 1, [])
    }

    /// `{step*j + offset : j >= from}`; a zero step gives the singleton `{offset}`.
    pub fn progression(step: u64, offset: u64, from: u64) -> Self {
        if step == 0 {
            return IndexSet::singleton(offset);
        }
        let start = step * from + offset;
        IndexSet::from_parts(start, [], step, [start % step])
    }

    /// `{n : n mod modulus == residue}`.
    pub fn residue_class(modulus: u64, residue: u64) -> Self {
        let modulus = modulus.max(1);
        IndexSet::from_parts(0, [], modulus, [residue % modulus])
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn explicit(&self) -> &BTreeSet<u64> {
        &self.explicit
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.explicit.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.is_finite() {
            Cardinality::Finite(self.explicit.len() as u64)
        } else {
            Cardinality::Infinite
        }
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Largest member of a finite set.
    pub fn max(&self) -> Option<u64> {
        if self.is_finite() {
            self.explicit.iter().next_back().copied()
        } else {
            None
        }
    }

    /// Members in increasing order; infinite for infinite sets.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let head = self.explicit.iter().copied();
        let tail = (!self.residues.is_empty())
            .then(|| (self.threshold..).filter(move |n| self.residues.contains(&(n % self.period))))
            .into_iter()
            .flatten();
        head.chain(tail)
    }

    /// Members strictly below `bound`.
    pub fn iter_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        self.iter().take_while(move |&n| n < bound)
    }

    fn canonicalize(&mut self) {
        // Minimal period: the smallest divisor d of p whose shift maps the
        // residue set onto itself.
        let p = self.period;
        let mut best = p;
        for d in 1..p {
            if !p.is_multiple_of(d) {
                continue;
            }
            let invariant = self.residues.iter().all(|&r| self.residues.contains(&((r + d) % p)));
            if invariant {
                best = d;
                break;
            }
        }
        if best != p {
            self.residues = self.residues.iter().map(|&r| r % best).collect();
            self.period = best;
        }
        // Minimal threshold.
        while self.threshold > 0 {
            let n = self.threshold - 1;
            let in_tail = self.residues.contains(&(n % self.period));
            if self.explicit.contains(&n) == in_tail {
                self.explicit.remove(&n);
                self.threshold = n;
            } else {
                break;
            }
        }
    }

    fn combine(&self, other: &IndexSet, op: impl Fn(bool, bool) -> bool) -> IndexSet {
        let period = lcm(self.period, other.period);
        let threshold = self.threshold.max(other.threshold);
        let explicit = (0..threshold).filter(|&n| op(self.contains(n), other.contains(n)));
        let residues = (0..period).filter(|&r| {
            // Any representative at or above the threshold decides the class.
            let n = threshold + ((r + period - threshold % period) % period);
            op(self.contains(n), other.contains(n))
        });
        IndexSet::from_parts(threshold, explicit.collect::<Vec<_>>(), period, residues.collect::<Vec<_>>())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &IndexSet) -> IndexSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet::naturals().difference(self)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// `{k : a*k + b ∈ self}`.
    pub fn preimage_affine(&self, a: u64, b: u64) -> IndexSet {
        if a == 0 {
            return if self.contains(b) { IndexSet::naturals() } else { IndexSet::empty() };
        }
        // For k >= kt the value a*k+b is past the threshold, and membership
        // depends only on k mod p.
        let kt = if self.threshold <= b { 0 } else { (self.threshold - b).div_ceil(a) };
        let p = self.period;
        let explicit: Vec<u64> = (0..kt).filter(|&k| self.contains(a * k + b)).collect();
        let residues: Vec<u64> = (0..p).filter(|&r| self.residues.contains(&(((a % p) * r % p + b % p) % p))).collect();
        IndexSet::from_parts(kt, explicit, p, residues)
    }

    /// `{a*k + b : k ∈ self}`.
    pub fn image_affine(&self, a: u64, b: u64) -> IndexSet {
        if a == 0 {
            return if self.is_empty() { IndexSet::empty() } else { IndexSet::singleton(b) };
        }
        let threshold = a * self.threshold + b;
        let explicit: Vec<u64> = self.explicit.iter().map(|&k| a * k + b).collect();
        let period = a * self.period;
        let residues: Vec<u64> = self.residues.iter().map(|&r| (a * r + b) % period).collect();
        // Values below the new threshold that are not images of explicit
        // members are absent; values above it must also be ≡ b mod a, which
        // the residues (all ≡ b mod a) already enforce.
        IndexSet::from_parts(threshold, explicit, period, residues)
    }

    /// Canonical serialization `T;explicit;p;residues`.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical serialization (any valid parts are accepted and
    /// canonicalized).
    pub fn parse(text: &str) -> Option<IndexSet> {
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != 4 {
            return None;
        }
        let list = |s: &str| -> Option<Vec<u64>> {
            if s.trim().is_empty() {
                return Some(Vec::new());
            }
            s.split(',').map(|x| x.trim().parse().ok()).collect()
        };
        let threshold = parts[0].trim().parse().ok()?;
        let explicit = list(parts[1])?;
        let period: u64 = parts[2].trim().parse().ok()?;
        if period == 0 {
            return None;
        }
        let residues = list(parts[3])?;
        Some(IndexSet::from_parts(threshold, explicit, period, residues))
    }
}

fn join(items: &BTreeSet<u64>) -> String {
    items.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{};{}", self.threshold, join(&self.explicit), self.period, join(&self.residues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(set: &IndexSet, n: u64) -> Vec<u64> {
        (0..=n).filter(|&k| set.contains(k)).collect()
    }

    #[test]
    fn progression_intersection_by_brute_force() {
        let evens = IndexSet::progression(2, 2, 0);
        let threes = IndexSet::progression(3, 0, 0);
        let both = evens.intersect(&threes);
        let expected: Vec<u64> = (0..=100).filter(|k| k % 2 == 0 && *k >= 2 && k % 3 == 0).collect();
        assert_eq!(brute(&both, 100), expected);
        assert_eq!(both, IndexSet::progression(6, 6, 0));
    }

    #[test]
    fn union_with_singleton() {
        let evens = IndexSet::progression(2, 2, 0);
        let u = IndexSet::singleton(1).union(&evens);
        for k in 0..=100 {
            assert_eq!(u.contains(k), k == 1 || (k >= 2 && k % 2 == 0), "{k}");
        }
        assert_eq!(u.serialize(), "2;1;2;0");
    }

    #[test]
    fn canonical_form_is_minimal() {
        let a = IndexSet::from_parts(10, [0, 2, 4, 6, 8], 4, [0, 2]);
        assert_eq!(a, IndexSet::residue_class(2, 0));
        assert_eq!(a.serialize(), "0;;2;0");
        assert_eq!(IndexSet::empty().serialize(), "0;;1;");
        assert_eq!(IndexSet::singleton(5).serialize(), "6;5;1;");
    }

    #[test]
    fn cardinality_and_subset() {
        assert_eq!(IndexSet::finite([1, 5]).cardinality(), Cardinality::Finite(2));
        assert!(IndexSet::progression(6, 6, 0).is_subset(&IndexSet::progression(2, 2, 0)));
        assert!(!IndexSet::progression(2, 2, 0).is_subset(&IndexSet::progression(6, 6, 0)));
    }

    #[test]
    fn affine_pullback_and_image() {
        let evens = IndexSet::progression(2, 2, 0);
        // {k : k + 1 ∈ evens≥2} = odd k ≥ 1
        let pre = evens.preimage_affine(1, 1);
        for k in 0..100 {
            assert_eq!(pre.contains(k), evens.contains(k + 1));
        }
        let img = IndexSet::at_least(1).image_affine(2, 1);
        for n in 0..100 {
            assert_eq!(img.contains(n), n >= 3 && n % 2 == 1);
        }
        assert_eq!(IndexSet::at_least(4).preimage_affine(0, 7), IndexSet::naturals());
    }

    #[test]
    fn parse_roundtrip() {
        let s = IndexSet::from_parts(7, [1, 3], 3, [0, 2]);
        assert_eq!(IndexSet::parse(&s.serialize()), Some(s));
        assert_eq!(IndexSet::parse("1;2"), None);
    }

    fn arb_set() -> impl Strategy<Value = IndexSet> {
        (0u64..12, proptest::collection::vec(0u64..12, 0..6), 1u64..7, proptest::collection::vec(0u64..7, 0..4))
            .prop_map(|(t, e, p, r)| IndexSet::from_parts(t, e, p, r))
    }

    proptest! {
        #[test]
        fn canonical_forms_agree_with_membership(a in arb_set(), b in arb_set()) {
            let bound = 4 * a.period() * b.period() + a.threshold() + b.threshold() + 8;
            let same = (0..bound).all(|n| a.contains(n) == b.contains(n));
            prop_assert_eq!(same, a == b);
        }

        #[test]
        fn boolean_laws(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.intersect(&b.union(&c)), a.intersect(&b).union(&a.intersect(&c)));
            for n in 0..60 {
                prop_assert_eq!(a.union(&b).contains(n), a.contains(n) || b.contains(n));
                prop_assert_eq!(a.intersect(&b).contains(n), a.contains(n) && b.contains(n));
            }
        }

        #[test]
        fn preimage_matches_pointwise(a in arb_set(), m in 0u64..5, c in 0u64..9) {
            let pre = a.preimage_affine(m, c);
            for k in 0..80 {
                prop_assert_eq!(pre.contains(k), a.contains(m * k + c));
            }
        }

        #[test]
        fn image_matches_pointwise(a in arb_set(), m in 1u64..5, c in 0u64..9) {
            let img = a.image_affine(m, c);
            for n in 0..120u64 {
                let expected = n >= c && (n - c) % m == 0 && a.contains((n - c) / m);
                prop_assert_eq!(img.contains(n), expected);
            }
        }

        #[test]
        fn infinite_iff_counts_grow(a in arb_set()) {
            let small = (0..100).filter(|&n| a.contains(n)).count();
            let large = (0..1000).filter(|&n| a.contains(n)).count();
            prop_assert_eq!(a.cardinality().is_infinite(), large > small);
        }
    }
}
