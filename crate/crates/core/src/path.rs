//! Ultrapaths, infinite paths, and points of the shift space.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::bits::{Bitstream, PeriodicBits};
use crate::emitters::{is_minimal_emitter, EmitterOptions};
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::ultragraph::{EdgeId, EdgeSet, Ultragraph};
use crate::vertex_set::{VertexId, VertexSet};

/// A pair `(α, A)`: a finite edge path and a terminal vertex set. An empty
/// edge list is the length-zero ultrapath `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Ultrapath {
    pub edges: Vec<EdgeId>,
    pub terminal: VertexSet,
}

impl Ultrapath {
    pub fn new(edges: Vec<EdgeId>, terminal: VertexSet) -> Self {
        Ultrapath { edges, terminal }
    }

    pub fn vertex_set(a: VertexSet) -> Self {
        Ultrapath { edges: Vec::new(), terminal: a }
    }

    /// The finite path `α` seen as `(α, r(α))`.
    pub fn from_edges(g: &Ultragraph, edges: Vec<EdgeId>) -> Result<Self> {
        let last = edges.last().ok_or_else(|| Error::InvalidPath("empty edge list".into()))?;
        let terminal = g.range(last)?;
        Ok(Ultrapath { edges, terminal })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `s(x)`: the source of the first edge, or the set itself at length 0.
    pub fn source_set(&self, g: &Ultragraph) -> Result<VertexSet> {
        match self.edges.first() {
            Some(e) => Ok(VertexSet::singleton(&g.source(e)?)),
            None => Ok(self.terminal.clone()),
        }
    }

    /// Chain compatibility, nonempty terminal, terminal inside the last range.
    pub fn validate(&self, g: &Ultragraph) -> Result<()> {
        if self.terminal.is_empty() {
            return Err(Error::InvalidPath("terminal set is empty".into()));
        }
        if !self.terminal.is_subset(&g.all_vertices()) {
            return Err(Error::InvalidPath("terminal set mentions undeclared vertices".into()));
        }
        g.check_chain(&self.edges)?;
        if let Some(last) = self.edges.last() {
            if !self.terminal.is_subset(&g.range(last)?) {
                return Err(Error::InvalidPath(format!("terminal set is not inside r({last})")));
            }
        }
        Ok(())
    }

    /// `x · y`, or `None` when the product is undefined.
    pub fn concat(&self, y: &Ultrapath, g: &Ultragraph) -> Result<Option<Ultrapath>> {
        let out = match (self.is_empty(), y.is_empty()) {
            (true, true) => {
                let meet = self.terminal.intersect(&y.terminal);
                (!meet.is_empty()).then(|| Ultrapath::vertex_set(meet))
            }
            (true, false) => self.terminal.contains(&g.source(&y.edges[0])?).then(|| y.clone()),
            (false, true) => {
                let meet = self.terminal.intersect(&y.terminal);
                (!meet.is_empty()).then(|| Ultrapath::new(self.edges.clone(), meet))
            }
            (false, false) => self.terminal.contains(&g.source(&y.edges[0])?).then(|| {
                let mut edges = self.edges.clone();
                edges.extend(y.edges.iter().cloned());
                Ultrapath::new(edges, y.terminal.clone())
            }),
        };
        Ok(out)
    }

    /// Canonical text: edges joined by `.`, then `/`, then the terminal set.
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Ultrapath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(EdgeId::to_string).collect();
        write!(f, "{}/{}", edges.join("."), self.terminal)
    }
}

/// An element of `CP(v)`: starts at `v`, ends with `v` in the last range,
/// and never passes through `v` as an intermediate source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClosedPath {
    pub vertex: VertexId,
    pub edges: Vec<EdgeId>,
}

impl ClosedPath {
    pub fn new(g: &Ultragraph, vertex: VertexId, edges: Vec<EdgeId>) -> Result<Self> {
        let c = ClosedPath { vertex, edges };
        c.validate(g)?;
        Ok(c)
    }

    pub fn validate(&self, g: &Ultragraph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPath(m));
        let Some(last) = self.edges.last() else {
            return bad("closed path has no edges".into());
        };
        g.check_chain(&self.edges)?;
        if g.source(&self.edges[0])? != self.vertex {
            return bad(format!("closed path does not start at {}", self.vertex));
        }
        if !g.range(last)?.contains(&self.vertex) {
            return bad(format!("{} is not in the range of the last edge", self.vertex));
        }
        for e in &self.edges[1..] {
            if g.source(e)? == self.vertex {
                return bad(format!("closed path passes through {} at {e}", self.vertex));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClosedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(EdgeId::to_string).collect();
        f.write_str(&edges.join("."))
    }
}

/// An element of `{c₁, c₂}^ℕ` addressed by a bitstream (0 selects `c₁`),
/// possibly shifted: `consumed` bits have been used up and `prefix` holds
/// the unread rest of the last consumed block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryCoded {
    pub prefix: Vec<EdgeId>,
    pub vertex: VertexId,
    pub c1: Vec<EdgeId>,
    pub c2: Vec<EdgeId>,
    pub bits: Bitstream,
    pub consumed: u64,
}

impl BinaryCoded {
    pub fn new(vertex: VertexId, c1: Vec<EdgeId>, c2: Vec<EdgeId>, bits: Bitstream) -> Self {
        BinaryCoded { prefix: Vec::new(), vertex, c1, c2, bits, consumed: 0 }
    }

    fn block(&self, bit: bool) -> &[EdgeId] {
        if bit {
            &self.c2
        } else {
            &self.c1
        }
    }

    /// The unread bits, as an eventually periodic stream when possible.
    pub fn remaining_periodic(&self) -> Option<PeriodicBits> {
        let p = self.bits.eventually_periodic()?;
        let start = p.threshold().max(self.consumed);
        let prefix = (self.consumed + 1..=start).map(|i| p.bit(i)).collect();
        let cycle = (start + 1..=start + p.period()).map(|i| p.bit(i)).collect();
        Some(PeriodicBits { prefix, cycle }.normalized())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InfinitePath {
    /// `prefix` followed by `cycle` repeated forever.
    EventuallyPeriodic {
        prefix: Vec<EdgeId>,
        cycle: Vec<EdgeId>,
    },
    /// `prefix` followed by `family[start] family[start+1] …`.
    FamilyTail {
        prefix: Vec<EdgeId>,
        family: String,
        start: u64,
    },
    BinaryCoded(BinaryCoded),
}

impl InfinitePath {
    pub fn periodic(prefix: Vec<EdgeId>, cycle: Vec<EdgeId>) -> Self {
        InfinitePath::EventuallyPeriodic { prefix, cycle }
    }

    pub fn tail(prefix: Vec<EdgeId>, family: impl Into<String>, start: u64) -> Self {
        InfinitePath::FamilyTail { prefix, family: family.into(), start }
    }

    pub fn validate(&self, g: &Ultragraph) -> Result<()> {
        match self {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err(Error::InvalidPath("empty cycle".into()));
                }
                let mut walk = prefix.clone();
                walk.extend(cycle.iter().cloned());
                walk.push(cycle[0].clone());
                g.check_chain(&walk)
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                let ef = g.edge_family(family)?;
                let tail = IndexSet::at_least(*start);
                if !tail.is_subset(&ef.domain) {
                    return Err(Error::InvalidPath(format!("{family}[k] is not defined for every k ≥ {start}")));
                }
                if !tail.is_subset(&g.chain_indices(family)?) {
                    return Err(Error::InvalidPath(format!(
                        "consecutive edges of {family} starting at {start} are not compatible"
                    )));
                }
                let mut walk = prefix.clone();
                walk.push(EdgeId::new(family.clone(), *start));
                g.check_chain(&walk)
            }
            InfinitePath::BinaryCoded(b) => {
                let c1 = ClosedPath::new(g, b.vertex.clone(), b.c1.clone())?;
                let c2 = ClosedPath::new(g, b.vertex.clone(), b.c2.clone())?;
                if c1 == c2 {
                    return Err(Error::InvalidPath("the two closed paths coincide".into()));
                }
                let mut walk = b.prefix.clone();
                walk.extend(b.block(b.bits.bit(b.consumed + 1)).iter().cloned());
                g.check_chain(&walk)
            }
        }
    }

    /// Realized edges `x₁ x₂ …`.
    pub fn iter(&self) -> Box<dyn Iterator<Item = EdgeId> + '_> {
        match self {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                Box::new(prefix.iter().cloned().chain(cycle.iter().cloned().cycle()))
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                Box::new(prefix.iter().cloned().chain((*start..).map(move |k| EdgeId::new(family.clone(), k))))
            }
            InfinitePath::BinaryCoded(b) => Box::new(
                b.prefix
                    .iter()
                    .cloned()
                    .chain(b.bits.iter().skip(b.consumed as usize).flat_map(move |bit| b.block(bit).iter().cloned())),
            ),
        }
    }

    /// The `i`-th edge, 1-based.
    pub fn entry_at(&self, i: usize) -> EdgeId {
        assert!(i >= 1, "positions are 1-based");
        match self {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                let i = i - 1;
                if i < prefix.len() {
                    prefix[i].clone()
                } else {
                    cycle[(i - prefix.len()) % cycle.len()].clone()
                }
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                if i <= prefix.len() {
                    prefix[i - 1].clone()
                } else {
                    EdgeId::new(family.clone(), start + (i - prefix.len() - 1) as u64)
                }
            }
            InfinitePath::BinaryCoded(_) => self.iter().nth(i - 1).unwrap(),
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<EdgeId> {
        self.iter().take(n).collect()
    }

    /// `σ`, rewritten in closed form.
    pub fn shift(&self) -> InfinitePath {
        match self {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                if prefix.is_empty() {
                    let mut cycle = cycle.clone();
                    cycle.rotate_left(1);
                    InfinitePath::EventuallyPeriodic { prefix: Vec::new(), cycle }
                } else {
                    InfinitePath::EventuallyPeriodic { prefix: prefix[1..].to_vec(), cycle: cycle.clone() }
                }
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                if prefix.is_empty() {
                    InfinitePath::FamilyTail { prefix: Vec::new(), family: family.clone(), start: start + 1 }
                } else {
                    InfinitePath::FamilyTail { prefix: prefix[1..].to_vec(), family: family.clone(), start: *start }
                }
            }
            InfinitePath::BinaryCoded(b) => {
                let mut next = b.clone();
                if next.prefix.is_empty() {
                    next.consumed += 1;
                    next.prefix = b.block(b.bits.bit(next.consumed))[1..].to_vec();
                } else {
                    next.prefix.remove(0);
                }
                InfinitePath::BinaryCoded(next)
            }
        }
    }

    pub fn shift_by(&self, n: usize) -> InfinitePath {
        (0..n).fold(self.clone(), |x, _| x.shift())
    }

    /// An equivalent presentation in canonical form. Eventually periodic
    /// binary codes become eventually periodic paths.
    pub fn normalized(&self) -> InfinitePath {
        match self {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                let (prefix, cycle) = normalize_periodic(prefix, cycle);
                InfinitePath::EventuallyPeriodic { prefix, cycle }
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                let mut prefix = prefix.clone();
                let mut start = *start;
                while start > 0 && prefix.last() == Some(&EdgeId::new(family.clone(), start - 1)) {
                    prefix.pop();
                    start -= 1;
                }
                InfinitePath::FamilyTail { prefix, family: family.clone(), start }
            }
            InfinitePath::BinaryCoded(b) if b.c1 == b.c2 => {
                InfinitePath::EventuallyPeriodic { prefix: b.prefix.clone(), cycle: b.c1.clone() }.normalized()
            }
            InfinitePath::BinaryCoded(b) => match b.remaining_periodic() {
                Some(p) => {
                    let expand =
                        |bits: &[bool]| bits.iter().flat_map(|&x| b.block(x).iter().cloned()).collect::<Vec<_>>();
                    let mut prefix = b.prefix.clone();
                    prefix.extend(expand(&p.prefix));
                    InfinitePath::EventuallyPeriodic { prefix, cycle: expand(&p.cycle) }.normalized()
                }
                None => self.clone(),
            },
        }
    }

    /// Edges occurring infinitely often.
    pub fn recurring_edges(&self) -> BTreeSet<EdgeId> {
        match self.normalized() {
            InfinitePath::EventuallyPeriodic { cycle, .. } => cycle.into_iter().collect(),
            InfinitePath::FamilyTail { .. } => BTreeSet::new(),
            // a stream that is not eventually periodic uses both blocks
            // infinitely often
            InfinitePath::BinaryCoded(b) => b.c1.iter().chain(b.c2.iter()).cloned().collect(),
        }
    }

    /// True when only finitely many distinct edges occur.
    pub fn finitely_many_edges(&self) -> bool {
        !matches!(self, InfinitePath::FamilyTail { .. })
    }

    /// Where `e` occurs: a finite list of positions, or an infinite set of
    /// positions given exactly when it is eventually periodic.
    pub fn occurrences(&self, e: &EdgeId) -> Occurrence {
        match self.normalized() {
            InfinitePath::EventuallyPeriodic { prefix, cycle } => {
                let explicit: Vec<u64> =
                    prefix.iter().enumerate().filter(|(_, x)| *x == e).map(|(i, _)| i as u64 + 1).collect();
                let residues: Vec<u64> = cycle
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| *x == e)
                    .map(|(i, _)| ((prefix.len() + i + 1) % cycle.len()) as u64)
                    .collect();
                if residues.is_empty() {
                    Occurrence::Finite(explicit)
                } else {
                    let t = prefix.len() as u64 + 1;
                    Occurrence::Infinite(Some(IndexSet::from_parts(t, explicit, cycle.len() as u64, residues)))
                }
            }
            InfinitePath::FamilyTail { prefix, family, start } => {
                let mut at: Vec<u64> =
                    prefix.iter().enumerate().filter(|(_, x)| *x == e).map(|(i, _)| i as u64 + 1).collect();
                if e.family == family && e.index >= start {
                    at.push(prefix.len() as u64 + 1 + e.index - start);
                }
                Occurrence::Finite(at)
            }
            InfinitePath::BinaryCoded(b) => {
                if b.c1.contains(e) || b.c2.contains(e) {
                    Occurrence::Infinite(None)
                } else {
                    let at = b.prefix.iter().enumerate().filter(|(_, x)| *x == e).map(|(i, _)| i as u64 + 1).collect();
                    Occurrence::Finite(at)
                }
            }
        }
    }

    pub fn source(&self, g: &Ultragraph) -> Result<VertexId> {
        g.source(&self.entry_at(1))
    }
}

fn normalize_periodic(prefix: &[EdgeId], cycle: &[EdgeId]) -> (Vec<EdgeId>, Vec<EdgeId>) {
    let n = cycle.len();
    let d = (1..=n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d])).unwrap_or(n);
    let mut cycle = cycle[..d].to_vec();
    let mut prefix = prefix.to_vec();
    while prefix.last().is_some() && prefix.last() == cycle.last() {
        prefix.pop();
        cycle.rotate_right(1);
    }
    (prefix, cycle)
}

/// Positions (1-based) at which an edge occurs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Occurrence {
    Finite(Vec<u64>),
    /// Infinitely many; the position set when it is eventually periodic.
    Infinite(Option<IndexSet>),
}

/// A point of the shift space: an infinite path, or `(α, A)` with `A` a
/// minimal infinite emitter inside `r(α)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ShiftPoint {
    Infinite(InfinitePath),
    Finite(Ultrapath),
}

impl ShiftPoint {
    pub fn validate(&self, g: &Ultragraph) -> Result<()> {
        match self {
            ShiftPoint::Infinite(x) => x.validate(g),
            ShiftPoint::Finite(p) => {
                p.validate(g)?;
                if is_minimal_emitter(g, &p.terminal, EmitterOptions::default()) == Some(false) {
                    return Err(Error::NotMinimalEmitter(p.terminal.to_string()));
                }
                Ok(())
            }
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ShiftPoint::Infinite(_))
    }

    /// `σ`: drop the first edge; `(γ₁, A)` and `(A, A)` go to `(A, A)`.
    pub fn shift(&self) -> ShiftPoint {
        match self {
            ShiftPoint::Infinite(x) => ShiftPoint::Infinite(x.shift()),
            ShiftPoint::Finite(p) => {
                let edges = if p.edges.is_empty() { Vec::new() } else { p.edges[1..].to_vec() };
                ShiftPoint::Finite(Ultrapath::new(edges, p.terminal.clone()))
            }
        }
    }

    pub fn shift_by(&self, n: usize) -> ShiftPoint {
        match self {
            ShiftPoint::Infinite(x) => ShiftPoint::Infinite(x.shift_by(n)),
            ShiftPoint::Finite(p) => {
                let k = n.min(p.edges.len());
                ShiftPoint::Finite(Ultrapath::new(p.edges[k..].to_vec(), p.terminal.clone()))
            }
        }
    }

    /// First `n` edges (fewer for a short finite point).
    pub fn prefix(&self, n: usize) -> Vec<EdgeId> {
        match self {
            ShiftPoint::Infinite(x) => x.prefix(n),
            ShiftPoint::Finite(p) => p.edges.iter().take(n).cloned().collect(),
        }
    }
}

/// The data needed to test initial segments of a fixed point: a realized
/// edge prefix (extended on demand) and, for finite points, the terminal.
pub struct Realized<'a> {
    point: &'a ShiftPoint,
    edges: Vec<EdgeId>,
    sources: Vec<VertexId>,
}

impl<'a> Realized<'a> {
    pub fn new(point: &'a ShiftPoint) -> Self {
        Realized { point, edges: Vec::new(), sources: Vec::new() }
    }

    fn ensure(&mut self, g: &Ultragraph, n: usize) {
        if self.edges.len() >= n {
            return;
        }
        let want = n.max(2 * self.edges.len()).max(8);
        self.edges = self.point.prefix(want);
        self.sources = self.edges.iter().map(|e| g.source(e).expect("validated path")).collect();
    }

    /// Whether `y` is an initial segment of the point.
    pub fn has_initial_segment(&mut self, g: &Ultragraph, y: &Ultrapath) -> bool {
        let m = y.edges.len();
        self.ensure(g, m + 1);
        match self.point {
            ShiftPoint::Finite(x) if x.edges.len() <= m => {
                x.edges.len() == m && x.edges == y.edges && x.terminal.is_subset(&y.terminal)
            }
            _ => {
                // the point has an edge at position m+1
                self.edges[..m] == y.edges[..] && y.terminal.contains(&self.sources[m])
            }
        }
    }

    /// Edge at 1-based position `i`, if the point is that long.
    pub fn edge(&mut self, g: &Ultragraph, i: usize) -> Option<EdgeId> {
        self.ensure(g, i);
        self.edges.get(i - 1).cloned()
    }
}

/// `α(x)(y)`: whether `y` is an initial segment of `x`.
pub fn is_initial_segment(g: &Ultragraph, y: &Ultrapath, x: &ShiftPoint) -> bool {
    Realized::new(x).has_initial_segment(g, y)
}

/// Membership in the cylinder `D_{(β,B)}` (when `f` is empty) or
/// `D_{(β,B),F}`.
pub fn cylinder_contains(g: &Ultragraph, base: &Ultrapath, f: &[EdgeId], x: &ShiftPoint) -> Result<bool> {
    let eps = g.epsilon(&base.terminal);
    if !EdgeSet::from_edges(f).is_subset(&eps) {
        return Err(Error::EdgesOutsideEpsilon);
    }
    let m = base.edges.len();
    let head = x.prefix(m + 1);
    if head.len() < m || head[..m] != base.edges[..] {
        return Ok(false);
    }
    if head.len() == m {
        // x = (β, A)
        let ShiftPoint::Finite(p) = x else { unreachable!() };
        return Ok(if f.is_empty() { p.terminal.is_subset(&base.terminal) } else { p.terminal == base.terminal });
    }
    let next = &head[m];
    Ok(if f.is_empty() { base.terminal.contains(&g.source(next)?) } else { eps.contains(next) && !f.contains(next) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{Bitstream, JPresentation};
    use crate::ultragraph::fixtures::{example, loops};
    use proptest::prelude::*;

    fn e(i: u64) -> EdgeId {
        EdgeId::new("e", i)
    }

    fn r(g: &Ultragraph, i: u64) -> VertexSet {
        g.range(&e(i)).unwrap()
    }

    fn two_loops() -> Ultragraph {
        loops(&[("a", IndexSet::singleton(0)), ("b", IndexSet::singleton(0))])
    }

    fn a() -> EdgeId {
        EdgeId::new("a", 0)
    }

    fn b() -> EdgeId {
        EdgeId::new("b", 0)
    }

    #[test]
    fn concatenation_cases() {
        let g = example();
        let x = Ultrapath::from_edges(&g, vec![e(2)]).unwrap();
        let y = Ultrapath::from_edges(&g, vec![e(3)]).unwrap();
        assert_eq!(x.concat(&y, &g).unwrap(), Some(Ultrapath::new(vec![e(2), e(3)], r(&g, 3))));
        assert_eq!(y.concat(&x, &g).unwrap(), None);
        let big = Ultrapath::vertex_set(r(&g, 0));
        assert_eq!(big.concat(&big, &g).unwrap(), Some(big.clone()));
        let u2 = VertexSet::singleton(&VertexId::new("u", 2));
        let x0 = Ultrapath::from_edges(&g, vec![e(0)]).unwrap();
        let got = x0.concat(&Ultrapath::vertex_set(u2.clone()), &g).unwrap();
        assert_eq!(got, Some(Ultrapath::new(vec![e(0)], u2.clone())));
        assert_eq!(Ultrapath::vertex_set(u2).concat(&y, &g).unwrap(), None);
    }

    #[test]
    fn initial_segments() {
        let g = example();
        let x = ShiftPoint::Infinite(InfinitePath::tail(vec![], "e", 2));
        assert!(is_initial_segment(&g, &Ultrapath::vertex_set(r(&g, 0)), &x));
        let x = ShiftPoint::Infinite(InfinitePath::tail(vec![e(0)], "e", 2));
        assert!(is_initial_segment(&g, &Ultrapath::from_edges(&g, vec![e(0)]).unwrap(), &x));
        assert!(!is_initial_segment(&g, &Ultrapath::from_edges(&g, vec![e(1)]).unwrap(), &x));
        let big = ShiftPoint::Finite(Ultrapath::vertex_set(r(&g, 0)));
        let all_u = VertexSet::from_family("u", IndexSet::naturals());
        assert!(is_initial_segment(&g, &Ultrapath::vertex_set(all_u), &big));
        let u2 = VertexSet::singleton(&VertexId::new("u", 2));
        assert!(!is_initial_segment(&g, &Ultrapath::vertex_set(u2), &big));
    }

    #[test]
    fn shift_cases() {
        let g = example();
        let x = InfinitePath::tail(vec![e(0)], "e", 2);
        assert_eq!(x.shift(), InfinitePath::tail(vec![], "e", 2));
        assert_eq!(x.shift().shift(), InfinitePath::tail(vec![], "e", 3));
        let p = ShiftPoint::Finite(Ultrapath::from_edges(&g, vec![e(0)]).unwrap());
        let a0 = ShiftPoint::Finite(Ultrapath::vertex_set(r(&g, 0)));
        assert_eq!(p.shift(), a0);
        assert_eq!(a0.shift(), a0);
    }

    #[test]
    fn entries() {
        let ep = InfinitePath::periodic(vec![], vec![a(), b()]);
        assert_eq!(ep.entry_at(3), a());
        let x = InfinitePath::tail(vec![e(0)], "e", 2);
        assert_eq!(x.entry_at(2), e(2));
        assert_eq!(x.prefix(4), vec![e(0), e(2), e(3), e(4)]);
        let bits = Bitstream::periodic(vec![false, true, false], vec![false]).unwrap();
        let bc = InfinitePath::BinaryCoded(BinaryCoded::new(
            VertexId::new("w", 0),
            vec![a()],
            vec![b(), EdgeId::new("c", 0)],
            bits,
        ));
        assert_eq!(bc.prefix(4), vec![a(), b(), EdgeId::new("c", 0), a()]);
        assert_eq!(bc.entry_at(2), b());
    }

    #[test]
    fn cylinders() {
        let g = example();
        let base = Ultrapath::from_edges(&g, vec![e(0)]).unwrap();
        let fin = ShiftPoint::Finite(base.clone());
        assert!(cylinder_contains(&g, &base, &[], &fin).unwrap());
        let x = ShiftPoint::Infinite(InfinitePath::tail(vec![e(0)], "e", 2));
        assert!(!cylinder_contains(&g, &base, &[e(2)], &x).unwrap());
        let x4 = ShiftPoint::Infinite(InfinitePath::tail(vec![e(0)], "e", 4));
        assert!(cylinder_contains(&g, &base, &[e(2)], &x4).unwrap());
        assert_eq!(cylinder_contains(&g, &base, &[e(1)], &x4), Err(Error::EdgesOutsideEpsilon));
    }

    #[test]
    fn validation() {
        let g = example();
        assert!(InfinitePath::tail(vec![e(0)], "e", 2).validate(&g).is_ok());
        assert!(InfinitePath::tail(vec![e(0)], "e", 3).validate(&g).is_err());
        assert!(InfinitePath::tail(vec![EdgeId::new("f", 0)], "e", 1).validate(&g).is_ok());
        assert!(InfinitePath::periodic(vec![], vec![e(1)]).validate(&g).is_err());
        assert!(ShiftPoint::Finite(Ultrapath::vertex_set(r(&g, 0))).validate(&g).is_ok());
        let all = ShiftPoint::Finite(Ultrapath::vertex_set(g.all_vertices()));
        assert!(matches!(all.validate(&g), Err(Error::NotMinimalEmitter(_))));
        assert!(ClosedPath::new(&two_loops(), VertexId::new("w", 0), vec![a(), b()]).is_err());
    }

    #[test]
    fn occurrence_metadata() {
        let x = InfinitePath::periodic(vec![b()], vec![a(), b()]);
        let Occurrence::Infinite(Some(pos)) = x.occurrences(&a()) else { panic!() };
        for i in 1..50u64 {
            assert_eq!(pos.contains(i), x.entry_at(i as usize) == a(), "position {i}");
        }
        let t = InfinitePath::tail(vec![e(0)], "e", 2);
        assert_eq!(t.occurrences(&e(5)), Occurrence::Finite(vec![5]));
    }

    #[test]
    fn normal_forms() {
        let x = InfinitePath::periodic(vec![a(), b(), a()], vec![b(), a(), b(), a()]);
        assert_eq!(x.normalized(), InfinitePath::periodic(vec![], vec![a(), b()]));
        let t = InfinitePath::tail(vec![e(0), e(1)], "e", 2);
        assert_eq!(t.normalized(), InfinitePath::tail(vec![], "e", 0));
    }

    fn arb_point() -> impl Strategy<Value = InfinitePath> {
        let bits = (proptest::collection::vec(any::<bool>(), 0..5), proptest::collection::vec(any::<bool>(), 1..4));
        prop_oneof![
            (proptest::collection::vec(any::<bool>(), 0..4), proptest::collection::vec(any::<bool>(), 1..4)).prop_map(
                |(p, c)| {
                    let pick = |v: Vec<bool>| v.into_iter().map(|x| if x { b() } else { a() }).collect();
                    InfinitePath::periodic(pick(p), pick(c))
                }
            ),
            bits.prop_map(|(p, c)| InfinitePath::BinaryCoded(BinaryCoded::new(
                VertexId::new("w", 0),
                vec![a()],
                vec![b(), b()],
                Bitstream::periodic(p, c).unwrap()
            ))),
            (0u64..3).prop_map(|o| InfinitePath::BinaryCoded(BinaryCoded::new(
                VertexId::new("w", 0),
                vec![b()],
                vec![a(), b()],
                Bitstream::f_code(JPresentation::shifted(vec![], o).unwrap())
            ))),
        ]
    }

    proptest! {
        #[test]
        fn shift_commutes_with_realization(x in arb_point(), n in 1usize..40) {
            let full = x.prefix(n + 1);
            prop_assert_eq!(x.shift().prefix(n), full[1..].to_vec());
        }

        #[test]
        fn prefixes_are_valid(x in arb_point()) {
            let g = loops(&[("a", IndexSet::singleton(0)), ("b", IndexSet::singleton(0))]);
            prop_assert!(g.check_chain(&x.prefix(200)).is_ok());
        }

        #[test]
        fn normalization_preserves_realization(x in arb_point(), k in 0usize..7) {
            let y = x.shift_by(k);
            prop_assert_eq!(y.normalized().prefix(120), y.prefix(120));
        }
    }
}
