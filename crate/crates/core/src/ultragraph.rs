//! Finitely presented ultragraphs.
//!
//! Vertices and edges come in indexed families. An edge family `e(k)`
//! carries an index domain, an affine source rule `s(e[k]) = u[a*k+b]`,
//! and guarded range clauses whose bodies are unions of affine vertex
//! atoms (`u[a*k+b]`) and constant vertex sets (`{u[2*j+2] : j >= 0}`).
//! Affine rules keep every source pullback inside eventually periodic
//! index sets, so `ε(A)` is computed exactly.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::{Cardinality, IndexSet};
use crate::vertex_set::{VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub family: String,
    pub index: u64,
}

impl EdgeId {
    pub fn new(family: impl Into<String>, index: u64) -> Self {
        EdgeId { family: family.into(), index }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family, self.index)
    }
}

/// `k ↦ coef*k + offset` over the naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub coef: u64,
    pub offset: u64,
}

impl Affine {
    pub const fn new(coef: u64, offset: u64) -> Self {
        Affine { coef, offset }
    }

    pub const fn constant(offset: u64) -> Self {
        Affine { coef: 0, offset }
    }

    pub fn eval(self, k: u64) -> u64 {
        self.coef * k + self.offset
    }

    pub fn image(self, domain: &IndexSet) -> IndexSet {
        domain.image_affine(self.coef, self.offset)
    }

    pub fn preimage(self, set: &IndexSet) -> IndexSet {
        set.preimage_affine(self.coef, self.offset)
    }

    /// Renders with `var` as the variable, e.g. `2*k+1`, `k`, `3`.
    pub fn render(self, var: &str) -> String {
        match (self.coef, self.offset) {
            (0, b) => b.to_string(),
            (1, 0) => var.to_string(),
            (1, b) => format!("{var}+{b}"),
            (a, 0) => format!("{a}*{var}"),
            (a, b) => format!("{a}*{var}+{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFamily {
    pub name: String,
    pub domain: IndexSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRule {
    pub family: String,
    pub index: Affine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeItem {
    /// A single vertex whose index depends affinely on the edge index.
    Vertex { family: String, index: Affine },
    /// A constant set of vertices.
    Set { family: String, set: IndexSet },
}

impl RangeItem {
    pub fn family(&self) -> &str {
        match self {
            RangeItem::Vertex { family, .. } | RangeItem::Set { family, .. } => family,
        }
    }

    fn eval(&self, k: u64) -> VertexSet {
        match self {
            RangeItem::Vertex { family, index } => VertexSet::singleton(&VertexId::new(family.clone(), index.eval(k))),
            RangeItem::Set { family, set } => VertexSet::from_family(family, set.clone()),
        }
    }

    fn depends_on_index(&self) -> bool {
        matches!(self, RangeItem::Vertex { index, .. } if index.coef != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeClause {
    pub guard: IndexSet,
    pub items: Vec<RangeItem>,
}

impl RangeClause {
    pub fn eval(&self, k: u64) -> VertexSet {
        self.items.iter().fold(VertexSet::empty(), |acc, item| acc.union(&item.eval(k)))
    }

    /// True if the body changes with the edge index.
    pub fn depends_on_index(&self) -> bool {
        self.items.iter().any(RangeItem::depends_on_index)
    }

    /// The union of the constant-set items.
    pub fn constant_part(&self) -> VertexSet {
        self.items
            .iter()
            .filter(|i| !i.depends_on_index())
            .fold(VertexSet::empty(), |acc, item| acc.union(&item.eval(0)))
    }

    pub fn is_infinite(&self) -> bool {
        self.constant_part().cardinality().is_infinite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFamily {
    pub name: String,
    pub var: String,
    pub domain: IndexSet,
    pub source: SourceRule,
    pub ranges: Vec<RangeClause>,
}

impl EdgeFamily {
    pub fn clause_for(&self, k: u64) -> Option<&RangeClause> {
        if !self.domain.contains(k) {
            return None;
        }
        self.ranges.iter().find(|c| c.guard.contains(k))
    }

    /// Guard restricted to the domain.
    pub fn clause_indices(&self, clause: &RangeClause) -> IndexSet {
        clause.guard.intersect(&self.domain)
    }
}

/// Affine level `level(f[n]) = coef*n + offset` for a vertex family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub coef: i64,
    pub offset: i64,
}

/// Per-vertex-family affine level functions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub levels: BTreeMap<String, Level>,
}

impl Grading {
    pub fn level(&self, family: &str) -> Level {
        self.levels.get(family).copied().unwrap_or(Level { coef: 0, offset: 0 })
    }
}

/// Subset of the edges: per edge family, an index set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSet {
    atoms: BTreeMap<String, IndexSet>,
}

impl EdgeSet {
    pub fn empty() -> Self {
        EdgeSet::default()
    }

    pub fn from_family(family: &str, set: IndexSet) -> Self {
        let mut atoms = BTreeMap::new();
        if !set.is_empty() {
            atoms.insert(family.to_string(), set);
        }
        EdgeSet { atoms }
    }

    pub fn from_edges<'a>(edges: impl IntoIterator<Item = &'a EdgeId>) -> Self {
        let mut out = EdgeSet::empty();
        for e in edges {
            out = out.union(&EdgeSet::from_family(&e.family, IndexSet::singleton(e.index)));
        }
        out
    }

    pub fn atoms(&self) -> &BTreeMap<String, IndexSet> {
        &self.atoms
    }

    pub fn family(&self, family: &str) -> IndexSet {
        self.atoms.get(family).cloned().unwrap_or_else(IndexSet::empty)
    }

    pub fn contains(&self, e: &EdgeId) -> bool {
        self.atoms.get(&e.family).is_some_and(|s| s.contains(e.index))
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut atoms = self.atoms.clone();
        for (family, set) in &other.atoms {
            let merged = atoms.get(family).map_or_else(|| set.clone(), |s| s.union(set));
            atoms.insert(family.clone(), merged);
        }
        EdgeSet { atoms }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.atoms.iter().all(|(f, s)| s.is_subset(&other.family(f)))
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

    /// Members with index at most `bound`, ordered by family then index.
    pub fn edges_up_to(&self, bound: u64) -> Vec<EdgeId> {
        self.atoms
            .iter()
            .flat_map(|(f, s)| s.iter_below(bound.saturating_add(1)).map(move |i| EdgeId::new(f.clone(), i)))
            .collect()
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|(k, s)| format!("{k}:{s}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A validated ultragraph presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ultragraph {
    vertex_families: Vec<VertexFamily>,
    edge_families: Vec<EdgeFamily>,
    grading: Option<Grading>,
}

impl Ultragraph {
    /// Validates the presentation: declared families, guard partitions,
    /// range and source images inside vertex domains, no sinks, and (when
    /// supplied) the grading inequalities.
    pub fn new(
        vertex_families: Vec<VertexFamily>,
        edge_families: Vec<EdgeFamily>,
        grading: Option<Grading>,
    ) -> Result<Self> {
        let g = Ultragraph { vertex_families, edge_families, grading };
        g.validate()?;
        Ok(g)
    }

    /// A finite ultragraph on vertices `v[0] … v[n-1]`; edge `i` becomes the
    /// single-edge family `e{i}` with the given source and range.
    pub fn from_edge_list(vertex_count: u64, edges: &[(u64, Vec<u64>)]) -> Result<Self> {
        let vertices = VertexFamily { name: "v".into(), domain: IndexSet::below(vertex_count) };
        let families = edges
            .iter()
            .enumerate()
            .map(|(i, (src, range))| EdgeFamily {
                name: format!("e{i}"),
                var: "k".into(),
                domain: IndexSet::singleton(0),
                source: SourceRule { family: "v".into(), index: Affine::constant(*src) },
                ranges: vec![RangeClause {
                    guard: IndexSet::naturals(),
                    items: vec![RangeItem::Set { family: "v".into(), set: IndexSet::finite(range.iter().copied()) }],
                }],
            })
            .collect();
        Ultragraph::new(vec![vertices], families, None)
    }

    fn validate(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for name in self.vertex_families.iter().map(|f| &f.name).chain(self.edge_families.iter().map(|f| &f.name)) {
            if !names.insert(name.clone()) {
                return Err(Error::DuplicateFamily(name.clone()));
            }
        }
        for ef in &self.edge_families {
            let bad = |message: String| Error::InvalidEdgeFamily { family: ef.name.clone(), message };
            if ef.domain.is_empty() {
                return Err(bad("empty index domain".into()));
            }
            let src_domain = self.vertex_domain(&ef.source.family)?;
            if !ef.source.index.image(&ef.domain).is_subset(src_domain) {
                return Err(bad("source rule leaves the source family's domain".into()));
            }
            if ef.ranges.is_empty() {
                return Err(bad("no range clauses".into()));
            }
            let mut covered = IndexSet::empty();
            for clause in &ef.ranges {
                let ks = ef.clause_indices(clause);
                if !covered.intersect(&ks).is_empty() {
                    return Err(bad("range guards overlap".into()));
                }
                covered = covered.union(&ks);
                if clause.items.is_empty() {
                    return Err(bad("empty range body".into()));
                }
                for item in &clause.items {
                    let domain = self.vertex_domain(item.family())?;
                    let image = match item {
                        RangeItem::Vertex { index, .. } => index.image(&ks),
                        RangeItem::Set { set, .. } => {
                            if set.is_empty() {
                                return Err(bad("empty vertex set in range body".into()));
                            }
                            set.clone()
                        }
                    };
                    if !image.is_subset(domain) {
                        return Err(bad(format!("range mentions vertices outside family `{}`", item.family())));
                    }
                }
            }
            if !ef.domain.is_subset(&covered) {
                return Err(bad("range guards do not cover the index domain".into()));
            }
        }
        for vf in &self.vertex_families {
            let emitting = self.emitting_indices(&vf.name);
            let sinks = vf.domain.difference(&emitting);
            if let Some(i) = IndexSet::min(&sinks) {
                return Err(Error::Sink(VertexId::new(vf.name.clone(), i).to_string()));
            }
        }
        if let Some(grading) = &self.grading {
            self.verify_grading(grading)?;
        }
        Ok(())
    }

    pub fn vertex_families(&self) -> &[VertexFamily] {
        &self.vertex_families
    }

    pub fn edge_families(&self) -> &[EdgeFamily] {
        &self.edge_families
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    pub fn vertex_family(&self, name: &str) -> Result<&VertexFamily> {
        self.vertex_families.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn edge_family(&self, name: &str) -> Result<&EdgeFamily> {
        self.edge_families.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    fn vertex_domain(&self, name: &str) -> Result<&IndexSet> {
        self.vertex_family(name).map(|f| &f.domain)
    }

    /// Indices of `family` that are the source of at least one edge.
    fn emitting_indices(&self, family: &str) -> IndexSet {
        self.edge_families
            .iter()
            .filter(|ef| ef.source.family == family)
            .fold(IndexSet::empty(), |acc, ef| acc.union(&ef.source.index.image(&ef.domain)))
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertex_family(&v.family).is_ok_and(|f| f.domain.contains(v.index))
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.edge_family(&e.family).is_ok_and(|f| f.domain.contains(e.index))
    }

    /// All declared vertices as a set.
    pub fn all_vertices(&self) -> VertexSet {
        self.vertex_families
            .iter()
            .fold(VertexSet::empty(), |acc, f| acc.union(&VertexSet::from_family(&f.name, f.domain.clone())))
    }

    pub fn all_edges(&self) -> EdgeSet {
        self.edge_families
            .iter()
            .fold(EdgeSet::empty(), |acc, f| acc.union(&EdgeSet::from_family(&f.name, f.domain.clone())))
    }

    /// True when every vertex and edge family has a finite domain.
    pub fn is_finite(&self) -> bool {
        self.vertex_families.iter().all(|f| f.domain.is_finite())
            && self.edge_families.iter().all(|f| f.domain.is_finite())
    }

    pub fn source(&self, e: &EdgeId) -> Result<VertexId> {
        let ef = self.edge_family(&e.family)?;
        if !ef.domain.contains(e.index) {
            return Err(Error::EdgeOutOfDomain(e.clone()));
        }
        Ok(VertexId::new(ef.source.family.clone(), ef.source.index.eval(e.index)))
    }

    pub fn range(&self, e: &EdgeId) -> Result<VertexSet> {
        let ef = self.edge_family(&e.family)?;
        ef.clause_for(e.index).map(|c| c.eval(e.index)).ok_or_else(|| Error::EdgeOutOfDomain(e.clone()))
    }

    /// `ε(A)`: the edges whose source lies in `A`.
    pub fn epsilon(&self, a: &VertexSet) -> EdgeSet {
        let mut out = EdgeSet::empty();
        for ef in &self.edge_families {
            let targets = a.family(&ef.source.family);
            if targets.is_empty() {
                continue;
            }
            let ks = ef.source.index.preimage(&targets).intersect(&ef.domain);
            out = out.union(&EdgeSet::from_family(&ef.name, ks));
        }
        out
    }

    pub fn is_infinite_emitter(&self, a: &VertexSet) -> bool {
        self.epsilon(a).cardinality().is_infinite()
    }

    /// Vertices `v` with `ε({v})` infinite. Only a family whose source rule
    /// is constant over an infinite domain can produce one.
    pub fn infinite_emitter_vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .edge_families
            .iter()
            .filter(|ef| ef.source.index.coef == 0 && !ef.domain.is_finite())
            .map(|ef| VertexId::new(ef.source.family.clone(), ef.source.index.offset))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Edges with source in `a` and index at most `index_bound`.
    pub fn edges_from(&self, a: &VertexSet, index_bound: u64) -> Vec<EdgeId> {
        self.epsilon(a).edges_up_to(index_bound)
    }

    /// Checks `s(e_{i+1}) ∈ r(e_i)` along `edges`.
    pub fn check_chain(&self, edges: &[EdgeId]) -> Result<()> {
        for e in edges {
            if !self.has_edge(e) {
                return Err(Error::EdgeOutOfDomain(e.clone()));
            }
        }
        for pair in edges.windows(2) {
            let next_source = self.source(&pair[1])?;
            if !self.range(&pair[0])?.contains(&next_source) {
                return Err(Error::InvalidPath(format!("s({}) = {} is not in r({})", pair[1], next_source, pair[0])));
            }
        }
        Ok(())
    }

    /// `{k : k, k+1 in the domain and s(f[k+1]) ∈ r(f[k])}` for one edge
    /// family, computed symbolically.
    pub fn chain_indices(&self, family: &str) -> Result<IndexSet> {
        let ef = self.edge_family(family)?;
        let src = ef.source.index;
        // s(f[k+1]) = coef*k + (coef + offset)
        let (a, b) = (src.coef, src.coef + src.offset);
        let mut out = IndexSet::empty();
        for clause in &ef.ranges {
            let mut hits = IndexSet::empty();
            for item in &clause.items {
                if item.family() != ef.source.family {
                    continue;
                }
                let part = match item {
                    RangeItem::Set { set, .. } => set.preimage_affine(a, b),
                    RangeItem::Vertex { index, .. } => {
                        let (c, d) = (index.coef, index.offset);
                        if a == c {
                            if b == d {
                                IndexSet::naturals()
                            } else {
                                IndexSet::empty()
                            }
                        } else {
                            // a*k + b = c*k + d
                            let num = d as i128 - b as i128;
                            let den = a as i128 - c as i128;
                            if num % den == 0 && num / den >= 0 {
                                IndexSet::singleton((num / den) as u64)
                            } else {
                                IndexSet::empty()
                            }
                        }
                    }
                };
                hits = hits.union(&part);
            }
            out = out.union(&hits.intersect(&clause.guard));
        }
        let next_in_domain = ef.domain.preimage_affine(1, 1);
        Ok(out.intersect(&ef.domain).intersect(&next_in_domain))
    }

    /// Verifies `level(w) > level(s(e))` for every edge `e` and `w ∈ r(e)`,
    /// symbolically over each clause's index set.
    pub fn verify_grading(&self, grading: &Grading) -> Result<()> {
        for ef in &self.edge_families {
            for clause in &ef.ranges {
                let ks = ef.clause_indices(clause);
                for item in &clause.items {
                    if let Err(message) = check_item(grading, ef, &ks, item) {
                        return Err(Error::GradingViolation { family: ef.name.clone(), message });
                    }
                }
            }
        }
        Ok(())
    }

    /// Searches affine gradings with coefficients in `-bound..=bound` per
    /// vertex family. Supplied gradings are checked first.
    pub fn find_grading(&self, bound: i64) -> Option<Grading> {
        if let Some(g) = &self.grading {
            if self.verify_grading(g).is_ok() {
                return Some(g.clone());
            }
        }
        let families: Vec<String> = self.vertex_families.iter().map(|f| f.name.clone()).collect();
        let mut grading = Grading::default();
        self.search_grading(&families, 0, bound, &mut grading).then_some(grading)
    }

    fn search_grading(&self, families: &[String], depth: usize, bound: i64, grading: &mut Grading) -> bool {
        if depth == families.len() {
            return true;
        }
        let assigned: std::collections::BTreeSet<&str> = families[..=depth].iter().map(String::as_str).collect();
        let mut values: Vec<i64> = (-bound..=bound).collect();
        values.sort_by_key(|v| (v.abs(), *v < 0));
        for &coef in &values {
            for &offset in &values {
                grading.levels.insert(families[depth].clone(), Level { coef, offset });
                if self.partial_grading_ok(grading, &assigned)
                    && self.search_grading(families, depth + 1, bound, grading)
                {
                    return true;
                }
            }
        }
        grading.levels.remove(&families[depth]);
        false
    }

    fn partial_grading_ok(&self, grading: &Grading, assigned: &std::collections::BTreeSet<&str>) -> bool {
        for ef in &self.edge_families {
            if !assigned.contains(ef.source.family.as_str()) {
                continue;
            }
            for clause in &ef.ranges {
                let ks = ef.clause_indices(clause);
                for item in clause.items.iter().filter(|i| assigned.contains(i.family())) {
                    if check_item(grading, ef, &ks, item).is_err() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Minimum of `slope*n + intercept` over `set`; `None` when unbounded below.
fn min_over(slope: i128, intercept: i128, set: &IndexSet) -> Option<i128> {
    let lo = set.min()? as i128;
    if slope >= 0 {
        Some(slope * lo + intercept)
    } else {
        set.max().map(|hi| slope * hi as i128 + intercept)
    }
}

/// Maximum of `slope*n + intercept` over `set`; `None` when unbounded above.
fn max_over(slope: i128, intercept: i128, set: &IndexSet) -> Option<i128> {
    min_over(-slope, -intercept, set).map(|m| -m)
}

fn check_item(grading: &Grading, ef: &EdgeFamily, ks: &IndexSet, item: &RangeItem) -> std::result::Result<(), String> {
    if ks.is_empty() {
        return Ok(());
    }
    let src = grading.level(&ef.source.family);
    let (sa, sb) = (ef.source.index.coef as i128, ef.source.index.offset as i128);
    // source level as a function of k: src.coef*(sa*k+sb) + src.offset
    let s_slope = src.coef as i128 * sa;
    let s_int = src.coef as i128 * sb + src.offset as i128;
    match item {
        RangeItem::Vertex { family, index } => {
            let t = grading.level(family);
            let t_slope = t.coef as i128 * index.coef as i128;
            let t_int = t.coef as i128 * index.offset as i128 + t.offset as i128;
            match min_over(t_slope - s_slope, t_int - s_int, ks) {
                Some(m) if m > 0 => Ok(()),
                _ => Err(format!("level of {family}[{}] does not exceed the source level", index.render(&ef.var))),
            }
        }
        RangeItem::Set { family, set } => {
            let t = grading.level(family);
            let lowest = min_over(t.coef as i128, t.offset as i128, set);
            let highest = max_over(s_slope, s_int, ks);
            match (lowest, highest) {
                (Some(lo), Some(hi)) if lo > hi => Ok(()),
                _ => Err(format!("levels of {family}:{set} do not exceed the source levels")),
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The two-family ultragraph with `s(e_k) = u_k`, `r(e_0) = {u_2j : j ≥ 1}`,
    /// `r(e_k) = {u_{k+1}}`, `s(f_k) = v_k`, `r(f_0) = {v_1, v_2, u_1}`,
    /// `r(f_k) = {v_{2k+1}, v_{2k+2}}`.
    pub fn example() -> Ultragraph {
        let all = IndexSet::naturals();
        let vf = |n: &str| VertexFamily { name: n.into(), domain: all.clone() };
        let e = EdgeFamily {
            name: "e".into(),
            var: "k".into(),
            domain: all.clone(),
            source: SourceRule { family: "u".into(), index: Affine::new(1, 0) },
            ranges: vec![
                RangeClause {
                    guard: IndexSet::singleton(0),
                    items: vec![RangeItem::Set { family: "u".into(), set: IndexSet::progression(2, 2, 0) }],
                },
                RangeClause {
                    guard: IndexSet::at_least(1),
                    items: vec![RangeItem::Vertex { family: "u".into(), index: Affine::new(1, 1) }],
                },
            ],
        };
        let f = EdgeFamily {
            name: "f".into(),
            var: "k".into(),
            domain: all.clone(),
            source: SourceRule { family: "v".into(), index: Affine::new(1, 0) },
            ranges: vec![
                RangeClause {
                    guard: IndexSet::singleton(0),
                    items: vec![
                        RangeItem::Vertex { family: "v".into(), index: Affine::constant(1) },
                        RangeItem::Vertex { family: "v".into(), index: Affine::constant(2) },
                        RangeItem::Vertex { family: "u".into(), index: Affine::constant(1) },
                    ],
                },
                RangeClause {
                    guard: IndexSet::at_least(1),
                    items: vec![
                        RangeItem::Vertex { family: "v".into(), index: Affine::new(2, 1) },
                        RangeItem::Vertex { family: "v".into(), index: Affine::new(2, 2) },
                    ],
                },
            ],
        };
        Ultragraph::new(vec![vf("u"), vf("v")], vec![e, f], None).unwrap()
    }

    /// One vertex `w[0]` with loop families given by `(name, domain)`.
    pub fn loops(families: &[(&str, IndexSet)]) -> Ultragraph {
        let w = VertexFamily { name: "w".into(), domain: IndexSet::singleton(0) };
        let edges = families
            .iter()
            .map(|(name, domain)| EdgeFamily {
                name: (*name).into(),
                var: "k".into(),
                domain: domain.clone(),
                source: SourceRule { family: "w".into(), index: Affine::constant(0) },
                ranges: vec![RangeClause {
                    guard: IndexSet::naturals(),
                    items: vec![RangeItem::Vertex { family: "w".into(), index: Affine::constant(0) }],
                }],
            })
            .collect();
        Ultragraph::new(vec![w], edges, None).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn e(i: u64) -> EdgeId {
        EdgeId::new("e", i)
    }

    #[test]
    fn source_and_range_rules() {
        let g = example();
        assert_eq!(g.source(&e(3)).unwrap(), VertexId::new("u", 3));
        assert_eq!(g.range(&e(0)).unwrap(), VertexSet::from_family("u", IndexSet::progression(2, 2, 0)));
        let f2 = g.range(&EdgeId::new("f", 2)).unwrap();
        assert_eq!(f2, VertexSet::from_vertices(&[VertexId::new("v", 5), VertexId::new("v", 6)]));
    }

    #[test]
    fn epsilon_by_scanning_sources() {
        let g = example();
        let r0 = g.range(&e(0)).unwrap();
        let eps = g.epsilon(&r0);
        for k in 0..=100 {
            let src = g.source(&e(k)).unwrap();
            assert_eq!(eps.contains(&e(k)), r0.contains(&src), "k = {k}");
            assert!(!eps.contains(&EdgeId::new("f", k)));
        }
        assert_eq!(eps, EdgeSet::from_family("e", IndexSet::progression(2, 2, 0)));
        assert!(g.epsilon(&VertexSet::empty()).is_empty());
        let one = g.epsilon(&VertexSet::singleton(&VertexId::new("u", 1)));
        assert_eq!(one, EdgeSet::from_edges(&[e(1)]));
    }

    #[test]
    fn infinite_emitters() {
        let g = example();
        assert!(g.is_infinite_emitter(&g.range(&e(0)).unwrap()));
        assert!(!g.is_infinite_emitter(&VertexSet::singleton(&VertexId::new("u", 4))));
        assert!(!g.is_infinite_emitter(&VertexSet::empty()));
        assert!(g.infinite_emitter_vertices().is_empty());
        let h = loops(&[("g", IndexSet::naturals())]);
        assert_eq!(h.infinite_emitter_vertices(), vec![VertexId::new("w", 0)]);
    }

    #[test]
    fn grading_is_found_and_verified() {
        let g = example();
        let grading = g.find_grading(4).expect("grading exists");
        g.verify_grading(&grading).unwrap();
        let identity = Grading {
            levels: [("u".to_string(), Level { coef: 1, offset: 0 }), ("v".to_string(), Level { coef: 1, offset: 0 })]
                .into_iter()
                .collect(),
        };
        g.verify_grading(&identity).unwrap();
        let flat = Grading::default();
        assert!(g.verify_grading(&flat).is_err());
        assert!(loops(&[("a", IndexSet::singleton(0))]).find_grading(4).is_none());
    }

    #[test]
    fn sinks_are_rejected() {
        let u = VertexFamily { name: "u".into(), domain: IndexSet::below(2) };
        let edge = EdgeFamily {
            name: "e".into(),
            var: "k".into(),
            domain: IndexSet::singleton(0),
            source: SourceRule { family: "u".into(), index: Affine::constant(1) },
            ranges: vec![RangeClause {
                guard: IndexSet::naturals(),
                items: vec![RangeItem::Vertex { family: "u".into(), index: Affine::constant(1) }],
            }],
        };
        let err = Ultragraph::new(vec![u], vec![edge], None).unwrap_err();
        assert_eq!(err, Error::Sink("u[0]".into()));
    }

    #[test]
    fn chain_check() {
        let g = example();
        g.check_chain(&[e(0), e(2), e(3)]).unwrap();
        assert!(g.check_chain(&[e(0), e(1)]).is_err());
    }
}
