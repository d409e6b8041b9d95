//! A fixed listing `p₁, p₂, …` of the ultrapath space.
//!
//! Ultrapaths are ordered by the byte length of their canonical text
//! (`edges/set`), then lexicographically. Each length bucket is generated
//! in full before it is sorted, so ranks are stable across runs.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::index_set::IndexSet;
use crate::lattice::Lattice;
use crate::path::Ultrapath;
use crate::ultragraph::{EdgeId, Ultragraph};
use crate::vertex_set::VertexSet;

/// Longest canonical text ever generated.
pub const MAX_TEXT_LEN: usize = 160;

/// Order within a length bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumOrder {
    #[default]
    Canonical,
    /// Same buckets, reverse lexicographic inside each bucket.
    ReverseWithinLength,
}

fn digits(n: u64) -> usize {
    if n == 0 {
        1
    } else {
        n.ilog10() as usize + 1
    }
}

fn joined_len(items: &[u64]) -> usize {
    if items.is_empty() {
        0
    } else {
        items.iter().map(|&x| digits(x)).sum::<usize>() + items.len() - 1
    }
}

/// Canonical index sets `S` with `S ⊇ base`, `S ∖ base` finite, `S ⊆ domain`,
/// `S` nonempty, and text length exactly `len`.
fn atoms(base: &IndexSet, domain: &IndexSet, len: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    if base.is_finite() {
        // T;E;1; with T = max(E) + 1
        let Some(budget) = len.checked_sub(4) else { return out };
        let req: Vec<u64> = base.iter().collect();
        let mut cur = Vec::new();
        finite_dfs(&req, domain, budget, 0, 0, &mut cur, &mut out);
        return out;
    }
    let p = base.period();
    let residues: Vec<u64> = base.residues().iter().copied().collect();
    let tail_len = 1 + digits(p) + 1 + joined_len(&residues);
    let Some(budget) = len.checked_sub(1 + tail_len) else { return out };
    let mut t = 0u64;
    loop {
        let req: Vec<u64> = base.iter_below(t).collect();
        let req_cost = joined_len(&req);
        if digits(t) + req_cost > budget {
            break;
        }
        let tail_ok = (t..base.threshold()).all(|k| !base.contains(k) || base.residues().contains(&(k % p)));
        if tail_ok {
            let target = budget - digits(t);
            let mut cur = Vec::new();
            let mut found = Vec::new();
            explicit_dfs(&req, t, target, 0, 0, &mut cur, &mut found);
            for e in found {
                let s = IndexSet::from_parts(t, e.clone(), p, residues.clone());
                if s.threshold() == t && s.explicit().iter().copied().eq(e.iter().copied()) && s.is_subset(domain) {
                    out.push(s);
                }
            }
        }
        t += 1;
    }
    out
}

/// Nonempty finite `E ⊇ req` inside `domain` with
/// `digits(max E + 1) + joined(E) == budget`.
fn finite_dfs(
    req: &[u64],
    domain: &IndexSet,
    budget: usize,
    from: u64,
    req_idx: usize,
    cur: &mut Vec<u64>,
    out: &mut Vec<IndexSet>,
) {
    if let Some(&last) = cur.last() {
        if req_idx == req.len() && joined_len(cur) + digits(last + 1) == budget {
            out.push(IndexSet::finite(cur.iter().copied()));
        }
    }
    let joined = joined_len(cur);
    let sep = usize::from(!cur.is_empty());
    let mut x = from;
    loop {
        if joined + sep + digits(x) + digits(x + 1) > budget {
            break;
        }
        if req_idx < req.len() && x > req[req_idx] {
            break;
        }
        if IndexSet::max(domain).is_some_and(|top| x > top) {
            break;
        }
        if domain.contains(x) {
            cur.push(x);
            let hit = usize::from(req_idx < req.len() && req[req_idx] == x);
            finite_dfs(req, domain, budget, x + 1, req_idx + hit, cur, out);
            cur.pop();
        }
        x += 1;
    }
}

/// `E ⊆ [0, bound)` with `E ⊇ req` and `joined(E) == target`.
fn explicit_dfs(
    req: &[u64],
    bound: u64,
    target: usize,
    from: u64,
    req_idx: usize,
    cur: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    let joined = joined_len(cur);
    if req_idx == req.len() && joined == target {
        out.push(cur.clone());
    }
    let sep = usize::from(!cur.is_empty());
    for x in from..bound {
        if joined + sep + digits(x) > target {
            break;
        }
        if req_idx < req.len() && x > req[req_idx] {
            break;
        }
        cur.push(x);
        let hit = usize::from(req_idx < req.len() && req[req_idx] == x);
        explicit_dfs(req, bound, target, x + 1, req_idx + hit, cur, out);
        cur.pop();
    }
}

/// The listing, generated lazily one length bucket at a time.
/// Subsets of a small finite range, grouped by text length.
type SubsetTable = HashMap<usize, Vec<VertexSet>>;

/// Finite ranges up to this size have their subsets listed directly.
const SMALL_RANGE: u64 = 12;

/// The listing, generated lazily one length bucket at a time.
pub struct Enumeration<'g> {
    g: &'g Ultragraph,
    lattice: Lattice,
    order: EnumOrder,
    families: Vec<(String, IndexSet)>,
    min_set_len: usize,
    entries: Vec<Ultrapath>,
    by_first: HashMap<Option<EdgeId>, Vec<usize>>,
    next_len: usize,
    set_cache: HashMap<usize, Vec<VertexSet>>,
    atom_cache: HashMap<(usize, usize, usize), Vec<IndexSet>>,
    small_ranges: HashMap<VertexSet, Option<Rc<SubsetTable>>>,
    fit_cache: HashMap<(VertexSet, usize), Rc<Vec<VertexSet>>>,
}

impl<'g> Enumeration<'g> {
    pub fn new(g: &'g Ultragraph) -> Self {
        Enumeration::with_order(g, EnumOrder::Canonical)
    }

    pub fn with_order(g: &'g Ultragraph, order: EnumOrder) -> Self {
        let mut families: Vec<(String, IndexSet)> =
            g.vertex_families().iter().map(|f| (f.name.clone(), f.domain.clone())).collect();
        families.sort_by(|a, b| a.0.cmp(&b.0));
        let min_set_len = families.iter().map(|f| f.0.len() + 7).min().unwrap_or(8);
        Enumeration {
            g,
            lattice: Lattice::new(g),
            order,
            families,
            min_set_len,
            entries: Vec::new(),
            by_first: HashMap::new(),
            next_len: 1,
            set_cache: HashMap::new(),
            atom_cache: HashMap::new(),
            small_ranges: HashMap::new(),
            fit_cache: HashMap::new(),
        }
    }

    pub fn graph(&self) -> &'g Ultragraph {
        self.g
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Entries generated so far, in order.
    pub fn generated(&self) -> &[Ultrapath] {
        &self.entries
    }

    /// Text length of the last completed bucket.
    pub fn completed_len(&self) -> usize {
        self.next_len - 1
    }

    /// 0-based positions of generated entries whose first edge is `first`
    /// (`None` for length-zero entries), increasing.
    pub fn positions_with_first(&self, first: Option<&EdgeId>) -> &[usize] {
        self.by_first.get(&first.cloned()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Generates the next length bucket; false once the text cap is reached.
    pub fn grow(&mut self) -> bool {
        if self.next_len > MAX_TEXT_LEN {
            return false;
        }
        let len = self.next_len;
        self.next_len += 1;
        let mut bucket: Vec<Ultrapath> = Vec::new();
        if len >= 2 {
            for s in self.sets_of_len(len - 1).to_vec() {
                bucket.push(Ultrapath::vertex_set(s));
            }
        }
        let mut cur = Vec::new();
        self.walk(len, &mut cur, 0, &mut bucket);
        let mut keyed: Vec<(String, Ultrapath)> = bucket.into_iter().map(|p| (p.serialize(), p)).collect();
        match self.order {
            EnumOrder::Canonical => keyed.sort_by(|a, b| a.0.cmp(&b.0)),
            EnumOrder::ReverseWithinLength => keyed.sort_by(|a, b| b.0.cmp(&a.0)),
        }
        for (_, p) in keyed {
            let pos = self.entries.len();
            self.by_first.entry(p.edges.first().cloned()).or_default().push(pos);
            self.entries.push(p);
        }
        true
    }

    /// Extends the chain `cur` (text length `used`) and emits every entry of
    /// text length `len` that starts with it.
    fn walk(&mut self, len: usize, cur: &mut Vec<EdgeId>, used: usize, out: &mut Vec<Ultrapath>) {
        let sep = usize::from(!cur.is_empty());
        let allowed = match cur.last() {
            None => self.g.all_edges(),
            Some(last) => self.g.epsilon(&self.g.range(last).expect("generated edge")),
        };
        for (family, set) in allowed.atoms() {
            for d in 1..=18usize {
                let next = used + sep + family.len() + 2 + d;
                if next + 1 + self.min_set_len > len {
                    break;
                }
                let lo = if d == 1 { 0 } else { 10u64.pow(d as u32 - 1) };
                let hi = 10u64.pow(d as u32);
                let ks: Vec<u64> = match IndexSet::max(set) {
                    Some(top) if top < lo => break,
                    _ => set.iter_below(hi).skip_while(|&k| k < lo).collect(),
                };
                for k in ks {
                    let e = EdgeId::new(family.clone(), k);
                    let range = self.g.range(&e).expect("generated edge");
                    cur.push(e);
                    for s in self.fitting(&range, len - 1 - next).iter() {
                        out.push(Ultrapath::new(cur.clone(), s.clone()));
                    }
                    if next + 5 + 1 + self.min_set_len <= len {
                        self.walk(len, cur, next, out);
                    }
                    cur.pop();
                }
            }
        }
    }

    /// Algebra members inside `range` with text length `m`.
    fn fitting(&mut self, range: &VertexSet, m: usize) -> Rc<Vec<VertexSet>> {
        if let Some(table) = self.small_table(range) {
            return Rc::new(table.get(&m).cloned().unwrap_or_default());
        }
        let key = (range.clone(), m);
        if let Some(v) = self.fit_cache.get(&key) {
            return v.clone();
        }
        let v: Rc<Vec<VertexSet>> =
            Rc::new(self.sets_of_len(m).iter().filter(|s| s.is_subset(range)).cloned().collect());
        self.fit_cache.insert(key, v.clone());
        v
    }

    fn small_table(&mut self, range: &VertexSet) -> Option<Rc<SubsetTable>> {
        if let Some(t) = self.small_ranges.get(range) {
            return t.clone();
        }
        let table = match range.cardinality() {
            crate::Cardinality::Finite(n) if n <= SMALL_RANGE => {
                let verts: Vec<_> = range
                    .atoms()
                    .iter()
                    .flat_map(|(f, s)| s.iter().map(move |i| crate::VertexId::new(f.clone(), i)))
                    .collect();
                let mut t = SubsetTable::new();
                for mask in 1u32..(1 << verts.len()) {
                    let s = VertexSet::from_vertices(
                        verts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v),
                    );
                    t.entry(s.serialize().len()).or_default().push(s);
                }
                Some(Rc::new(t))
            }
            _ => None,
        };
        self.small_ranges.insert(range.clone(), table.clone());
        table
    }

    /// Generates until at least `n` entries exist (or the cap is reached).
    pub fn ensure(&mut self, n: usize) -> bool {
        while self.entries.len() < n {
            if !self.grow() {
                return false;
            }
        }
        true
    }

    /// `p_rank`, 1-based.
    pub fn get(&mut self, rank: usize) -> Option<&Ultrapath> {
        if rank == 0 || !self.ensure(rank) {
            return None;
        }
        self.entries.get(rank - 1)
    }

    pub fn take(&mut self, n: usize) -> Vec<Ultrapath> {
        self.ensure(n);
        self.entries.iter().take(n).cloned().collect()
    }

    /// Position of `p` (1-based), or `None` if it is not among the first
    /// `max_rank` entries.
    pub fn rank_of(&mut self, p: &Ultrapath, max_rank: usize) -> Option<usize> {
        let text_len = p.serialize().len();
        while self.completed_len() < text_len && self.entries.len() < max_rank {
            if !self.grow() {
                break;
            }
        }
        self.entries.iter().take(max_rank).position(|q| q == p).map(|i| i + 1)
    }

    /// Members of the vertex algebra whose canonical text has length `m`,
    /// sorted by text.
    fn sets_of_len(&mut self, m: usize) -> &[VertexSet] {
        if !self.set_cache.contains_key(&m) {
            let mut seen: HashSet<VertexSet> = HashSet::new();
            let mut out = Vec::new();
            let cores: Vec<Option<VertexSet>> =
                std::iter::once(None).chain(self.lattice.cores().iter().cloned().map(Some)).collect();
            for (ci, core) in cores.iter().enumerate() {
                let mut acc = Vec::new();
                self.set_dfs(ci, core.as_ref(), 0, m, true, &mut acc, &mut seen, &mut out);
            }
            out.sort_by_key(|s: &VertexSet| s.serialize());
            self.set_cache.insert(m, out);
        }
        &self.set_cache[&m]
    }

    #[allow(clippy::too_many_arguments)]
    fn set_dfs(
        &mut self,
        ci: usize,
        core: Option<&VertexSet>,
        fi: usize,
        rem: usize,
        first: bool,
        acc: &mut Vec<VertexSet>,
        seen: &mut HashSet<VertexSet>,
        out: &mut Vec<VertexSet>,
    ) {
        if fi == self.families.len() {
            if rem == 0 && !acc.is_empty() {
                let s = acc.iter().fold(VertexSet::empty(), |a, b| a.union(b));
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
            return;
        }
        let (name, domain) = self.families[fi].clone();
        let base = core.map(|c| c.family(&name)).unwrap_or_else(IndexSet::empty);
        if base.is_empty() {
            self.set_dfs(ci, core, fi + 1, rem, first, acc, seen, out);
        }
        let overhead = name.len() + 1 + usize::from(!first);
        for l in 6..=rem.saturating_sub(overhead) {
            let key = (ci, fi, l);
            let options = self.atom_cache.entry(key).or_insert_with(|| atoms(&base, &domain, l)).clone();
            for s in options {
                acc.push(VertexSet::from_family(&name, s));
                self.set_dfs(ci, core, fi + 1, rem - overhead - l, false, acc, seen, out);
                acc.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultragraph::fixtures::{example, loops};
    use crate::vertex_set::VertexId;

    #[test]
    fn one_loop_graph_starts_with_its_vertex() {
        let g = loops(&[("a", IndexSet::singleton(0))]);
        let mut en = Enumeration::new(&g);
        let first = en.take(3);
        let w = VertexSet::singleton(&VertexId::new("w", 0));
        assert_eq!(first[0], Ultrapath::vertex_set(w.clone()));
        assert_eq!(first[1], Ultrapath::new(vec![EdgeId::new("a", 0)], w.clone()));
        assert_eq!(first[2], Ultrapath::new(vec![EdgeId::new("a", 0); 2], w));
        assert_eq!(en.rank_of(&first[0], 10), Some(1));
    }

    #[test]
    fn ordered_and_duplicate_free() {
        let g = example();
        let mut en = Enumeration::new(&g);
        let list = en.take(500);
        assert_eq!(list.len(), 500);
        let texts: Vec<String> = list.iter().map(Ultrapath::serialize).collect();
        for w in texts.windows(2) {
            assert!((w[0].len(), &w[0]) < (w[1].len(), &w[1]));
        }
        let uniq: HashSet<&String> = texts.iter().collect();
        assert_eq!(uniq.len(), 500);
        for p in &list {
            p.validate(&g).unwrap();
            assert!(en.lattice().contains(&p.terminal));
        }
    }

    #[test]
    fn infinite_atoms_contain_their_core() {
        let evens = IndexSet::progression(2, 2, 0);
        let all = IndexSet::naturals();
        for len in 6..12 {
            for s in atoms(&evens, &all, len) {
                assert_eq!(s.serialize().len(), len);
                assert!(evens.is_subset(&s));
                assert!(s.difference(&evens).is_finite());
            }
        }
        assert!(atoms(&evens, &all, 6).contains(&evens));
        assert!(atoms(&evens, &all, 6).contains(&IndexSet::progression(2, 0, 0)));
    }

    #[test]
    fn finite_atoms_are_exhaustive() {
        let all = IndexSet::naturals();
        for len in 6..11 {
            let got: HashSet<IndexSet> = atoms(&IndexSet::empty(), &all, len).into_iter().collect();
            // all subsets of [0, 40) with at most three elements
            let mut want = HashSet::new();
            for a in 0..40u64 {
                for b in a..40 {
                    for c in b..40 {
                        let s = IndexSet::finite([a, b, c]);
                        if s.serialize().len() == len {
                            want.insert(s);
                        }
                    }
                }
            }
            assert!(want.is_subset(&got), "length {len}");
        }
    }

    #[test]
    fn reverse_order_has_same_buckets() {
        let g = example();
        let mut a = Enumeration::new(&g);
        let mut b = Enumeration::with_order(&g, EnumOrder::ReverseWithinLength);
        for _ in 0..12 {
            a.grow();
            b.grow();
        }
        let ta: Vec<String> = a.generated().iter().map(Ultrapath::serialize).collect();
        let tb: Vec<String> = b.generated().iter().map(Ultrapath::serialize).collect();
        assert_ne!(ta, tb);
        let mut sa = ta.clone();
        let mut sb = tb.clone();
        sa.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
        sb.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
        assert_eq!(sa, sb);
        assert_eq!(sa, ta);
    }

    #[test]
    fn covers_brute_force_pool() {
        let g = example();
        let mut en = Enumeration::new(&g);
        while en.completed_len() < 13 {
            en.grow();
        }
        let listed: HashSet<Ultrapath> = en.generated().iter().cloned().collect();
        let verts: Vec<VertexId> = ["u", "v"].iter().flat_map(|f| (0..12).map(move |i| VertexId::new(*f, i))).collect();
        let evens = VertexSet::from_family("u", IndexSet::progression(2, 2, 0));
        let mut pool: Vec<VertexSet> = vec![evens.clone()];
        for (i, a) in verts.iter().enumerate() {
            pool.push(VertexSet::singleton(a));
            pool.push(evens.union(&VertexSet::singleton(a)));
            for b in &verts[i + 1..] {
                pool.push(VertexSet::from_vertices([a, b]));
            }
        }
        let edges: Vec<EdgeId> = ["e", "f"].iter().flat_map(|f| (0..12).map(move |i| EdgeId::new(*f, i))).collect();
        let mut chains: Vec<Vec<EdgeId>> = vec![vec![]];
        for a in &edges {
            chains.push(vec![a.clone()]);
            for b in &edges {
                chains.push(vec![a.clone(), b.clone()]);
            }
        }
        let mut checked = 0;
        for c in &chains {
            for s in &pool {
                let p = Ultrapath::new(c.clone(), s.clone());
                if p.serialize().len() > 13 || p.validate(&g).is_err() || !en.lattice().contains(s) {
                    continue;
                }
                assert!(listed.contains(&p), "missing {p}");
                checked += 1;
            }
        }
        assert!(checked > 100);
        assert_eq!(listed.len(), en.generated().len());
    }
}
