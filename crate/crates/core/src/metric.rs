//! The embedding `α : X → {0,1}^𝔭` and the metric it induces.
//!
//! `d(x, y) = 2^{-i}` where `p_i` is the first listed ultrapath that is an
//! initial segment of exactly one of the two points. Distances are kept as
//! ranks.

use std::fmt;

use serde::Serialize;

use crate::enumeration::{EnumOrder, Enumeration};
use crate::path::{is_initial_segment, InfinitePath, Realized, ShiftPoint, Ultrapath};
use crate::ultragraph::{EdgeId, Ultragraph};

pub const DEFAULT_MAX_RANK: usize = 100_000;

/// Realized prefix length used when equality has no closed form.
const EQUALITY_HORIZON: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "rank", rename_all = "snake_case")]
pub enum DistanceValue {
    /// `2^{-i}`, `i ≥ 1`.
    Rank(u64),
    Zero,
    /// No distinguisher among `p_1 … p_m`.
    UnknownBeyond(u64),
}

impl DistanceValue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            DistanceValue::Rank(i) => Some(2f64.powi(-(i.min(2000) as i32))),
            DistanceValue::Zero => Some(0.0),
            DistanceValue::UnknownBeyond(_) => None,
        }
    }

    /// The `rank` column of trajectory CSV.
    pub fn csv_rank(&self) -> i64 {
        match *self {
            DistanceValue::Rank(i) => i as i64,
            DistanceValue::Zero => -1,
            DistanceValue::UnknownBeyond(_) => 0,
        }
    }

    /// Larger means closer. An unresolved scan counts as just past its bound.
    pub fn closeness(&self) -> u64 {
        match *self {
            DistanceValue::Rank(i) => i,
            DistanceValue::Zero => u64::MAX,
            DistanceValue::UnknownBeyond(m) => m + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DistanceValue::Zero)
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Rank(i) => write!(f, "2^-{i}"),
            DistanceValue::Zero => f.write_str("0"),
            DistanceValue::UnknownBeyond(m) => write!(f, "<2^-{m}"),
        }
    }
}

/// Whether two presentations denote the same point; `None` when that is
/// not decidable from the presentations.
pub fn same_point(x: &ShiftPoint, y: &ShiftPoint) -> Option<bool> {
    match (x, y) {
        (ShiftPoint::Finite(a), ShiftPoint::Finite(b)) => Some(a == b),
        (ShiftPoint::Infinite(a), ShiftPoint::Infinite(b)) => same_path(a, b),
        _ => Some(false),
    }
}

fn same_path(a: &InfinitePath, b: &InfinitePath) -> Option<bool> {
    use InfinitePath::*;
    let (a, b) = (a.normalized(), b.normalized());
    match (&a, &b) {
        (EventuallyPeriodic { .. }, EventuallyPeriodic { .. }) | (FamilyTail { .. }, FamilyTail { .. }) => Some(a == b),
        // a tail uses infinitely many edges; the other forms finitely many
        (FamilyTail { .. }, _) | (_, FamilyTail { .. }) => Some(false),
        // closed-path blocks decode uniquely, so a stream that is not
        // eventually periodic never yields an eventually periodic path
        (BinaryCoded(_), EventuallyPeriodic { .. }) | (EventuallyPeriodic { .. }, BinaryCoded(_)) => Some(false),
        (BinaryCoded(p), BinaryCoded(q)) => {
            if a.prefix(EQUALITY_HORIZON) != b.prefix(EQUALITY_HORIZON) {
                return Some(false);
            }
            let aligned = p.prefix == q.prefix
                && p.vertex == q.vertex
                && p.c1 == q.c1
                && p.c2 == q.c2
                && p.consumed == q.consumed;
            if aligned && p.bits.decide_equal(&q.bits, EQUALITY_HORIZON) == Some(true) {
                return Some(true);
            }
            None
        }
    }
}

/// `α(x)(p)`.
pub fn alpha_row(g: &Ultragraph, x: &ShiftPoint, p: &Ultrapath) -> bool {
    is_initial_segment(g, p, x)
}

/// Casewise conditions of the convergence characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceCase {
    /// Infinite limit: agreement on ever longer prefixes.
    InfiniteLimit,
    /// Limit `(γ, A)`: eventually equal, or extending `γ` by edges of
    /// `ε(A)` that leave every finite set.
    FiniteLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub case: ConvergenceCase,
    pub converges: bool,
    /// First index from which every term meets the structural condition.
    pub conditions_from: Option<usize>,
    /// A continuation edge met twice in the second half of the sequence.
    pub blocking_edge: Option<EdgeId>,
    /// Common prefix lengths with the limit (infinite limits only).
    pub agreement: Vec<usize>,
    pub distances: Vec<DistanceValue>,
    /// From this index on, distances to the limit never increase.
    pub monotone_from: Option<usize>,
}

/// Distance computations against one fixed listing of `𝔭`.
pub struct Metric<'g> {
    g: &'g Ultragraph,
    en: Enumeration<'g>,
    max_rank: usize,
}

impl<'g> Metric<'g> {
    pub fn new(g: &'g Ultragraph) -> Self {
        Metric::with_order(g, EnumOrder::Canonical)
    }

    pub fn with_order(g: &'g Ultragraph, order: EnumOrder) -> Self {
        Metric { g, en: Enumeration::with_order(g, order), max_rank: DEFAULT_MAX_RANK }
    }

    pub fn max_rank(mut self, max_rank: usize) -> Self {
        self.max_rank = max_rank.max(1);
        self
    }

    pub fn rank_bound(&self) -> usize {
        self.max_rank
    }

    pub fn graph(&self) -> &'g Ultragraph {
        self.g
    }

    pub fn enumeration(&mut self) -> &mut Enumeration<'g> {
        &mut self.en
    }

    /// `α(x)(p_rank)`, or `None` past the listing cap.
    pub fn alpha_at(&mut self, x: &ShiftPoint, rank: usize) -> Option<bool> {
        let p = self.en.get(rank)?.clone();
        Some(alpha_row(self.g, x, &p))
    }

    pub fn distance(&mut self, x: &ShiftPoint, y: &ShiftPoint) -> DistanceValue {
        if same_point(x, y) == Some(true) {
            return DistanceValue::Zero;
        }
        let mut firsts: Vec<Option<EdgeId>> = vec![None, x.prefix(1).pop(), y.prefix(1).pop()];
        firsts.dedup();
        firsts.sort();
        firsts.dedup();
        let mut rx = Realized::new(x);
        let mut ry = Realized::new(y);
        let mut scanned = 0;
        loop {
            let limit = self.en.generated().len().min(self.max_rank);
            let mut cands: Vec<usize> = firsts
                .iter()
                .flat_map(|f| {
                    let ps = self.en.positions_with_first(f.as_ref());
                    let lo = ps.partition_point(|&i| i < scanned);
                    let hi = ps.partition_point(|&i| i < limit);
                    ps[lo..hi].to_vec()
                })
                .collect();
            cands.sort_unstable();
            for pos in cands {
                let p = &self.en.generated()[pos];
                if rx.has_initial_segment(self.g, p) != ry.has_initial_segment(self.g, p) {
                    return DistanceValue::Rank(pos as u64 + 1);
                }
            }
            scanned = limit;
            if limit >= self.max_rank || !self.en.grow() {
                return DistanceValue::UnknownBeyond(self.max_rank as u64);
            }
        }
    }

    /// `d(σⁿx, σⁿy)` for `n = 0 … n_max`.
    pub fn trajectory(&mut self, x: &ShiftPoint, y: &ShiftPoint, n_max: usize) -> Vec<DistanceValue> {
        let (mut x, mut y) = (x.clone(), y.clone());
        let mut out = Vec::with_capacity(n_max + 1);
        for _ in 0..=n_max {
            out.push(self.distance(&x, &y));
            x = x.shift();
            y = y.shift();
        }
        out
    }

    /// Checks the convergence conditions on a finite stretch of a sequence.
    /// A stretch is judged convergent when the conditions hold throughout
    /// its second half.
    pub fn check_convergence(&mut self, seq: &[ShiftPoint], limit: &ShiftPoint) -> ConvergenceReport {
        let half = seq.len() / 2;
        let distances: Vec<DistanceValue> = seq.iter().map(|x| self.distance(x, limit)).collect();
        let monotone_from = suffix_start(&distances, |a, b| a.closeness() <= b.closeness());
        match limit {
            ShiftPoint::Infinite(_) => {
                let cap = 64 + seq.len();
                let target = limit.prefix(cap);
                let agreement: Vec<usize> =
                    seq.iter().map(|x| x.prefix(cap).iter().zip(&target).take_while(|(a, b)| a == b).count()).collect();
                let conditions_from = suffix_start(&agreement, |a, b| a <= b);
                let converges = conditions_from.is_some_and(|n| n <= half)
                    && agreement
                        .last()
                        .is_some_and(|&last| last == cap || agreement.get(half).is_some_and(|&mid| last > mid));
                ConvergenceReport {
                    case: ConvergenceCase::InfiniteLimit,
                    converges,
                    conditions_from,
                    blocking_edge: None,
                    agreement,
                    distances,
                    monotone_from,
                }
            }
            ShiftPoint::Finite(base) => {
                let k = base.edges.len();
                let eps = self.g.epsilon(&base.terminal);
                let continuation: Vec<Option<Option<EdgeId>>> = seq
                    .iter()
                    .map(|x| {
                        if same_point(x, limit) == Some(true) {
                            return Some(None);
                        }
                        let pre = x.prefix(k + 1);
                        (pre.len() == k + 1 && pre[..k] == base.edges[..] && eps.contains(&pre[k]))
                            .then(|| Some(pre[k].clone()))
                    })
                    .collect();
                let ok: Vec<bool> = continuation.iter().map(Option::is_some).collect();
                let conditions_from = (0..=ok.len()).find(|&n| ok[n..].iter().all(|&b| b)).filter(|&n| n < ok.len());
                let mut seen = std::collections::HashSet::new();
                let blocking_edge = continuation[half.max(conditions_from.unwrap_or(0)).min(seq.len())..]
                    .iter()
                    .filter_map(|c| c.clone().flatten())
                    .find(|e| !seen.insert(e.clone()));
                let converges = conditions_from.is_some_and(|n| n <= half) && blocking_edge.is_none();
                ConvergenceReport {
                    case: ConvergenceCase::FiniteLimit,
                    converges,
                    conditions_from,
                    blocking_edge,
                    agreement: Vec::new(),
                    distances,
                    monotone_from,
                }
            }
        }
    }
}

/// Smallest `n` such that `ok(v[i], v[i+1])` for all `i ≥ n`.
fn suffix_start<T>(v: &[T], ok: impl Fn(&T, &T) -> bool) -> Option<usize> {
    if v.is_empty() {
        return None;
    }
    let mut n = v.len() - 1;
    while n > 0 && ok(&v[n - 1], &v[n]) {
        n -= 1;
    }
    Some(n)
}

/// Trajectory CSV: `n,rank,value` with `rank = -1` for zero and `0` when
/// unresolved (empty value).
pub fn trajectory_csv(values: &[DistanceValue]) -> String {
    let mut out = String::from("n,rank,value\n");
    for (n, d) in values.iter().enumerate() {
        let value = d.value().map(|v| format!("{v:e}")).unwrap_or_default();
        out.push_str(&format!("{n},{},{value}\n", d.csv_rank()));
    }
    out
}
