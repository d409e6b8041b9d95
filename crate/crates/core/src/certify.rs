//! Exact scrambled-pair certificates.
//!
//! `lim sup d(σⁿx, σⁿy) > 0` and `lim inf d(σⁿx, σⁿy) = 0` are decided from
//! combinatorial criteria on the two presentations, never from numerics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::path::{BinaryCoded, InfinitePath, ShiftPoint};
use crate::ultragraph::{EdgeId, Ultragraph};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Criterion {
    /// Path against emitter: some edge occurs infinitely often.
    RecurringEdge { edge: EdgeId },
    /// Path against emitter: infinitely many distinct edges with source
    /// outside the emitter.
    DistinctSourcesOutside,
    /// Path against emitter: infinitely many distinct edges with source
    /// inside the emitter.
    DistinctSourcesInside,
    /// Two paths: one edge recurs at infinitely many disagreement positions.
    RecurringDisagreement { edge: EdgeId },
    /// Two paths: infinitely many distinct edges shared at equal positions.
    CommonEdges,
    /// Two paths: agreement windows of unbounded length.
    GrowingAgreement,
    /// Two paths: infinitely many disagreements with pairwise distinct
    /// entries on both sides.
    DistinctDisagreements,
    /// Two finite points: the orbits settle on their emitters.
    SettledEmitters,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCertificate {
    pub limsup_positive: bool,
    /// The criterion that holds; `None` when `limsup_positive` is false.
    pub limsup_criterion: Option<Criterion>,
    pub liminf_zero: bool,
    pub liminf_criterion: Option<Criterion>,
    pub scrambled: bool,
}

impl PairCertificate {
    fn new(limsup: Option<Criterion>, liminf: Option<Criterion>, limsup_positive: bool, liminf_zero: bool) -> Self {
        PairCertificate {
            limsup_positive,
            limsup_criterion: limsup.filter(|_| limsup_positive),
            liminf_zero,
            liminf_criterion: liminf.filter(|_| liminf_zero),
            scrambled: limsup_positive && liminf_zero,
        }
    }
}

pub fn certify_pair(g: &Ultragraph, x: &ShiftPoint, y: &ShiftPoint) -> Result<PairCertificate> {
    match (x, y) {
        (ShiftPoint::Infinite(a), ShiftPoint::Infinite(b)) => certify_paths(a, b),
        (ShiftPoint::Infinite(a), ShiftPoint::Finite(p)) | (ShiftPoint::Finite(p), ShiftPoint::Infinite(a)) => {
            certify_against_emitter(g, a, &p.terminal)
        }
        (ShiftPoint::Finite(p), ShiftPoint::Finite(q)) => {
            let same = p.terminal == q.terminal;
            Ok(PairCertificate::new(Some(Criterion::SettledEmitters), Some(Criterion::SettledEmitters), !same, same))
        }
    }
}

/// Infinite path against a minimal infinite emitter `a`.
pub fn certify_against_emitter(g: &Ultragraph, x: &InfinitePath, a: &VertexSet) -> Result<PairCertificate> {
    match x.normalized() {
        InfinitePath::FamilyTail { family, start, .. } => {
            let ef = g.edge_family(&family)?;
            let tail = IndexSet::at_least(start).intersect(&ef.domain);
            let inside = ef.source.index.preimage(&a.family(&ef.source.family)).intersect(&tail);
            let outside = tail.difference(&inside);
            Ok(PairCertificate::new(
                Some(Criterion::DistinctSourcesOutside),
                Some(Criterion::DistinctSourcesInside),
                !outside.is_finite(),
                !inside.is_finite(),
            ))
        }
        // finitely many distinct edges, at least one recurring
        other => {
            let edge = other.recurring_edges().into_iter().next().expect("an infinite path over finitely many edges");
            Ok(PairCertificate::new(Some(Criterion::RecurringEdge { edge }), None, true, false))
        }
    }
}

/// Two infinite paths.
pub fn certify_paths(x: &InfinitePath, y: &InfinitePath) -> Result<PairCertificate> {
    use InfinitePath::*;
    let (x, y) = (x.normalized(), y.normalized());
    match (&x, &y) {
        (EventuallyPeriodic { .. }, EventuallyPeriodic { .. }) => {
            let (px, cx) = periodic_parts(&x);
            let (py, cy) = periodic_parts(&y);
            let start = px.max(py);
            let span = crate::index_set::lcm(cx as u64, cy as u64) as usize;
            let window_x = x.prefix(start + span);
            let window_y = y.prefix(start + span);
            let hit = (start..start + span).find(|&i| window_x[i] != window_y[i]);
            Ok(match hit {
                Some(i) => PairCertificate::new(
                    Some(Criterion::RecurringDisagreement { edge: window_x[i].clone() }),
                    None,
                    true,
                    false,
                ),
                None => PairCertificate::new(None, Some(Criterion::GrowingAgreement), false, true),
            })
        }
        (FamilyTail { prefix: p1, family: f1, start: s1 }, FamilyTail { prefix: p2, family: f2, start: s2 }) => {
            // no edge recurs in either tail
            let aligned = f1 == f2 && (*s1 as i128 - p1.len() as i128) == (*s2 as i128 - p2.len() as i128);
            let liminf = if aligned { Criterion::CommonEdges } else { Criterion::DistinctDisagreements };
            Ok(PairCertificate::new(None, Some(liminf), false, true))
        }
        (FamilyTail { .. }, other) | (other, FamilyTail { .. }) => {
            let edge = other.recurring_edges().into_iter().next().expect("finitely many edges");
            Ok(PairCertificate::new(Some(Criterion::RecurringDisagreement { edge }), None, true, false))
        }
        (BinaryCoded(a), BinaryCoded(b)) => certify_coded(a, b),
        (BinaryCoded(_), EventuallyPeriodic { .. }) | (EventuallyPeriodic { .. }, BinaryCoded(_)) => {
            Err(Error::InsufficientMetadata(
                "binary code against an eventually periodic path: agreement windows are not decided".into(),
            ))
        }
    }
}

fn periodic_parts(x: &InfinitePath) -> (usize, usize) {
    match x {
        InfinitePath::EventuallyPeriodic { prefix, cycle } => (prefix.len(), cycle.len()),
        _ => unreachable!(),
    }
}

/// Block-level certification for codes over the same blocks whose block
/// boundaries line up.
fn certify_coded(a: &BinaryCoded, b: &BinaryCoded) -> Result<PairCertificate> {
    let balanced = |c: &BinaryCoded| matches!(c.bits, crate::bits::Bitstream::Balanced(_));
    let same_blocks = a.vertex == b.vertex && a.c1 == b.c1 && a.c2 == b.c2;
    let aligned = same_blocks
        && a.consumed == b.consumed
        && a.prefix.len() == b.prefix.len()
        && (a.c1.len() == a.c2.len() || (balanced(a) && balanced(b) && a.consumed.is_multiple_of(2)));
    if !aligned {
        return Err(Error::InsufficientMetadata("binary codes whose block boundaries do not line up".into()));
    }
    let differ = a.bits.differ_infinitely(&b.bits).ok_or_else(|| {
        Error::InsufficientMetadata(format!(
            "no rule decides whether {} and {} differ infinitely often",
            a.bits, b.bits
        ))
    })?;
    let agree = a.bits.unbounded_agreement(&b.bits).ok_or_else(|| {
        Error::InsufficientMetadata(format!("no rule decides unbounded agreement of {} and {}", a.bits, b.bits))
    })?;
    // the word read for one block (or one balanced pair) against the other
    let (w1, w2): (Vec<EdgeId>, Vec<EdgeId>) = if a.c1.len() == a.c2.len() {
        (a.c1.clone(), a.c2.clone())
    } else {
        ([a.c1.clone(), a.c2.clone()].concat(), [a.c2.clone(), a.c1.clone()].concat())
    };
    let edge = w1.iter().zip(&w2).find(|(p, q)| p != q).map(|(p, _)| p.clone());
    Ok(PairCertificate::new(
        edge.map(|edge| Criterion::RecurringDisagreement { edge }),
        Some(Criterion::GrowingAgreement),
        differ,
        agree,
    ))
}
