//! Deciding Li–Yorke chaos: the shift is chaotic iff some vertex has at
//! least two closed paths.

use serde::Serialize;

use crate::closed_paths::{cp_at_least_two, CpDecision};
use crate::path::ClosedPath;
use crate::ultragraph::{Grading, Ultragraph};
use crate::vertex_set::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChaosBounds {
    pub length_bound: usize,
    pub index_bound: u64,
    /// Coefficient range searched for affine gradings.
    pub grading_bound: i64,
}

impl Default for ChaosBounds {
    fn default() -> Self {
        ChaosBounds { length_bound: 20, index_bound: 50, grading_bound: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotChaoticCertificate {
    /// Finite ultragraph; every vertex has fewer than two closed paths.
    FiniteExhaustive,
    /// Levels strictly increase along every edge, so no path returns.
    Grading { grading: Grading },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ChaosVerdict {
    Chaotic { vertex: VertexId, c1: ClosedPath, c2: ClosedPath },
    NotChaotic { certificate: NotChaoticCertificate },
    Unknown { bounds: ChaosBounds },
}

impl ChaosVerdict {
    pub fn is_chaotic(&self) -> bool {
        matches!(self, ChaosVerdict::Chaotic { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ChaosVerdict::Chaotic { .. } => "Chaotic",
            ChaosVerdict::NotChaotic { .. } => "NotChaotic",
            ChaosVerdict::Unknown { .. } => "Unknown",
        }
    }
}

pub fn decide_chaos(g: &Ultragraph, bounds: ChaosBounds) -> ChaosVerdict {
    if g.is_finite() {
        for v in g.all_vertices().vertices_below(u64::MAX) {
            if let CpDecision::Yes { c1, c2 } = cp_at_least_two(g, &v, bounds.length_bound, bounds.index_bound) {
                return ChaosVerdict::Chaotic { vertex: v, c1, c2 };
            }
        }
        return ChaosVerdict::NotChaotic { certificate: NotChaoticCertificate::FiniteExhaustive };
    }
    if let Some(grading) = g.find_grading(bounds.grading_bound) {
        return ChaosVerdict::NotChaotic { certificate: NotChaoticCertificate::Grading { grading } };
    }
    for v in g.all_vertices().vertices_below(bounds.index_bound) {
        if let CpDecision::Yes { c1, c2 } = cp_at_least_two(g, &v, bounds.length_bound, bounds.index_bound) {
            return ChaosVerdict::Chaotic { vertex: v, c1, c2 };
        }
    }
    ChaosVerdict::Unknown { bounds }
}
