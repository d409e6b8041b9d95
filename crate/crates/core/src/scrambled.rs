//! Uncountable scrambled sets inside `{c₁, c₂}^ℕ`, sampled.
//!
//! A point is `β^{f(J)}`: the background `α` with the positions
//! `a₁ < a₂ < …` overwritten by the bits of `f(J)`, read as blocks `c₁`
//! (bit 0) and `c₂` (bit 1) at `v`. `S′` ranges over all `J`, `S″` over
//! `J` with `j_n ∈ {2n−1, 2n}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{Bitstream, JPresentation, PeriodicBits};
use crate::chaos::ChaosVerdict;
use crate::error::{Error, Result};
use crate::path::{BinaryCoded, ClosedPath, InfinitePath, ShiftPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFamily {
    SPrime,
    SDoublePrime,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScrambledSample {
    pub family: SampleFamily,
    pub j_sets: Vec<JPresentation>,
    pub points: Vec<ShiftPoint>,
    /// Blocks of unequal length were paired up (`b ↦ b, ¬b`) so that block
    /// boundaries of different points line up.
    pub balanced: bool,
}

/// `α ≡ 0`.
pub fn default_background() -> Bitstream {
    Bitstream::Periodic(PeriodicBits::constant(false))
}

/// The point `β^{f(J)}` over the closed paths `c1`, `c2`.
pub fn coded_point(c1: &ClosedPath, c2: &ClosedPath, alpha: &Bitstream, j: &JPresentation) -> Result<ShiftPoint> {
    let mut bits = Bitstream::beta(alpha.clone(), Bitstream::f_code(j.clone()))?;
    if c1.edges.len() != c2.edges.len() {
        bits = Bitstream::balanced(bits);
    }
    Ok(ShiftPoint::Infinite(InfinitePath::BinaryCoded(BinaryCoded::new(
        c1.vertex.clone(),
        c1.edges.clone(),
        c2.edges.clone(),
        bits,
    ))))
}

/// `count` distinct members of `S′` or `S″`, reproducible from `seed`.
pub fn scrambled_set_sample(
    verdict: &ChaosVerdict,
    family: SampleFamily,
    count: usize,
    seed: u64,
    alpha: &Bitstream,
) -> Result<ScrambledSample> {
    let ChaosVerdict::Chaotic { c1, c2, .. } = verdict else {
        return Err(Error::Precondition("sampling needs two closed paths at one vertex".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut j_sets: Vec<JPresentation> = Vec::new();
    let mut attempts = 0;
    while j_sets.len() < count {
        attempts += 1;
        if attempts > 100 * (count + 10) {
            return Err(Error::Precondition("could not draw enough distinct sets".into()));
        }
        let j = match family {
            SampleFamily::SPrime => random_shifted(&mut rng),
            SampleFamily::SDoublePrime => random_selector(&mut rng),
        };
        if !j_sets.contains(&j) {
            j_sets.push(j);
        }
    }
    let points = j_sets.iter().map(|j| coded_point(c1, c2, alpha, j)).collect::<Result<_>>()?;
    Ok(ScrambledSample { family, j_sets, points, balanced: c1.edges.len() != c2.edges.len() })
}

fn random_shifted(rng: &mut ChaCha8Rng) -> JPresentation {
    let len = rng.gen_range(0..4usize);
    let mut prefix = Vec::with_capacity(len);
    let mut last = 0;
    for _ in 0..len {
        last += rng.gen_range(1..4u64);
        prefix.push(last);
    }
    let min_offset = last.saturating_sub(len as u64);
    let offset = min_offset + rng.gen_range(0..3u64);
    JPresentation::shifted(prefix, offset).expect("prefix below tail")
}

fn random_selector(rng: &mut ChaCha8Rng) -> JPresentation {
    let prefix: Vec<bool> = (0..rng.gen_range(0..4usize)).map(|_| rng.gen()).collect();
    let cycle: Vec<bool> = (0..rng.gen_range(1..5usize)).map(|_| rng.gen()).collect();
    JPresentation::selector(PeriodicBits::new(prefix, cycle).expect("nonempty cycle"))
}

/// `J_n = {j₁, …, j_n, j_{n+1}+1, j_{n+2}+1, …}` for `n = 1 … terms`;
/// `β^{f(J_n)} → β^{f(J)}`, so no point of `S′` is isolated.
pub fn non_isolation_sequence(j: &JPresentation, terms: usize) -> Result<Vec<JPresentation>> {
    let JPresentation::Shifted { prefix, offset } = j else {
        return Err(Error::Precondition("the shifted sequence leaves the selector class".into()));
    };
    (1..=terms)
        .map(|n| {
            let mut head: Vec<u64> = (1..=n as u64).map(|m| j.j(m)).collect();
            head.extend(prefix.iter().skip(n).map(|&p| p + 1));
            JPresentation::shifted(head, offset + 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify_pair;
    use crate::chaos::{decide_chaos, ChaosBounds};
    use crate::index_set::IndexSet;
    use crate::metric::Metric;
    use crate::ultragraph::fixtures::loops;

    #[test]
    fn sampled_pairs_are_scrambled() {
        let g = loops(&[("a", IndexSet::singleton(0)), ("b", IndexSet::singleton(0))]);
        let verdict = decide_chaos(&g, ChaosBounds::default());
        for family in [SampleFamily::SPrime, SampleFamily::SDoublePrime] {
            let s = scrambled_set_sample(&verdict, family, 4, 7, &default_background()).unwrap();
            for p in &s.points {
                p.validate(&g).unwrap();
            }
            for i in 0..s.points.len() {
                for k in i + 1..s.points.len() {
                    assert!(certify_pair(&g, &s.points[i], &s.points[k]).unwrap().scrambled);
                }
            }
        }
    }

    #[test]
    fn unequal_blocks_are_balanced() {
        let g = crate::ultragraph::Ultragraph::from_edge_list(2, &[(0, vec![0]), (0, vec![1]), (1, vec![0])]).unwrap();
        let verdict = decide_chaos(&g, ChaosBounds::default());
        let s = scrambled_set_sample(&verdict, SampleFamily::SDoublePrime, 3, 1, &default_background()).unwrap();
        assert!(s.balanced);
        assert!(certify_pair(&g, &s.points[0], &s.points[2]).unwrap().scrambled);
    }

    #[test]
    fn witness_sequence_converges() {
        let g = loops(&[("a", IndexSet::singleton(0)), ("b", IndexSet::singleton(0))]);
        let ChaosVerdict::Chaotic { c1, c2, .. } = decide_chaos(&g, ChaosBounds::default()) else { panic!() };
        let j = JPresentation::shifted(vec![2], 1).unwrap();
        let alpha = default_background();
        let limit = coded_point(&c1, &c2, &alpha, &j).unwrap();
        let seq: Vec<ShiftPoint> = non_isolation_sequence(&j, 10)
            .unwrap()
            .iter()
            .map(|jn| coded_point(&c1, &c2, &alpha, jn).unwrap())
            .collect();
        let mut m = Metric::new(&g).max_rank(2000);
        let rep = m.check_convergence(&seq, &limit);
        assert!(rep.converges, "{:?}", rep.agreement);
    }
}
