//! Binary sequences used to address points of `{c₁, c₂}^ℕ`.
//!
//! Positions are 1-based throughout. The constructions here are:
//!
//! * `I = {a_n}` with `a_n = Σ_{i=1}^{n} (i+1)`, the sparse positions that
//!   carry free bits;
//! * `f(J)`: alternating 0/1 blocks whose lengths run through
//!   `j₁; j₁,j₂; j₁,j₂,j₃; …`, starting with a block of zeros;
//! * `β^γ`: a fixed background `α` off `I`, with `γ_k` written at `a_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a_n = n(n+3)/2`, the `n`-th element of `I` (`n ≥ 1`).
pub fn index_set_i(n: u64) -> u64 {
    n * (n + 3) / 2
}

/// `Some(k)` when `position = a_k`.
pub fn position_in_i(position: u64) -> Option<u64> {
    if position < 2 {
        return None;
    }
    // a_k ≈ k²/2, so k ≈ sqrt(2·position)
    let mut k = ((2.0 * position as f64).sqrt() as u64).saturating_sub(2).max(1);
    while index_set_i(k) < position {
        k += 1;
    }
    (index_set_i(k) == position).then_some(k)
}

/// An eventually periodic bit sequence: `prefix` then `cycle` forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicBits {
    pub prefix: Vec<bool>,
    pub cycle: Vec<bool>,
}

impl PeriodicBits {
    pub fn new(prefix: Vec<bool>, cycle: Vec<bool>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Precondition("periodic bitstream needs a nonempty cycle".into()));
        }
        Ok(PeriodicBits { prefix, cycle }.normalized())
    }

    pub fn constant(bit: bool) -> Self {
        PeriodicBits { prefix: Vec::new(), cycle: vec![bit] }
    }

    pub fn bit(&self, i: u64) -> bool {
        let i = (i - 1) as usize;
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Minimal cycle, then shortest prefix.
    pub fn normalized(&self) -> PeriodicBits {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d]) {
                cycle.truncate(d);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().unwrap() {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        PeriodicBits { prefix, cycle }
    }

    pub fn threshold(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.cycle.len() as u64
    }
}

/// Strictly increasing infinite subsets `J = {j₁ < j₂ < …}` of `{1, 2, …}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum JPresentation {
    /// `j_n = prefix[n-1]` for `n ≤ prefix.len()`, then `j_n = n + offset`.
    Shifted { prefix: Vec<u64>, offset: u64 },
    /// `j_n = 2n − 1 + bit_n`, so that `j_n ∈ {2n−1, 2n}`.
    Selector { bits: PeriodicBits },
}

impl JPresentation {
    /// `{1, 2, 3, …}`.
    pub fn naturals() -> Self {
        JPresentation::Shifted { prefix: Vec::new(), offset: 0 }
    }

    pub fn shifted(prefix: Vec<u64>, offset: u64) -> Result<Self> {
        let j = JPresentation::Shifted { prefix, offset };
        j.validate()?;
        Ok(j.normalized())
    }

    pub fn selector(bits: PeriodicBits) -> Self {
        JPresentation::Selector { bits: bits.normalized() }
    }

    fn validate(&self) -> Result<()> {
        if let JPresentation::Shifted { prefix, offset } = self {
            let m = prefix.len() as u64;
            let mut prev = 0;
            for (i, &j) in prefix.iter().enumerate() {
                if j <= prev {
                    return Err(Error::Precondition(format!("J is not strictly increasing at position {}", i + 1)));
                }
                prev = j;
            }
            if prev >= m + 1 + offset {
                return Err(Error::Precondition("J prefix overlaps its tail rule".into()));
            }
        }
        Ok(())
    }

    fn normalized(&self) -> Self {
        match self {
            JPresentation::Shifted { prefix, offset } => {
                let mut prefix = prefix.clone();
                while let Some(&last) = prefix.last() {
                    if last == prefix.len() as u64 + offset {
                        prefix.pop();
                    } else {
                        break;
                    }
                }
                JPresentation::Shifted { prefix, offset: *offset }
            }
            JPresentation::Selector { bits } => JPresentation::Selector { bits: bits.normalized() },
        }
    }

    /// `j_n`, 1-based.
    pub fn j(&self, n: u64) -> u64 {
        match self {
            JPresentation::Shifted { prefix, offset } => {
                if n as usize <= prefix.len() {
                    prefix[n as usize - 1]
                } else {
                    n + offset
                }
            }
            JPresentation::Selector { bits } => 2 * n - 1 + u64::from(bits.bit(n)),
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        match self {
            JPresentation::Shifted { prefix, offset } => prefix.contains(&m) || m > prefix.len() as u64 + offset,
            JPresentation::Selector { .. } => m >= 1 && self.j(m.div_ceil(2)) == m,
        }
    }

    /// Smallest `n` with `j_n` different in the two presentations.
    pub fn first_difference(&self, other: &JPresentation) -> Option<u64> {
        let bound = match (self.normalized(), other.normalized()) {
            (JPresentation::Shifted { prefix: p1, offset: o1 }, JPresentation::Shifted { prefix: p2, offset: o2 }) => {
                let m = p1.len().max(p2.len()) as u64 + 1;
                if o1 == o2 {
                    m
                } else {
                    m + 1
                }
            }
            (JPresentation::Selector { bits: b1 }, JPresentation::Selector { bits: b2 }) => {
                b1.threshold().max(b2.threshold()) + crate::index_set::lcm(b1.period(), b2.period()) + 1
            }
            (JPresentation::Shifted { prefix, offset }, JPresentation::Selector { .. })
            | (JPresentation::Selector { .. }, JPresentation::Shifted { prefix, offset }) => {
                // 2n−1 > n + offset once n > offset + 1
                prefix.len() as u64 + offset + 3
            }
        };
        (1..=bound).find(|&n| self.j(n) != other.j(n))
    }

    /// Sum of the first `n` rounds of block lengths: `Σ_{i=1}^{n} (n−i+1) j_i`.
    pub fn round_length_sum(&self, n: u64) -> u64 {
        (1..=n).map(|i| (n - i + 1) * self.j(i)).sum()
    }

    /// True when `j_n ∈ {2n−1, 2n}` for all `n`. A shifted tail `n + c`
    /// eventually drops below `2n − 1`.
    pub fn in_selector_class(&self) -> bool {
        matches!(self, JPresentation::Selector { .. })
    }
}

impl PartialEq for JPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl Eq for JPresentation {}

/// A binary sequence with enough structure to answer eventual questions
/// exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bitstream {
    Periodic(PeriodicBits),
    /// Finitely many explicit bits, then `default` forever.
    Literal {
        bits: Vec<bool>,
        default: bool,
    },
    /// `f(J)`.
    FCode(JPresentation),
    /// `β^γ`: `alpha` off `I`, `gamma_k` at position `a_k`. `alpha` must be
    /// eventually periodic.
    Beta {
        alpha: Box<Bitstream>,
        gamma: Box<Bitstream>,
    },
    /// The substitution `0 ↦ 01`, `1 ↦ 10` applied to the inner stream.
    Balanced(Box<Bitstream>),
}

/// Streams the blocks of `f(J)`.
struct FCodeIter<'a> {
    j: &'a JPresentation,
    round: u64,
    step: u64,
    remaining: u64,
    bit: bool,
}

impl Iterator for FCodeIter<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        while self.remaining == 0 {
            if self.step == self.round {
                self.round += 1;
                self.step = 0;
            }
            self.step += 1;
            self.remaining = self.j.j(self.step);
            // the very first block is zeros; blocks alternate afterwards
            self.bit = !self.bit;
        }
        self.remaining -= 1;
        Some(self.bit)
    }
}

impl Bitstream {
    pub fn periodic(prefix: Vec<bool>, cycle: Vec<bool>) -> Result<Self> {
        PeriodicBits::new(prefix, cycle).map(Bitstream::Periodic)
    }

    pub fn f_code(j: JPresentation) -> Self {
        Bitstream::FCode(j)
    }

    pub fn beta(alpha: Bitstream, gamma: Bitstream) -> Result<Self> {
        if alpha.eventually_periodic().is_none() {
            return Err(Error::Precondition("β background must be eventually periodic".into()));
        }
        Ok(Bitstream::Beta { alpha: Box::new(alpha), gamma: Box::new(gamma) })
    }

    pub fn balanced(inner: Bitstream) -> Self {
        Bitstream::Balanced(Box::new(inner))
    }

    /// Lazily yields bits 1, 2, 3, ….
    pub fn iter(&self) -> Box<dyn Iterator<Item = bool> + '_> {
        match self {
            Bitstream::Periodic(p) => Box::new(p.prefix.iter().copied().chain(p.cycle.iter().copied().cycle())),
            Bitstream::Literal { bits, default } => Box::new(bits.iter().copied().chain(std::iter::repeat(*default))),
            Bitstream::FCode(j) => Box::new(FCodeIter { j, round: 0, step: 0, remaining: 0, bit: true }),
            Bitstream::Beta { alpha, gamma } => {
                let mut gamma = gamma.iter();
                Box::new(alpha.iter().enumerate().map(move |(i, a)| {
                    if position_in_i(i as u64 + 1).is_some() {
                        gamma.next().unwrap_or(a)
                    } else {
                        a
                    }
                }))
            }
            Bitstream::Balanced(inner) => Box::new(inner.iter().flat_map(|b| [b, !b])),
        }
    }

    pub fn bit(&self, i: u64) -> bool {
        match self {
            Bitstream::Periodic(p) => p.bit(i),
            Bitstream::Literal { bits, default } => bits.get(i as usize - 1).copied().unwrap_or(*default),
            Bitstream::Beta { alpha, gamma } => match position_in_i(i) {
                Some(k) => gamma.bit(k),
                None => alpha.bit(i),
            },
            Bitstream::Balanced(inner) => {
                let b = inner.bit(i.div_ceil(2));
                if i % 2 == 1 {
                    b
                } else {
                    !b
                }
            }
            Bitstream::FCode(_) => self.iter().nth(i as usize - 1).unwrap(),
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<bool> {
        self.iter().take(n).collect()
    }

    /// The eventually periodic form, when the stream has one.
    pub fn eventually_periodic(&self) -> Option<PeriodicBits> {
        match self {
            Bitstream::Periodic(p) => Some(p.normalized()),
            Bitstream::Literal { bits, default } => {
                Some(PeriodicBits { prefix: bits.clone(), cycle: vec![*default] }.normalized())
            }
            // runs of zeros of unbounded length alternate with ones
            Bitstream::FCode(_) => None,
            Bitstream::Beta { alpha, gamma } => {
                // β is eventually periodic iff γ_k = α_{a_k} for all large k:
                // otherwise β and α differ on an infinite subset of I, which
                // has unbounded gaps and so cannot be eventually periodic.
                let alpha_p = alpha.eventually_periodic()?;
                let gamma_p = gamma.eventually_periodic()?;
                let k0 = (1..).find(|&k| index_set_i(k) > alpha_p.threshold()).unwrap();
                let k0 = k0.max(gamma_p.threshold() + 1);
                // a_k mod P is periodic in k with period dividing 2P
                let span = 2 * alpha_p.period() * gamma_p.period();
                let agree = (k0..k0 + span).all(|k| gamma_p.bit(k) == alpha_p.bit(index_set_i(k)));
                if !agree {
                    return None;
                }
                let last_i = index_set_i(k0);
                let prefix: Vec<bool> = (1..=last_i).map(|i| self.bit(i)).collect();
                let start = last_i + 1;
                let cycle: Vec<bool> = (start..start + alpha_p.period()).map(|i| alpha_p.bit(i)).collect();
                Some(PeriodicBits { prefix, cycle }.normalized())
            }
            Bitstream::Balanced(inner) => {
                let p = inner.eventually_periodic()?;
                let expand = |v: &[bool]| v.iter().flat_map(|&b| [b, !b]).collect::<Vec<_>>();
                Some(PeriodicBits { prefix: expand(&p.prefix), cycle: expand(&p.cycle) }.normalized())
            }
        }
    }

    /// Whether the two streams differ at infinitely many positions.
    /// `None` when the combination is not covered by an exact rule.
    pub fn differ_infinitely(&self, other: &Bitstream) -> Option<bool> {
        match (self.eventually_periodic(), other.eventually_periodic()) {
            (Some(a), Some(b)) => return Some(periodic_disagreement(&a, &b).is_some()),
            (Some(_), None) | (None, Some(_)) => return Some(true),
            (None, None) => {}
        }
        match (self, other) {
            (Bitstream::FCode(j1), Bitstream::FCode(j2)) => Some(j1 != j2),
            (Bitstream::Beta { alpha: a1, gamma: g1 }, Bitstream::Beta { alpha: a2, gamma: g2 }) => {
                if background_differs(a1, a2)? {
                    Some(true)
                } else {
                    g1.differ_infinitely(g2)
                }
            }
            (Bitstream::Balanced(a), Bitstream::Balanced(b)) => a.differ_infinitely(b),
            _ => None,
        }
    }

    /// Whether the streams agree on windows of every length (at equal
    /// positions). `None` when no exact rule applies.
    pub fn unbounded_agreement(&self, other: &Bitstream) -> Option<bool> {
        match (self.eventually_periodic(), other.eventually_periodic()) {
            (Some(a), Some(b)) => return Some(periodic_disagreement(&a, &b).is_none()),
            (Some(p), None) | (None, Some(p)) => {
                let q = if self.eventually_periodic().is_some() { other } else { self };
                return match q {
                    Bitstream::Beta { alpha, .. } => background_differs(alpha, &Bitstream::Periodic(p)).map(|d| !d),
                    Bitstream::FCode(_) if p.cycle.len() == 1 => Some(true),
                    _ => None,
                };
            }
            (None, None) => {}
        }
        match (self, other) {
            (Bitstream::FCode(j1), Bitstream::FCode(j2)) if j1 == j2 => Some(true),
            (Bitstream::Beta { alpha: a1, .. }, Bitstream::Beta { alpha: a2, .. }) => {
                background_differs(a1, a2).map(|d| !d)
            }
            (Bitstream::Balanced(a), Bitstream::Balanced(b)) => a.unbounded_agreement(b),
            _ => None,
        }
    }

    /// Decides equality of the two sequences where an exact rule applies,
    /// falling back to comparing the first `horizon` bits (a difference
    /// there settles inequality).
    pub fn decide_equal(&self, other: &Bitstream, horizon: usize) -> Option<bool> {
        if let (Some(a), Some(b)) = (self.eventually_periodic(), other.eventually_periodic()) {
            return Some(a == b);
        }
        if self.iter().zip(other.iter()).take(horizon).any(|(a, b)| a != b) {
            return Some(false);
        }
        match self.differ_infinitely(other) {
            Some(true) => Some(false),
            _ => match (self, other) {
                (Bitstream::FCode(j1), Bitstream::FCode(j2)) => Some(j1 == j2),
                (Bitstream::Beta { alpha: a1, gamma: g1 }, Bitstream::Beta { alpha: a2, gamma: g2 }) => {
                    // Equal iff backgrounds agree off I and the γ's agree.
                    if off_i_equal(a1, a2)? {
                        g1.decide_equal(g2, horizon)
                    } else {
                        Some(false)
                    }
                }
                (Bitstream::Balanced(a), Bitstream::Balanced(b)) => a.decide_equal(b, horizon),
                _ => None,
            },
        }
    }
}

/// A position past both thresholds where eventually periodic streams
/// differ, if any.
fn periodic_disagreement(a: &PeriodicBits, b: &PeriodicBits) -> Option<u64> {
    let start = a.threshold().max(b.threshold()) + 1;
    let span = crate::index_set::lcm(a.period(), b.period());
    (start..start + span).find(|&i| a.bit(i) != b.bit(i))
}

/// Whether two eventually periodic backgrounds disagree at infinitely many
/// positions outside `I`. An infinite eventually periodic disagreement set
/// has bounded gaps, so it always meets the complement of `I` infinitely
/// often; the question reduces to eventual inequality.
fn background_differs(a: &Bitstream, b: &Bitstream) -> Option<bool> {
    let (a, b) = (a.eventually_periodic()?, b.eventually_periodic()?);
    Some(periodic_disagreement(&a, &b).is_some())
}

/// Exact agreement of two eventually periodic backgrounds on every position
/// outside `I`.
fn off_i_equal(a: &Bitstream, b: &Bitstream) -> Option<bool> {
    let (a, b) = (a.eventually_periodic()?, b.eventually_periodic()?);
    if periodic_disagreement(&a, &b).is_some() {
        return Some(false);
    }
    let tail = a.threshold().max(b.threshold()) + 1;
    Some((1..tail).filter(|&i| position_in_i(i).is_none()).all(|i| a.bit(i) == b.bit(i)))
}

impl fmt::Display for PeriodicBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str("(")?;
        for &b in &self.cycle {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for JPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JPresentation::Shifted { prefix, offset } => {
                let items: Vec<String> = prefix.iter().map(u64::to_string).collect();
                write!(f, "shift[{}]+{}", items.join(","), offset)
            }
            JPresentation::Selector { bits } => write!(f, "sel{{{bits}}}"),
        }
    }
}

impl fmt::Display for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bitstream::Periodic(p) => write!(f, "{p}"),
            Bitstream::Literal { bits, default } => {
                let p = PeriodicBits { prefix: bits.clone(), cycle: vec![*default] };
                write!(f, "{p}")
            }
            Bitstream::FCode(j) => write!(f, "f{{{j}}}"),
            Bitstream::Beta { alpha, gamma } => write!(f, "beta{{{alpha};{gamma}}}"),
            Bitstream::Balanced(inner) => write!(f, "bal{{{inner}}}"),
        }
    }
}

/// Outcome of checking the agreement-length biconditional for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgreementCheck {
    /// `Σ_{i=1}^{n} (n−i+1) j¹_i`.
    pub length: u64,
    /// `f(J₁)` and `f(J₂)` agree on the first `length` bits.
    pub prefixes_agree: bool,
    /// `j¹_i = j²_i` for all `i ≤ n`.
    pub leading_terms_agree: bool,
    /// `j¹_i = j²_i` for all `i < n`, and `j¹_n ≤ j²_n`.
    pub leading_terms_dominated: bool,
}

impl AgreementCheck {
    /// The biconditional with equality of all `n` leading terms on the
    /// right. It fails when the first difference sits at `n` with
    /// `j¹_n < j²_n`: the shorter final block is then still a common prefix.
    pub fn holds(&self) -> bool {
        self.prefixes_agree == self.leading_terms_agree
    }

    /// The biconditional with the right-hand side weakened to
    /// `leading_terms_dominated`, which is exact.
    pub fn refined_holds(&self) -> bool {
        self.prefixes_agree == self.leading_terms_dominated
    }

    pub fn is_counterexample(&self) -> bool {
        !self.holds()
    }
}

/// Checks that `f(J₁)`, `f(J₂)` agree on their first `Σ (n−i+1) j¹_i` bits
/// exactly when the first `n` terms of `J₁` and `J₂` coincide.
pub fn agreement_length_check(j1: &JPresentation, j2: &JPresentation, n: u64) -> AgreementCheck {
    let length = j1.round_length_sum(n);
    let f1 = Bitstream::FCode(j1.clone());
    let f2 = Bitstream::FCode(j2.clone());
    let prefixes_agree = f1.iter().zip(f2.iter()).take(length as usize).all(|(a, b)| a == b);
    let leading_terms_agree = (1..=n).all(|i| j1.j(i) == j2.j(i));
    let leading_terms_dominated = (1..n).all(|i| j1.j(i) == j2.j(i)) && j1.j(n) <= j2.j(n);
    AgreementCheck { length, prefixes_agree, leading_terms_agree, leading_terms_dominated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn render(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Direct transcription of the block layout: round r contributes blocks
    /// of lengths j_1..j_r, blocks alternate starting from zeros.
    fn f_oracle(j: impl Fn(u64) -> u64, len: usize) -> Vec<bool> {
        let mut out = Vec::new();
        let mut bit = false;
        let mut round = 1;
        while out.len() < len {
            for i in 1..=round {
                out.extend(std::iter::repeat_n(bit, j(i) as usize));
                bit = !bit;
            }
            round += 1;
        }
        out.truncate(len);
        out
    }

    #[test]
    fn i_positions() {
        assert_eq!(index_set_i(1), 2);
        assert_eq!((2..=4).map(index_set_i).collect::<Vec<_>>(), vec![5, 9, 14]);
        for n in 2..50 {
            assert_eq!(index_set_i(n), index_set_i(n - 1) + n + 1);
        }
        let complement: Vec<u64> = (1..=28).filter(|&m| position_in_i(m).is_none()).collect();
        assert_eq!(complement, vec![1, 3, 4, 6, 7, 8, 10, 11, 12, 13, 15, 16, 17, 18, 19, 21, 22, 23, 24, 25, 26, 28]);
        assert_eq!(position_in_i(9), Some(3));
        assert_eq!(position_in_i(10), None);
    }

    #[test]
    fn f_code_of_naturals() {
        let f = Bitstream::f_code(JPresentation::naturals());
        assert_eq!(render(&f.prefix(20)), "01001001110110001111");
        assert_eq!(f.prefix(200), f_oracle(|n| n, 200));
        assert_eq!(f.bit(17), f_oracle(|n| n, 20)[16]);
    }

    #[test]
    fn f_code_segments() {
        let with_one = Bitstream::f_code(JPresentation::shifted(vec![1, 3], 2).unwrap());
        let s = render(&with_one.prefix(500));
        assert!(s.matches("010").count() >= 5);
        assert!(s.contains("101"));
        let without_one = Bitstream::f_code(JPresentation::shifted(vec![2, 3], 1).unwrap());
        let s = render(&without_one.prefix(500));
        assert!(!s.contains("010"));
        assert!(!s.contains("101"));
    }

    #[test]
    fn beta_positions() {
        let alpha = Bitstream::periodic(vec![], vec![true]).unwrap();
        let gamma = Bitstream::periodic(vec![], vec![false]).unwrap();
        let b = Bitstream::beta(alpha, gamma).unwrap();
        for i in 1..200 {
            assert_eq!(b.bit(i), position_in_i(i).is_none());
        }
        let gamma = Bitstream::Literal { bits: vec![false, false, true], default: false };
        let b = Bitstream::beta(Bitstream::periodic(vec![], vec![false]).unwrap(), gamma).unwrap();
        assert!(b.bit(index_set_i(3)));
        assert_eq!(b.iter().take(30).filter(|&x| x).count(), 1);
    }

    #[test]
    fn agreement_lengths() {
        let n = JPresentation::naturals();
        assert_eq!(n.round_length_sum(3), 10);
        assert!(agreement_length_check(&n, &n, 5).holds());
        let other = JPresentation::shifted(vec![1, 2], 1).unwrap();
        let c = agreement_length_check(&n, &other, 2);
        assert_eq!(c.length, 4);
        assert!(c.prefixes_agree && c.leading_terms_agree);
        // {1,2,3,…} and {1,2,4,…} share the first 10 bits and split at 11
        let f1 = Bitstream::f_code(n.clone()).prefix(11);
        let f2 = Bitstream::f_code(other.clone()).prefix(11);
        assert_eq!(f1[..10], f2[..10]);
        assert_ne!(f1[10], f2[10]);
        let c = agreement_length_check(&n, &other, 3);
        assert!(c.prefixes_agree && !c.leading_terms_agree);
        assert!(!c.holds() && c.refined_holds());
        assert!(agreement_length_check(&other, &n, 3).holds());
        let late = JPresentation::shifted(vec![], 1).unwrap();
        let c = agreement_length_check(&n, &late, 1);
        assert!(c.is_counterexample() && c.refined_holds());
    }

    #[test]
    fn j_presentations() {
        let sel = JPresentation::selector(PeriodicBits::new(vec![true], vec![false]).unwrap());
        assert_eq!((1..=4).map(|n| sel.j(n)).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!(sel.contains(5) && !sel.contains(4));
        assert!(JPresentation::shifted(vec![3, 2], 0).is_err());
        assert_eq!(JPresentation::shifted(vec![1, 2], 0).unwrap(), JPresentation::naturals());
        assert_ne!(sel, JPresentation::naturals());
        assert_eq!(sel.first_difference(&JPresentation::naturals()), Some(1));
    }

    #[test]
    fn eventual_structure() {
        assert!(Bitstream::f_code(JPresentation::naturals()).eventually_periodic().is_none());
        let alpha = Bitstream::periodic(vec![], vec![false]).unwrap();
        let fixed = Bitstream::beta(alpha.clone(), Bitstream::periodic(vec![true], vec![false]).unwrap()).unwrap();
        let p = fixed.eventually_periodic().unwrap();
        for i in 1..100 {
            assert_eq!(p.bit(i), fixed.bit(i));
        }
        let moving = Bitstream::beta(alpha, Bitstream::periodic(vec![], vec![true, false]).unwrap()).unwrap();
        assert!(moving.eventually_periodic().is_none());
    }

    fn arb_j() -> impl Strategy<Value = JPresentation> {
        prop_oneof![
            (proptest::collection::vec(1u64..4, 0..4), 0u64..4).prop_map(|(steps, offset)| {
                let mut acc = 0;
                let prefix: Vec<u64> = steps
                    .iter()
                    .map(|s| {
                        acc += s;
                        acc
                    })
                    .collect();
                let floor = prefix.last().copied().unwrap_or(0);
                let offset = offset.max(floor.saturating_sub(prefix.len() as u64));
                JPresentation::shifted(prefix, offset).unwrap()
            }),
            (proptest::collection::vec(any::<bool>(), 0..4), proptest::collection::vec(any::<bool>(), 1..4))
                .prop_map(|(p, c)| JPresentation::selector(PeriodicBits::new(p, c).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn f_matches_oracle(j in arb_j()) {
            let f = Bitstream::f_code(j.clone()).prefix(300);
            prop_assert_eq!(f, f_oracle(|n| j.j(n), 300));
        }

        #[test]
        fn agreement_biconditional(j1 in arb_j(), j2 in arb_j(), n in 1u64..9) {
            let c = agreement_length_check(&j1, &j2, n);
            prop_assert!(c.refined_holds());
            if j1.j(n) >= j2.j(n) || (1..n).any(|i| j1.j(i) != j2.j(i)) {
                prop_assert!(c.holds());
            }
        }

        #[test]
        fn distinct_j_differ_often(j1 in arb_j(), j2 in arb_j()) {
            let f1 = Bitstream::f_code(j1.clone());
            let f2 = Bitstream::f_code(j2.clone());
            prop_assert_eq!(f1.differ_infinitely(&f2), Some(j1 != j2));
            if j1 != j2 {
                let diffs = f1.iter().zip(f2.iter()).take(3000).filter(|(a, b)| a != b).count();
                prop_assert!(diffs >= 3);
            }
        }

        #[test]
        fn periodic_normalization_preserves_bits(p in proptest::collection::vec(any::<bool>(), 0..6), c in proptest::collection::vec(any::<bool>(), 1..6)) {
            let raw = PeriodicBits { prefix: p, cycle: c };
            let norm = raw.normalized();
            for i in 1..60 {
                prop_assert_eq!(raw.bit(i), norm.bit(i));
            }
        }
    }
}
