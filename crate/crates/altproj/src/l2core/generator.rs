//! Closed-form sequence generators.
//!
//! A [`GeneratorDesc`] describes an infinite square-summable sequence whose
//! entries are exact in closed form. Evaluating one at a truncation yields
//! the leading entries plus a certified bound on the discarded tail mass;
//! the descriptor also answers symbolic questions (support pattern, eventual
//! sign) that no finite numeric prefix can decide.

use serde::{Deserialize, Serialize};

use super::indexset::IndexSet;
use crate::{Error, Result};

/// Which 1-based indices a family occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    All,
    Odd,
    Even,
}

impl Parity {
    /// Index of the `m`-th class position (`m >= 1`).
    pub fn index_of(self, m: u64) -> u64 {
        match self {
            Parity::All => m,
            Parity::Odd => 2 * m - 1,
            Parity::Even => 2 * m,
        }
    }

    /// Class position of index `k`, if `k` lies in the class.
    pub fn class_position(self, k: u64) -> Option<u64> {
        match self {
            Parity::All => Some(k),
            Parity::Odd if k % 2 == 1 => Some(k.div_ceil(2)),
            Parity::Even if k.is_multiple_of(2) && k >= 2 => Some(k / 2),
            _ => None,
        }
    }

    /// Number of class positions with index at most `n`.
    pub fn count_up_to(self, n: u64) -> u64 {
        match self {
            Parity::All => n,
            Parity::Odd => n.div_ceil(2),
            Parity::Even => n / 2,
        }
    }

    fn pattern(self) -> IndexSet {
        match self {
            Parity::All => IndexSet::all(),
            Parity::Odd => IndexSet::odd(),
            Parity::Even => IndexSet::even(),
        }
    }
}

/// Sign modifier applied at class position `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    Positive,
    Negative,
    Alternating { negative_first: bool },
}

impl SignPattern {
    pub fn factor(self, m: u64) -> f64 {
        match self {
            SignPattern::Positive => 1.0,
            SignPattern::Negative => -1.0,
            SignPattern::Alternating { negative_first } => {
                let odd_position = m % 2 == 1;
                if odd_position == negative_first {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }
}

fn default_start() -> u64 {
    1
}

/// The closed-form families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "parameters", rename_all = "snake_case")]
pub enum Family {
    /// Explicit leading entries; zero beyond the list.
    FiniteList { values: Vec<f64> },
    /// `signs(m) / (m + offset)` at the `m`-th class position.
    InterleavedHarmonic {
        #[serde(default)]
        offset: u64,
        parity: Parity,
        signs: SignPattern,
    },
    /// `signs(m) * ratio^(m - start + 1)` at class positions `m >= start`.
    InterleavedGeometric {
        ratio: f64,
        parity: Parity,
        signs: SignPattern,
        #[serde(default = "default_start")]
        start: u64,
    },
    /// Pointwise linear combination of other descriptors.
    ScaledSum { terms: Vec<Term> },
}

/// One summand of a [`Family::ScaledSum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub descriptor: GeneratorDesc,
}

/// Whole-tail sign classification; `onset` is the first index from which
/// the stated sign holds for every entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventualSign {
    NonNegative { onset: u64 },
    NonPositive { onset: u64 },
    Zero { onset: u64 },
    Mixed,
}

/// A closed-form sequence: a family scaled by a positive normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDesc {
    #[serde(flatten)]
    pub family: Family,
    pub normalization: f64,
}

impl GeneratorDesc {
    pub fn finite_list<V: Into<Vec<f64>>>(values: V, normalization: f64) -> Self {
        GeneratorDesc { family: Family::FiniteList { values: values.into() }, normalization }
    }

    pub fn harmonic(offset: u64, parity: Parity, signs: SignPattern, normalization: f64) -> Self {
        GeneratorDesc {
            family: Family::InterleavedHarmonic { offset, parity, signs },
            normalization,
        }
    }

    pub fn geometric(
        ratio: f64,
        parity: Parity,
        signs: SignPattern,
        start: u64,
        normalization: f64,
    ) -> Self {
        GeneratorDesc {
            family: Family::InterleavedGeometric { ratio, parity, signs, start },
            normalization,
        }
    }

    pub fn scaled_sum<T: Into<Vec<Term>>>(terms: T, normalization: f64) -> Self {
        GeneratorDesc { family: Family::ScaledSum { terms: terms.into() }, normalization }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.normalization.is_finite() && self.normalization > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "normalization must be positive and finite, got {}",
                self.normalization
            )));
        }
        match &self.family {
            Family::FiniteList { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument(
                        "finite_list needs at least one value".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("finite_list values must be finite".into()));
                }
            }
            Family::InterleavedHarmonic { .. } => {}
            Family::InterleavedGeometric { ratio, start, .. } => {
                if !(ratio.is_finite() && ratio.abs() < 1.0 && *ratio != 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "geometric ratio must lie in (-1, 1) excluding 0, got {ratio}"
                    )));
                }
                if *start < 1 {
                    return Err(Error::InvalidArgument(
                        "geometric start must be at least 1".into(),
                    ));
                }
            }
            Family::ScaledSum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument(
                        "scaled_sum needs at least one term".into(),
                    ));
                }
                for t in terms {
                    if !t.coeff.is_finite() {
                        return Err(Error::InvalidArgument(
                            "scaled_sum coefficient must be finite".into(),
                        ));
                    }
                    t.descriptor.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Exact entry at 1-based index `k`.
    pub fn value_at(&self, k: u64) -> f64 {
        assert!(k >= 1, "indices are 1-based");
        self.normalization * self.family.raw_value_at(k)
    }

    /// Entries 1..=n; exactness is per-index, not cumulative.
    pub fn entries(&self, n: usize) -> Vec<f64> {
        let mut buf = vec![0.0; n];
        self.family.fill(&mut buf, self.normalization);
        buf
    }

    /// Certified overestimate of the l2 mass beyond index `n`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        self.normalization * self.family.raw_tail_bound(n as u64)
    }

    /// Symbolic support, exact over the whole infinite sequence, when the
    /// family shape permits one.
    pub fn support_pattern(&self) -> Option<IndexSet> {
        self.family.support_pattern()
    }

    pub fn eventual_sign(&self) -> EventualSign {
        self.family.eventual_sign()
    }

    /// Whether every entry is `>= 0`; `None` when undecidable.
    pub fn in_cone(&self) -> Option<bool> {
        self.signed_containment(1.0)
    }

    /// Whether every entry is `<= 0`; `None` when undecidable.
    pub fn in_negated_cone(&self) -> Option<bool> {
        self.signed_containment(-1.0)
    }

    fn signed_containment(&self, orientation: f64) -> Option<bool> {
        let bad = |k: u64| orientation * self.value_at(k) < 0.0;
        let probe_prefix = |end: u64| (1..end).find(|&k| bad(k));
        match self.oriented_eventual_sign(orientation) {
            EventualSign::NonNegative { onset } | EventualSign::Zero { onset } => {
                Some(probe_prefix(onset).is_none())
            }
            EventualSign::NonPositive { onset } => {
                if probe_prefix(onset).is_some() {
                    return Some(false);
                }
                // Tail is signed the wrong way; it hurts only where the
                // sequence is actually nonzero.
                let support = self.support_pattern()?;
                let tail_support = support.difference(&IndexSet::finite(1..onset));
                Some(tail_support.is_empty())
            }
            EventualSign::Mixed => {
                if probe_prefix(self.family.mixed_probe_bound() + 1).is_some() {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    fn oriented_eventual_sign(&self, orientation: f64) -> EventualSign {
        let sign = self.eventual_sign();
        if orientation >= 0.0 {
            return sign;
        }
        match sign {
            EventualSign::NonNegative { onset } => EventualSign::NonPositive { onset },
            EventualSign::NonPositive { onset } => EventualSign::NonNegative { onset },
            other => other,
        }
    }
}

impl Family {
    fn raw_value_at(&self, k: u64) -> f64 {
        match self {
            Family::FiniteList { values } => {
                if k as usize <= values.len() {
                    values[k as usize - 1]
                } else {
                    0.0
                }
            }
            Family::InterleavedHarmonic { offset, parity, signs } => match parity.class_position(k)
            {
                Some(m) => signs.factor(m) / (m + offset) as f64,
                None => 0.0,
            },
            Family::InterleavedGeometric { ratio, parity, signs, start } => {
                match parity.class_position(k) {
                    Some(m) if m >= *start => signs.factor(m) * ratio.powi((m - start + 1) as i32),
                    _ => 0.0,
                }
            }
            Family::ScaledSum { terms } => {
                terms.iter().map(|t| t.coeff * t.descriptor.value_at(k)).sum()
            }
        }
    }

    fn fill(&self, buf: &mut [f64], scale: f64) {
        let n = buf.len() as u64;
        match self {
            Family::FiniteList { values } => {
                for (i, v) in values.iter().enumerate().take(buf.len()) {
                    buf[i] += scale * v;
                }
            }
            Family::InterleavedHarmonic { offset, parity, signs } => {
                let mut m = 1u64;
                while parity.index_of(m) <= n {
                    let k = parity.index_of(m);
                    buf[k as usize - 1] += scale * signs.factor(m) / (m + offset) as f64;
                    m += 1;
                }
            }
            Family::InterleavedGeometric { ratio, parity, signs, start } => {
                let mut m = *start;
                while parity.index_of(m) <= n {
                    let k = parity.index_of(m);
                    // powi per entry, not a running product: keeps each
                    // value identical to the closed form.
                    let power = ratio.powi((m - start + 1) as i32);
                    buf[k as usize - 1] += scale * signs.factor(m) * power;
                    m += 1;
                }
            }
            Family::ScaledSum { terms } => {
                for t in terms {
                    t.descriptor.family.fill(buf, scale * t.coeff * t.descriptor.normalization);
                }
            }
        }
    }

    fn raw_tail_bound(&self, n: u64) -> f64 {
        match self {
            Family::FiniteList { values } => {
                let sq: f64 = values.iter().skip(n as usize).map(|v| v * v).sum();
                sq.sqrt()
            }
            Family::InterleavedHarmonic { offset, parity, .. } => {
                let kept = parity.count_up_to(n) + offset;
                // Integral bound: sum of 1/j^2 for j > kept is at most 1/kept.
                let sq =
                    if kept == 0 { std::f64::consts::PI.powi(2) / 6.0 } else { 1.0 / kept as f64 };
                sq.sqrt()
            }
            Family::InterleavedGeometric { ratio, parity, start, .. } => {
                let kept_positions = parity.count_up_to(n);
                let kept_powers = (kept_positions + 1).saturating_sub(*start);
                // Exact geometric remainder: sum of r^(2e) for e > kept.
                let exp = (2 * (kept_powers + 1)).min(i32::MAX as u64) as i32;
                let sq = ratio.powi(exp) / (1.0 - ratio * ratio);
                sq.sqrt()
            }
            Family::ScaledSum { terms } => {
                terms.iter().map(|t| t.coeff.abs() * t.descriptor.tail_bound(n as usize)).sum()
            }
        }
    }

    fn support_pattern(&self) -> Option<IndexSet> {
        match self {
            Family::FiniteList { values } => Some(IndexSet::finite(
                values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i as u64 + 1),
            )),
            Family::InterleavedHarmonic { parity, .. } => Some(parity.pattern()),
            Family::InterleavedGeometric { parity, start, .. } => {
                if *start == 1 {
                    Some(parity.pattern())
                } else if *parity == Parity::All {
                    Some(IndexSet::cofinite(1..*start))
                } else {
                    None
                }
            }
            Family::ScaledSum { terms } => {
                let parts: Vec<IndexSet> = terms
                    .iter()
                    .filter(|t| t.coeff != 0.0)
                    .map(|t| t.descriptor.support_pattern())
                    .collect::<Option<_>>()?;
                for (i, a) in parts.iter().enumerate() {
                    for b in &parts[i + 1..] {
                        if !a.intersect(b).is_empty() {
                            // Overlapping summands can cancel; no exact
                            // pattern without deeper reasoning.
                            return None;
                        }
                    }
                }
                Some(parts.iter().fold(IndexSet::empty(), |acc, p| acc.union(p)))
            }
        }
    }

    fn eventual_sign(&self) -> EventualSign {
        match self {
            Family::FiniteList { values } => {
                let last_nonzero = values.iter().rposition(|v| *v != 0.0);
                EventualSign::Zero { onset: last_nonzero.map_or(1, |i| i as u64 + 2) }
            }
            Family::InterleavedHarmonic { signs, offset, .. } => {
                Self::two_point_sign(|m| signs.factor(m) / (m + offset) as f64, 1)
            }
            Family::InterleavedGeometric { ratio, signs, start, .. } => Self::two_point_sign(
                |m| signs.factor(m) * ratio.powi((m - start + 1) as i32),
                *start,
            ),
            Family::ScaledSum { terms } => {
                let active: Vec<&Term> = terms.iter().filter(|t| t.coeff != 0.0).collect();
                let supports: Option<Vec<IndexSet>> =
                    active.iter().map(|t| t.descriptor.support_pattern()).collect();
                let Some(supports) = supports else {
                    return EventualSign::Mixed;
                };
                for (i, a) in supports.iter().enumerate() {
                    for b in &supports[i + 1..] {
                        if !a.intersect(b).is_empty() {
                            return EventualSign::Mixed;
                        }
                    }
                }
                let mut onset = 1u64;
                let mut tail_signs = Vec::new();
                for t in &active {
                    match t.descriptor.eventual_sign() {
                        EventualSign::Mixed => return EventualSign::Mixed,
                        EventualSign::Zero { onset: o } => onset = onset.max(o),
                        EventualSign::NonNegative { onset: o } => {
                            onset = onset.max(o);
                            tail_signs.push(t.coeff > 0.0);
                        }
                        EventualSign::NonPositive { onset: o } => {
                            onset = onset.max(o);
                            tail_signs.push(t.coeff < 0.0);
                        }
                    }
                }
                if tail_signs.is_empty() {
                    EventualSign::Zero { onset }
                } else if tail_signs.iter().all(|&p| p) {
                    EventualSign::NonNegative { onset }
                } else if tail_signs.iter().all(|&p| !p) {
                    EventualSign::NonPositive { onset }
                } else {
                    EventualSign::Mixed
                }
            }
        }
    }

    /// Class values here are nonzero and their signs are 2-periodic in the
    /// class position, so two consecutive positions decide the tail.
    fn two_point_sign<F: Fn(u64) -> f64>(value: F, start: u64) -> EventualSign {
        let a = value(start);
        let b = value(start + 1);
        if a > 0.0 && b > 0.0 {
            EventualSign::NonNegative { onset: 1 }
        } else if a < 0.0 && b < 0.0 {
            EventualSign::NonPositive { onset: 1 }
        } else {
            EventualSign::Mixed
        }
    }

    fn mixed_probe_bound(&self) -> u64 {
        match self {
            Family::FiniteList { values } => values.len() as u64,
            Family::InterleavedHarmonic { parity, .. } => parity.index_of(2),
            Family::InterleavedGeometric { parity, start, .. } => parity.index_of(start + 1),
            Family::ScaledSum { terms } => {
                8 + terms.iter().map(|t| t.descriptor.family.mixed_probe_bound()).max().unwrap_or(0)
            }
        }
    }
}
