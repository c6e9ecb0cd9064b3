//! Support-level analyzers: pairwise disjointness, the finite-overlap
//! signed hypothesis, and the V/I/Z/N/P index partition for two-vector
//! bases.

use serde::Serialize;

use crate::l2core::{EventualSign, IndexSet, SeqVec};
use crate::projections::Basis;
use crate::tol::CONE_ENTRY_SLACK;
use crate::{Error, Result};

/// Support intersection of one pair of vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapEntry {
    pub first: usize,
    pub second: usize,
    pub overlap: IndexSet,
}

/// Outcome of the pairwise disjointness check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointReport {
    pub disjoint: bool,
    /// One entry per unordered pair, in (first, second) lexicographic order.
    pub overlaps: Vec<OverlapEntry>,
}

/// Constant sign of a vector's entries from some onset onward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSign {
    NonNegative,
    NonPositive,
}

/// Outcome of the finite-overlap signed-vector check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignedVerdict {
    /// Every vector except `signed_index` lies in the cone; the remaining
    /// one has constant sign from `onset` onward and finite support
    /// overlap with each of the others.
    Holds { signed_index: usize, sign: TailSign, onset: u64 },
    /// The hypothesis is definitively violated.
    Fails { reason: String },
    /// The truncated data cannot settle the question either way.
    Inconclusive { reason: String },
}

/// Index partition induced by a cone vector and a signed companion.
///
/// `v` holds the cone vector's exclusive support, `i` the shared support,
/// `z` the indices outside both supports, and `n` / `p` split the signed
/// vector's exclusive support by entry sign. Sets are exact symbolic
/// patterns when the generators admit them; when the signed vector changes
/// sign infinitely often, `n` and `p` fall back to explicit sets bounded
/// by the truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionViznp {
    #[serde(rename = "V")]
    pub v: IndexSet,
    #[serde(rename = "I")]
    pub i: IndexSet,
    #[serde(rename = "Z")]
    pub z: IndexSet,
    #[serde(rename = "N")]
    pub n: IndexSet,
    #[serde(rename = "P")]
    pub p: IndexSet,
}

impl PartitionViznp {
    /// Exactly one of the five sets contains `k`.
    pub fn classifies_uniquely(&self, k: u64) -> bool {
        let hits =
            [&self.v, &self.i, &self.z, &self.n, &self.p].iter().filter(|s| s.contains(k)).count();
        hits == 1
    }
}

/// Pairwise support overlaps of an arbitrary vector collection.
///
/// Symbolic supports are used where available; numeric supports threshold
/// stored entries at `eps`.
pub fn support_overlaps(vectors: &[SeqVec], eps: f64) -> Vec<OverlapEntry> {
    let supports: Vec<IndexSet> = vectors.iter().map(|v| v.support(eps)).collect();
    let mut overlaps = Vec::new();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            overlaps.push(OverlapEntry {
                first: i,
                second: j,
                overlap: supports[i].intersect(&supports[j]),
            });
        }
    }
    overlaps
}

/// Whether all basis vectors have pairwise disjoint supports.
pub fn check_pairwise_disjoint(basis: &Basis, eps_supp: f64) -> DisjointReport {
    let overlaps = support_overlaps(basis.vectors(), eps_supp);
    DisjointReport { disjoint: overlaps.iter().all(|o| o.overlap.is_empty()), overlaps }
}

/// Cone membership of one basis vector: symbolic via the generator when
/// present, otherwise decided from stored entries (only certain when the
/// tail bound is zero).
fn cone_status(vec: &SeqVec) -> Option<bool> {
    if let Some(desc) = vec.origin() {
        return desc.in_cone();
    }
    if vec.as_slice().iter().any(|e| *e < -CONE_ENTRY_SLACK) {
        return Some(false);
    }
    if vec.tail_bound() == 0.0 {
        Some(true)
    } else {
        None
    }
}

/// Check that all vectors but one lie in the cone, the remaining one is
/// definitively signed from some onset onward, and its support overlaps
/// the others only finitely.
pub fn check_finite_intersection_signed(basis: &Basis) -> SignedVerdict {
    let flags: Vec<Option<bool>> = basis.vectors().iter().map(cone_status).collect();
    if let Some(i) = flags.iter().position(|f| f.is_none()) {
        return SignedVerdict::Inconclusive {
            reason: format!("cone membership of vector {i} is undecidable from truncated data"),
        };
    }
    let outside: Vec<usize> =
        flags.iter().enumerate().filter(|(_, f)| **f == Some(false)).map(|(i, _)| i).collect();
    let (signed_index, sign, onset) = match outside.as_slice() {
        [] => (basis.len() - 1, TailSign::NonNegative, 1),
        [s] => {
            let Some(desc) = basis.descriptor(*s) else {
                return SignedVerdict::Inconclusive {
                    reason: format!(
                        "vector {s} has no symbolic description to certify its tail sign"
                    ),
                };
            };
            match desc.eventual_sign() {
                EventualSign::NonNegative { onset } | EventualSign::Zero { onset } => {
                    (*s, TailSign::NonNegative, onset)
                }
                EventualSign::NonPositive { onset } => (*s, TailSign::NonPositive, onset),
                EventualSign::Mixed => {
                    return SignedVerdict::Fails {
                        reason: format!("vector {s} changes sign beyond every index"),
                    };
                }
            }
        }
        more => {
            return SignedVerdict::Fails {
                reason: format!("vectors {:?} all leave the cone; at most one may", more),
            };
        }
    };

    // Overlap finiteness is a whole-sequence claim, so it needs exact
    // supports on both sides of every pair involving the signed vector.
    let Some(signed_supp) = exact_support(basis, signed_index) else {
        return SignedVerdict::Inconclusive {
            reason: format!("vector {signed_index} has no exact support pattern"),
        };
    };
    for i in 0..basis.len() {
        if i == signed_index {
            continue;
        }
        let Some(supp) = exact_support(basis, i) else {
            return SignedVerdict::Inconclusive {
                reason: format!("vector {i} has no exact support pattern"),
            };
        };
        if !supp.intersect(&signed_supp).is_finite() {
            return SignedVerdict::Fails {
                reason: format!(
                    "supports of vectors {i} and {signed_index} share infinitely many indices"
                ),
            };
        }
    }
    SignedVerdict::Holds { signed_index, sign, onset }
}

/// Whole-sequence support: the symbolic pattern when available, or the
/// numeric support when a zero tail bound makes it exact.
fn exact_support(basis: &Basis, i: usize) -> Option<IndexSet> {
    let vec = basis.vector(i);
    if let Some(pattern) = basis.descriptor(i).and_then(|d| d.support_pattern()) {
        return Some(pattern);
    }
    (vec.tail_bound() == 0.0).then(|| vec.support(CONE_ENTRY_SLACK))
}

/// Partition the index line by the supports and signs of a two-vector
/// basis: one vector must lie in the cone (it supplies `V` and part of
/// `I`), the other supplies the signed split `N` / `P`.
pub fn partition_vizinp(basis: &Basis) -> Result<PartitionViznp> {
    if basis.len() != 2 {
        return Err(Error::Unsupported(format!(
            "partition is defined for exactly two vectors, got {}",
            basis.len()
        )));
    }
    let flags = [cone_status(basis.vector(0)), cone_status(basis.vector(1))];
    let (cone_idx, signed_idx) = match flags {
        [Some(true), _] => (0, 1),
        [_, Some(true)] => (1, 0),
        [Some(false), Some(false)] => {
            return Err(Error::PreconditionViolated(
                "partition requires one vector inside the cone".into(),
            ));
        }
        _ => {
            return Err(Error::PreconditionViolated(
                "cone membership undecidable from truncated data".into(),
            ));
        }
    };

    let eps = CONE_ENTRY_SLACK;
    let s_cone = basis.vector(cone_idx).support(eps);
    let s_signed = basis.vector(signed_idx).support(eps);
    let v = s_cone.difference(&s_signed);
    let i = s_cone.intersect(&s_signed);
    let z = s_cone.union(&s_signed).complement();
    let exclusive = s_signed.difference(&s_cone);

    let signed_vec = basis.vector(signed_idx);
    let truncation = basis.truncation() as u64;
    let eventual =
        basis.descriptor(signed_idx).map(|d| d.eventual_sign()).unwrap_or(EventualSign::Mixed);
    let (n, p) = match eventual {
        EventualSign::NonNegative { onset } | EventualSign::Zero { onset } => {
            split_with_tail(&exclusive, signed_vec, onset, true)
        }
        EventualSign::NonPositive { onset } => {
            split_with_tail(&exclusive, signed_vec, onset, false)
        }
        EventualSign::Mixed => {
            // No constant tail sign: enumerate up to the truncation.
            let mut neg = Vec::new();
            let mut pos = Vec::new();
            for k in exclusive.members_up_to(truncation) {
                if signed_vec.entry(k) < 0.0 {
                    neg.push(k);
                } else {
                    pos.push(k);
                }
            }
            (IndexSet::finite(neg), IndexSet::finite(pos))
        }
    };
    Ok(PartitionViznp { v, i, z, n, p })
}

/// Split `exclusive` into (negative, positive) parts when the signed
/// vector has constant sign from `onset` onward: the tail goes wholesale
/// to one side, prefix members are classified entry by entry.
fn split_with_tail(
    exclusive: &IndexSet,
    signed_vec: &SeqVec,
    onset: u64,
    tail_nonneg: bool,
) -> (IndexSet, IndexSet) {
    let tail = if onset <= 1 {
        exclusive.clone()
    } else {
        exclusive.difference(&IndexSet::finite(1..onset))
    };
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    if onset > 1 {
        for k in exclusive.intersect(&IndexSet::finite(1..onset)).members_up_to(onset - 1) {
            if signed_vec.entry(k) < 0.0 {
                neg.push(k);
            } else {
                pos.push(k);
            }
        }
    }
    if tail_nonneg {
        (IndexSet::finite(neg), tail.union(&IndexSet::finite(pos)))
    } else {
        (tail.union(&IndexSet::finite(neg)), IndexSet::finite(pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2core::{GeneratorDesc, Parity, SignPattern};

    fn harmonic_pair(n: usize) -> Basis {
        let norm = (6.0f64 / (std::f64::consts::PI * std::f64::consts::PI)).sqrt();
        Basis::from_generators(
            &[
                GeneratorDesc::harmonic(0, Parity::Odd, SignPattern::Positive, norm),
                GeneratorDesc::harmonic(
                    0,
                    Parity::Even,
                    SignPattern::Alternating { negative_first: false },
                    norm,
                ),
            ],
            n,
        )
        .unwrap()
    }

    fn signed_pair(n: usize) -> Basis {
        let half = GeneratorDesc::finite_list([1.0, 1.0], 0.5f64.sqrt());
        let tail = GeneratorDesc::scaled_sum(
            vec![
                crate::l2core::Term {
                    coeff: 1.0,
                    descriptor: GeneratorDesc::finite_list([1.0, -1.0], 1.0),
                },
                crate::l2core::Term {
                    coeff: 1.0,
                    descriptor: GeneratorDesc::geometric(
                        0.5,
                        Parity::All,
                        SignPattern::Positive,
                        3,
                        1.0,
                    ),
                },
            ],
            (3.0f64 / 7.0).sqrt(),
        );
        Basis::from_generators(&[half, tail], n).unwrap()
    }

    fn unit_pair(n: usize) -> Basis {
        Basis::orthonormal(vec![SeqVec::unit(n, 1).unwrap(), SeqVec::unit(n, 2).unwrap()]).unwrap()
    }

    #[test]
    fn interleaved_harmonic_supports_are_disjoint() {
        let report = check_pairwise_disjoint(&harmonic_pair(101), 1e-12);
        assert!(report.disjoint);
        assert_eq!(report.overlaps.len(), 1);
        assert!(report.overlaps[0].overlap.is_empty());
    }

    #[test]
    fn signed_pair_overlaps_in_first_two_indices() {
        let report = check_pairwise_disjoint(&signed_pair(64), 1e-12);
        assert!(!report.disjoint);
        assert_eq!(report.overlaps[0].overlap.as_finite(), Some(vec![1, 2]));
    }

    #[test]
    fn raw_overlap_of_unit_and_mixture() {
        // Not an orthonormal pair, so probe the free function directly.
        let e1 = SeqVec::unit(4, 1).unwrap();
        let mix = SeqVec::from_entries(vec![0.5f64.sqrt(), 0.5f64.sqrt(), 0.0, 0.0]);
        let overlaps = support_overlaps(&[e1, mix], 1e-12);
        assert_eq!(overlaps[0].overlap.as_finite(), Some(vec![1]));
    }

    #[test]
    fn signed_pair_satisfies_signed_hypothesis() {
        match check_finite_intersection_signed(&signed_pair(64)) {
            SignedVerdict::Holds { signed_index, sign, onset } => {
                assert_eq!(signed_index, 1);
                assert_eq!(sign, TailSign::NonNegative);
                assert_eq!(onset, 3);
            }
            other => panic!("expected Holds, got {other:?}"),
        }
    }

    #[test]
    fn alternating_companion_fails_signed_hypothesis() {
        match check_finite_intersection_signed(&harmonic_pair(101)) {
            SignedVerdict::Fails { reason } => assert!(reason.contains("sign")),
            other => panic!("expected Fails, got {other:?}"),
        }
    }

    #[test]
    fn cone_pair_holds_trivially() {
        match check_finite_intersection_signed(&unit_pair(8)) {
            SignedVerdict::Holds { signed_index, sign, onset } => {
                assert_eq!(signed_index, 1);
                assert_eq!(sign, TailSign::NonNegative);
                assert_eq!(onset, 1);
            }
            other => panic!("expected Holds, got {other:?}"),
        }
    }

    #[test]
    fn numeric_vectors_are_inconclusive() {
        let b = Basis::orthonormal(vec![
            SeqVec::from_entries(vec![1.0, 0.0]),
            SeqVec::from_entries(vec![0.0, -1.0]),
        ])
        .unwrap();
        match check_finite_intersection_signed(&b) {
            SignedVerdict::Inconclusive { reason } => assert!(reason.contains("symbolic")),
            other => panic!("expected Inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn partition_of_signed_pair_is_fully_symbolic() {
        let part = partition_vizinp(&signed_pair(64)).unwrap();
        assert!(part.v.is_empty());
        assert_eq!(part.i.as_finite(), Some(vec![1, 2]));
        assert!(part.z.is_empty());
        assert!(part.n.is_empty());
        assert_eq!(part.p, IndexSet::cofinite([1, 2]));
    }

    #[test]
    fn partition_of_harmonic_pair_splits_evens_by_alternating_sign() {
        let part = partition_vizinp(&harmonic_pair(100)).unwrap();
        assert_eq!(part.v, IndexSet::odd());
        assert!(part.i.is_empty());
        assert!(part.z.is_empty());
        // Even class positions alternate +, -, +, ...: index 2 is positive,
        // index 4 negative, and so on with period 4.
        for k in [2u64, 6, 10, 94] {
            assert!(part.p.contains(k), "index {k} should be positive");
        }
        for k in [4u64, 8, 12, 96] {
            assert!(part.n.contains(k), "index {k} should be negative");
        }
    }

    #[test]
    fn partition_of_unit_pair_matches_hand_count() {
        let part = partition_vizinp(&unit_pair(8)).unwrap();
        assert_eq!(part.v.as_finite(), Some(vec![1]));
        assert!(part.i.is_empty());
        assert_eq!(part.p.as_finite(), Some(vec![2]));
        assert!(part.n.is_empty());
        assert_eq!(part.z, IndexSet::cofinite([1, 2]));
    }

    #[test]
    fn partition_classifies_every_index_exactly_once() {
        for basis in [harmonic_pair(100), signed_pair(64), unit_pair(8)] {
            let part = partition_vizinp(&basis).unwrap();
            for k in 1..=basis.truncation() as u64 {
                assert!(part.classifies_uniquely(k), "index {k} misclassified");
            }
        }
    }

    #[test]
    fn partition_rejects_pair_without_cone_vector() {
        let b = Basis::from_generators(
            &[
                GeneratorDesc::finite_list([1.0, -1.0], 0.5f64.sqrt()),
                GeneratorDesc::finite_list([0.0, 0.0, 1.0, -1.0], 0.5f64.sqrt()),
            ],
            8,
        )
        .unwrap();
        assert!(matches!(partition_vizinp(&b), Err(Error::PreconditionViolated(_))));
    }
}
