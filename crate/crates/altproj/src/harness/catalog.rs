//! The instance registry.
//!
//! Each entry pins a named problem: its basis generators, a default start,
//! and the analyzer verdicts the structure checks are expected to return.
//! Ids are stable lookup keys; downstream configs and result archives refer
//! to instances only through them. Entries are truncation-free; evaluating
//! one at two truncations yields the same leading entries exactly.

use serde::Serialize;

use super::config::StartSpec;
use crate::l2core::{GeneratorDesc, Parity, SeqVec, SignPattern, Term};
use crate::projections::Basis;
use crate::structure::{AnalysisReport, Verdict};
use crate::{Error, Result};

/// Discriminant of [`Verdict`], for expectation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    PairwiseDisjoint,
    FiniteIntersectionSigned,
    QPreservesCone,
    SpanMeetsConeTrivially,
    Unknown,
}

/// The discriminant of one verdict.
pub fn kind_of(verdict: &Verdict) -> VerdictKind {
    match verdict {
        Verdict::PairwiseDisjoint => VerdictKind::PairwiseDisjoint,
        Verdict::FiniteIntersectionSigned { .. } => VerdictKind::FiniteIntersectionSigned,
        Verdict::QPreservesCone { .. } => VerdictKind::QPreservesCone,
        Verdict::SpanMeetsConeTrivially => VerdictKind::SpanMeetsConeTrivially,
        Verdict::Unknown => VerdictKind::Unknown,
    }
}

/// Discriminants of all verdicts in a report, in report order.
pub fn verdict_kinds(report: &AnalysisReport) -> Vec<VerdictKind> {
    report.verdicts.iter().map(kind_of).collect()
}

/// One registered problem instance.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub generators: Vec<GeneratorDesc>,
    pub default_start: StartSpec,
    /// Verdicts `analyze` must return for this basis, in report order.
    pub expected_verdicts: Vec<VerdictKind>,
    /// `Some(k)` when the Q-cone check must fail with this witness probe.
    pub expected_bb1_witness: Option<u64>,
    /// Smallest truncation at which the entry is meaningful.
    pub min_truncation: usize,
}

impl CatalogEntry {
    /// Build the orthonormal basis at truncation `n`.
    pub fn basis(&self, n: usize) -> Result<Basis> {
        if n < self.min_truncation {
            return Err(Error::InvalidArgument(format!(
                "instance {:?} needs truncation >= {}, got {n}",
                self.id, self.min_truncation
            )));
        }
        Basis::from_generators(&self.generators, n)
    }

    /// Materialize the default start at truncation `n`.
    pub fn start(&self, n: usize) -> Result<SeqVec> {
        self.default_start.materialize(n)
    }
}

/// Check one entry's pinned expectations against the analyzer at truncation
/// `n`. `Err` carries the first mismatch, so a corrupted entry is caught
/// before any run trusts its expectations.
pub fn validate_entry(entry: &CatalogEntry, n: usize) -> std::result::Result<(), String> {
    use crate::structure::{analyze, Bb1Verdict};
    use crate::tol::EPS_SUPP_DEFAULT;

    let basis = entry.basis(n).map_err(|e| format!("{}: basis: {e}", entry.id))?;
    let report = analyze(&basis, EPS_SUPP_DEFAULT, n as u64)
        .map_err(|e| format!("{}: analyze: {e}", entry.id))?;
    let kinds = verdict_kinds(&report);
    if kinds != entry.expected_verdicts {
        return Err(format!(
            "{}: analyzer returned {kinds:?}, entry expects {:?}",
            entry.id, entry.expected_verdicts
        ));
    }
    match (entry.expected_bb1_witness, &report.bb1) {
        (Some(k), Bb1Verdict::Fails { witness_k, .. }) if *witness_k == k => Ok(()),
        (None, Bb1Verdict::Holds { .. }) => Ok(()),
        (expected, actual) => Err(format!(
            "{}: Q-cone check returned {actual:?}, entry expects witness {expected:?}",
            entry.id
        )),
    }
}

/// Disjoint harmonic pair: 1/m on odd positions against alternating 1/m on
/// even positions, both scaled to unit norm.
pub fn harmonic_disjoint_pair() -> [GeneratorDesc; 2] {
    let norm = 6.0f64.sqrt() / std::f64::consts::PI;
    [
        GeneratorDesc::harmonic(0, Parity::Odd, SignPattern::Positive, norm),
        GeneratorDesc::harmonic(
            0,
            Parity::Even,
            SignPattern::Alternating { negative_first: false },
            norm,
        ),
    ]
}

/// Geometric pair (alpha, alpha^2, ...) and its interleaved companion.
///
/// Per index k the two generators point along one of two perpendicular
/// plane directions, so a single rotation of the pair produces disjoint
/// odd/even supports; the raw supports overlap everywhere.
pub fn geometric_rotating_pair(alpha: f64) -> Result<[GeneratorDesc; 2]> {
    if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "geometric pair needs alpha in (0, 1), got {alpha}"
        )));
    }
    let scale = (1.0 - alpha * alpha).sqrt() / alpha;
    let v1 = GeneratorDesc::geometric(alpha, Parity::All, SignPattern::Positive, 1, scale);
    let v2 = GeneratorDesc::scaled_sum(
        vec![
            Term {
                coeff: 1.0,
                descriptor: GeneratorDesc::geometric(
                    alpha * alpha,
                    Parity::Odd,
                    SignPattern::Positive,
                    1,
                    1.0,
                ),
            },
            Term {
                coeff: 1.0 / alpha,
                descriptor: GeneratorDesc::geometric(
                    alpha * alpha,
                    Parity::Even,
                    SignPattern::Negative,
                    1,
                    1.0,
                ),
            },
        ],
        scale,
    );
    Ok([v1, v2])
}

/// Two-weight geometric pair: blocks (a1, a2) and (a2, -a1) on consecutive
/// odd/even index pairs, each block `ratio` times the previous.
///
/// Same two-perpendicular-directions shape as [`geometric_rotating_pair`],
/// with the block weights setting the rotation angle.
pub fn two_weight_geometric_pair(a1: f64, a2: f64, ratio: f64) -> Result<[GeneratorDesc; 2]> {
    for (name, value) in [("a1", a1), ("a2", a2)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "two-weight pair needs {name} > 0, got {value}"
            )));
        }
    }
    if !(ratio.is_finite() && 0.0 < ratio && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "two-weight pair needs ratio in (0, 1), got {ratio}"
        )));
    }
    let norm = ((1.0 - ratio * ratio) / (a1 * a1 + a2 * a2)).sqrt();
    let odd = |coeff: f64| Term {
        coeff: coeff / ratio,
        descriptor: GeneratorDesc::geometric(ratio, Parity::Odd, SignPattern::Positive, 1, 1.0),
    };
    let even = |coeff: f64| Term {
        coeff: coeff / ratio,
        descriptor: GeneratorDesc::geometric(ratio, Parity::Even, SignPattern::Positive, 1, 1.0),
    };
    let v1 = GeneratorDesc::scaled_sum(vec![odd(a1), even(a2)], norm);
    let v2 = GeneratorDesc::scaled_sum(vec![odd(a2), even(-a1)], norm);
    Ok([v1, v2])
}

/// Signed overlap pair: the two-point cone vector (1, 1)/sqrt(2) against a
/// vector that flips sign across the shared block and then decays
/// geometrically, scaled by sqrt(3/7).
pub fn signed_overlap_pair() -> [GeneratorDesc; 2] {
    let v1 = GeneratorDesc::finite_list([1.0, 1.0], 1.0 / 2.0f64.sqrt());
    let v2 = GeneratorDesc::scaled_sum(
        vec![
            Term { coeff: 1.0, descriptor: GeneratorDesc::finite_list([1.0, -1.0], 1.0) },
            Term {
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
    [v1, v2]
}

/// Single strictly positive geometric direction (ratio 1/2, unit norm).
pub fn cone_direction() -> [GeneratorDesc; 1] {
    [GeneratorDesc::geometric(0.5, Parity::All, SignPattern::Positive, 1, 3.0f64.sqrt())]
}

/// Three mutually disjoint cone vectors: a point mass at 1, the block
/// (0.8, 0.6) on {2, 3}, and a geometric tail from index 4 on.
pub fn disjoint_triple() -> [GeneratorDesc; 3] {
    [
        GeneratorDesc::finite_list([1.0], 1.0),
        GeneratorDesc::finite_list([0.0, 0.8, 0.6], 1.0),
        GeneratorDesc::geometric(0.5, Parity::All, SignPattern::Positive, 4, 3.0f64.sqrt()),
    ]
}

/// All registered instances, in id order.
pub fn catalog() -> Vec<CatalogEntry> {
    let geometric = geometric_rotating_pair(0.5).expect("default alpha is valid");
    let two_weight = two_weight_geometric_pair(0.6, 0.8, 0.5).expect("default weights are valid");
    vec![
        CatalogEntry {
            id: "codim-1-cone-vector",
            description: "single strictly positive geometric direction; the classical \
                          codimension-1 case",
            generators: cone_direction().to_vec(),
            default_start: StartSpec::Unit { index: 4 },
            expected_verdicts: vec![
                VerdictKind::PairwiseDisjoint,
                VerdictKind::FiniteIntersectionSigned,
                VerdictKind::QPreservesCone,
            ],
            expected_bb1_witness: None,
            min_truncation: 4,
        },
        CatalogEntry {
            id: "disjoint-triple",
            description: "three mutually disjoint cone vectors: point mass, two-point block, \
                          geometric tail",
            generators: disjoint_triple().to_vec(),
            default_start: StartSpec::RandomNonneg { seed: 11, support: 6 },
            expected_verdicts: vec![
                VerdictKind::PairwiseDisjoint,
                VerdictKind::FiniteIntersectionSigned,
                VerdictKind::QPreservesCone,
            ],
            expected_bb1_witness: None,
            min_truncation: 8,
        },
        CatalogEntry {
            id: "remark-3.2-harmonic",
            description: "disjoint harmonic pair: odd-position 1/m entries against \
                          even-position alternating 1/m entries",
            generators: harmonic_disjoint_pair().to_vec(),
            default_start: StartSpec::Unit { index: 4 },
            expected_verdicts: vec![VerdictKind::PairwiseDisjoint],
            expected_bb1_witness: Some(4),
            min_truncation: 16,
        },
        CatalogEntry {
            id: "remark-3.4-geometric",
            description: "geometric pair with two perpendicular per-index directions; \
                          rotates to disjoint odd/even supports",
            generators: geometric.to_vec(),
            default_start: StartSpec::RandomNonneg { seed: 34, support: 6 },
            expected_verdicts: vec![VerdictKind::QPreservesCone],
            expected_bb1_witness: None,
            min_truncation: 16,
        },
        CatalogEntry {
            id: "remark-3.5-general",
            description: "two-weight geometric pair with blocks (0.6, 0.8) scaled by 1/2 per \
                          block; rotates to disjoint odd/even supports",
            generators: two_weight.to_vec(),
            default_start: StartSpec::RandomNonneg { seed: 35, support: 6 },
            expected_verdicts: vec![VerdictKind::QPreservesCone],
            expected_bb1_witness: None,
            min_truncation: 16,
        },
        CatalogEntry {
            id: "remark-4.2-signed",
            description: "signed overlap pair: two-point cone vector against a sign-flipped \
                          block with a geometric tail",
            generators: signed_overlap_pair().to_vec(),
            default_start: StartSpec::Unit { index: 3 },
            expected_verdicts: vec![VerdictKind::FiniteIntersectionSigned],
            expected_bb1_witness: Some(3),
            min_truncation: 8,
        },
        CatalogEntry {
            id: "standard-basis-pair",
            description: "the first two standard basis vectors",
            generators: vec![
                GeneratorDesc::finite_list([1.0], 1.0),
                GeneratorDesc::finite_list([0.0, 1.0], 1.0),
            ],
            default_start: StartSpec::Unit { index: 3 },
            expected_verdicts: vec![
                VerdictKind::PairwiseDisjoint,
                VerdictKind::FiniteIntersectionSigned,
                VerdictKind::QPreservesCone,
            ],
            expected_bb1_witness: None,
            min_truncation: 3,
        },
    ]
}

/// Look up one instance by id.
pub fn find(id: &str) -> Result<CatalogEntry> {
    catalog()
        .into_iter()
        .find(|entry| entry.id == id)
        .ok_or_else(|| Error::NotFound(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_misses_report_not_found() {
        assert!(matches!(find("no-such-instance"), Err(Error::NotFound(_))));
        assert!(find("remark-3.2-harmonic").is_ok());
    }

    #[test]
    fn catalog_is_sorted_by_id_and_ids_are_unique() {
        let ids: Vec<&str> = catalog().iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn generators_agree_across_truncations() {
        for entry in catalog() {
            for desc in &entry.generators {
                let short = desc.entries(128);
                let long = desc.entries(257);
                assert_eq!(short[..], long[..128], "instance {}", entry.id);
            }
            let short = entry.start(64).unwrap();
            let long = entry.start(129).unwrap();
            assert_eq!(short.as_slice()[..], long.as_slice()[..64], "instance {}", entry.id);
        }
    }

    #[test]
    fn every_entry_builds_an_orthonormal_basis() {
        for entry in catalog() {
            for n in [entry.min_truncation, 512] {
                let basis = entry.basis(n).unwrap_or_else(|e| {
                    panic!("instance {} fails at truncation {n}: {e}", entry.id)
                });
                assert!(
                    basis.ortho_residual() <= 1e-10,
                    "instance {} residual {} at truncation {n}",
                    entry.id,
                    basis.ortho_residual()
                );
            }
            assert!(entry.basis(entry.min_truncation - 1).is_err());
        }
    }

    #[test]
    fn expected_verdicts_match_the_analyzer() {
        for entry in catalog() {
            validate_entry(&entry, 1024).unwrap();
        }
    }

    #[test]
    fn corrupted_entry_expectations_are_caught() {
        let mut entry = find("remark-4.2-signed").unwrap();
        entry.expected_verdicts = vec![VerdictKind::QPreservesCone];
        let message = validate_entry(&entry, 64).unwrap_err();
        assert!(message.contains("remark-4.2-signed"), "{message}");
        assert!(message.contains("expects"), "{message}");

        let mut entry = find("remark-3.2-harmonic").unwrap();
        entry.expected_bb1_witness = Some(7);
        let message = validate_entry(&entry, 64).unwrap_err();
        assert!(message.contains("witness"), "{message}");
    }

    #[test]
    fn default_starts_materialize_at_default_truncation() {
        for entry in catalog() {
            let start = entry.start(1024).unwrap();
            assert_eq!(start.len(), 1024);
            assert!(start.as_slice().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn parameterized_builders_reject_out_of_range_parameters() {
        assert!(geometric_rotating_pair(0.0).is_err());
        assert!(geometric_rotating_pair(1.0).is_err());
        assert!(geometric_rotating_pair(-0.5).is_err());
        assert!(two_weight_geometric_pair(0.0, 0.8, 0.5).is_err());
        assert!(two_weight_geometric_pair(0.6, 0.8, 1.0).is_err());
    }

    #[test]
    fn two_weight_pair_interleaves_the_block_weights() {
        let [v1, v2] = two_weight_geometric_pair(0.6, 0.8, 0.5).unwrap();
        let norm = (0.75f64).sqrt();
        let e1 = v1.entries(6);
        let e2 = v2.entries(6);
        for (k, (got, want)) in e1.iter().zip([0.6, 0.8, 0.3, 0.4, 0.15, 0.2]).enumerate() {
            assert!((got - norm * want).abs() <= 1e-15, "v1 entry {}", k + 1);
        }
        for (k, (got, want)) in e2.iter().zip([0.8, -0.6, 0.4, -0.3, 0.2, -0.15]).enumerate() {
            assert!((got - norm * want).abs() <= 1e-15, "v2 entry {}", k + 1);
        }
    }
}
