//! Structural analyzers over a basis: support disjointness, the
//! finite-overlap signed hypothesis, the two cone conditions, the
//! support-disjoint rotation finder, and the decomposition solver that
//! splits a disjoint instance into codimension-1 subproblems.

mod bb;
mod decompose;
mod rotation;
mod support;

pub use bb::{check_bb_condition1, check_bb_condition2_codim2, Bb1Verdict, Bb2Verdict};
pub use decompose::solve_by_decomposition;
pub use rotation::{find_disjoint_rotation, Rotation};
pub use support::{
    check_finite_intersection_signed, check_pairwise_disjoint, partition_vizinp, DisjointReport,
    OverlapEntry, PartitionViznp, SignedVerdict, TailSign,
};

use serde_json::json;

use crate::projections::Basis;
use crate::Result;

/// A structural property that holds for a basis, with its evidence.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// All pairwise support intersections are empty.
    PairwiseDisjoint,
    /// All but one vector lie in the cone, the remaining one is
    /// definitively signed from `onset`, and its overlaps with the others
    /// are finite.
    FiniteIntersectionSigned { signed_index: usize, sign: TailSign, onset: u64 },
    /// Q maps the cone into itself.
    QPreservesCone { verified_up_to: String },
    /// The span meets the cone only at the origin.
    SpanMeetsConeTrivially,
    /// None of the structural properties could be established.
    Unknown,
}

/// Aggregate output of every analyzer that applies to a basis.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub verdicts: Vec<Verdict>,
    pub overlaps: Vec<OverlapEntry>,
    pub disjoint: DisjointReport,
    pub signed: SignedVerdict,
    pub bb1: Bb1Verdict,
    /// Present only for two-vector bases (the exact procedure).
    pub bb2: Option<Bb2Verdict>,
    pub partition: Option<PartitionViznp>,
}

impl AnalysisReport {
    /// Whether decomposition into codimension-1 subproblems applies.
    pub fn decomposable(&self) -> bool {
        self.verdicts.contains(&Verdict::PairwiseDisjoint)
    }

    /// JSON with exactly the keys verdicts, overlaps, certificates,
    /// partition.
    pub fn to_json(&self) -> serde_json::Value {
        let mut certificates = serde_json::Map::new();
        if let Bb1Verdict::Fails { witness_k, coordinate, value } = &self.bb1 {
            certificates.insert(
                "q_cone_witness".into(),
                json!({ "k": witness_k, "coordinate": coordinate, "value": value }),
            );
        }
        if let Some(Bb2Verdict::Fails { alpha, beta, .. }) = &self.bb2 {
            certificates
                .insert("span_cone_certificate".into(), json!({ "alpha": alpha, "beta": beta }));
        }
        json!({
            "verdicts": self.verdicts,
            "overlaps": self.overlaps.iter().map(|o| json!({
                "pair": [o.first, o.second],
                "overlap": o.overlap,
                "finite": o.overlap.is_finite(),
            })).collect::<Vec<_>>(),
            "certificates": certificates,
            "partition": self.partition,
        })
    }
}

/// Run every applicable analyzer and collect the verdicts that hold.
///
/// `up_to` bounds the probe range of the cone-preservation check when it
/// cannot be decided symbolically.
pub fn analyze(basis: &Basis, eps_supp: f64, up_to: u64) -> Result<AnalysisReport> {
    let disjoint = check_pairwise_disjoint(basis, eps_supp);
    let signed = check_finite_intersection_signed(basis);
    let bb1 = check_bb_condition1(basis, up_to);
    let bb2 = if basis.len() == 2 { Some(check_bb_condition2_codim2(basis)?) } else { None };
    let partition = if basis.len() == 2 { partition_vizinp(basis).ok() } else { None };

    let mut verdicts = Vec::new();
    if disjoint.disjoint {
        verdicts.push(Verdict::PairwiseDisjoint);
    }
    if let SignedVerdict::Holds { signed_index, sign, onset } = &signed {
        verdicts.push(Verdict::FiniteIntersectionSigned {
            signed_index: *signed_index,
            sign: *sign,
            onset: *onset,
        });
    }
    if let Bb1Verdict::Holds { verified_up_to } = &bb1 {
        verdicts.push(Verdict::QPreservesCone { verified_up_to: verified_up_to.clone() });
    }
    if matches!(bb2, Some(Bb2Verdict::Holds)) {
        verdicts.push(Verdict::SpanMeetsConeTrivially);
    }
    if verdicts.is_empty() {
        verdicts.push(Verdict::Unknown);
    }

    Ok(AnalysisReport {
        verdicts,
        overlaps: disjoint.overlaps.clone(),
        disjoint,
        signed,
        bb1,
        bb2,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l2core::{GeneratorDesc, Parity, SignPattern, Term};

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
        Basis::from_generators(
            &[
                GeneratorDesc::finite_list([1.0, 1.0], 1.0 / 2.0f64.sqrt()),
                GeneratorDesc::scaled_sum(
                    vec![
                        Term {
                            coeff: 1.0,
                            descriptor: GeneratorDesc::finite_list([1.0, -1.0], 1.0),
                        },
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
                ),
            ],
            n,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_pair_report_collects_disjointness() {
        let report = analyze(&harmonic_pair(101), 1e-12, 101).unwrap();
        assert!(report.verdicts.contains(&Verdict::PairwiseDisjoint));
        assert!(report.decomposable());
        assert!(matches!(report.bb1, Bb1Verdict::Fails { .. }));
        assert!(matches!(report.bb2, Some(Bb2Verdict::Fails { .. })));
        assert!(report.partition.is_some());
    }

    #[test]
    fn signed_pair_report_collects_signed_hypothesis() {
        let report = analyze(&signed_pair(64), 1e-12, 64).unwrap();
        assert!(report.verdicts.iter().any(|v| matches!(
            v,
            Verdict::FiniteIntersectionSigned { signed_index: 1, onset: 3, .. }
        )));
        assert!(!report.decomposable());
        assert!(!report.overlaps[0].overlap.is_empty());
    }

    #[test]
    fn unknown_when_nothing_holds() {
        // Overlapping pair spanning a tilted plane: Q(e_2) dips negative,
        // v1 itself certifies the span-meets-cone failure, and without
        // generators the signed hypothesis stays undecided.
        let b = Basis::orthonormal(vec![
            crate::l2core::SeqVec::from_entries(vec![0.5f64.sqrt(), 0.5f64.sqrt(), 0.0, 0.0]),
            crate::l2core::SeqVec::from_entries(vec![0.5, -0.5, 0.5f64.sqrt(), 0.0]),
        ])
        .unwrap();
        let report = analyze(&b, 1e-12, 4).unwrap();
        assert_eq!(report.verdicts, vec![Verdict::Unknown]);
    }

    #[test]
    fn report_json_has_exactly_the_documented_keys() {
        let report = analyze(&signed_pair(64), 1e-12, 64).unwrap();
        let value = report.to_json();
        let obj = value.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, vec!["certificates", "overlaps", "partition", "verdicts"]);
        assert!(obj["certificates"].get("q_cone_witness").is_some());
        assert!(obj["certificates"].get("span_cone_certificate").is_some());
        assert_eq!(obj["partition"]["I"]["plus"], serde_json::json!([1, 2]));
    }
}
