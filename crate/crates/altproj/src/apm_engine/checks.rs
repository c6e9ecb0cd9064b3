//! Invariant monitors over recorded traces.

use super::IterationTrace;
use crate::l2core::{IndexSet, SeqVec};
use crate::projections::dist_to_cone;
use crate::tol::{FEASIBLE_POINT_TOL, FEJER_SLACK, MONOTONE_SLACK};
use crate::{Error, Result};

/// One observed increase of distance to the reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerViolation {
    /// Which sequence moved away: "a" or "b".
    pub sequence: &'static str,
    pub from_step: usize,
    pub to_step: usize,
    pub increase: f64,
}

/// Check that both iterate sequences never move away from `y`, a point
/// that must lie in the intersection of subspace and cone.
///
/// For y = 0 the per-step recorded norms give a step-by-step check across
/// the full interleaved chain b_0, a_1, b_1, a_2, ... For general y the
/// comparison runs over consecutive stored snapshots (distance across a
/// block of steps must not grow either, since it cannot grow across any
/// single step). Returns every violation beyond the slack; an empty list
/// is the expected outcome.
pub fn check_fejer(trace: &IterationTrace, y: &SeqVec) -> Result<Vec<FejerViolation>> {
    let subspace_residual = trace.basis.dist_to_subspace(y);
    let cone_residual = dist_to_cone(y);
    if subspace_residual > FEASIBLE_POINT_TOL || cone_residual > FEASIBLE_POINT_TOL {
        return Err(Error::NotFeasiblePoint { subspace_residual, cone_residual });
    }

    let mut violations = Vec::new();
    if y.norm() == 0.0 {
        // Interleaved chain via recorded norms: each projection is
        // nonexpansive toward y, so every link must be non-increasing.
        let start_norm = SeqVec::from_entries(trace.snapshots[0].b.clone()).norm();
        let mut prev = ("b", 0usize, start_norm);
        for (idx, s) in trace.steps.iter().enumerate() {
            let j = idx + 1;
            for (label, value) in [("a", s.norm_a), ("b", s.norm_b)] {
                if value > prev.2 + FEJER_SLACK {
                    violations.push(FejerViolation {
                        sequence: label,
                        from_step: prev.1,
                        to_step: j,
                        increase: value - prev.2,
                    });
                }
                prev = (label, j, value);
            }
        }
        return Ok(violations);
    }

    let dist = |entries: &[f64]| {
        let d = SeqVec::from_entries(entries.to_vec()).sub(y);
        d.norm()
    };
    for pair in trace.snapshots.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let (db_prev, db_next) = (dist(&prev.b), dist(&next.b));
        if db_next > db_prev + FEJER_SLACK {
            violations.push(FejerViolation {
                sequence: "b",
                from_step: prev.step,
                to_step: next.step,
                increase: db_next - db_prev,
            });
        }
        if let (Some(a_prev), Some(a_next)) = (&prev.a, &next.a) {
            let (da_prev, da_next) = (dist(a_prev), dist(a_next));
            if da_next > da_prev + FEJER_SLACK {
                violations.push(FejerViolation {
                    sequence: "a",
                    from_step: prev.step,
                    to_step: next.step,
                    increase: da_next - da_prev,
                });
            }
        }
    }
    Ok(violations)
}

/// First observed entrywise increase on `region`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneViolation {
    pub from_step: usize,
    pub to_step: usize,
    /// 1-based coordinate that grew.
    pub index: u64,
    pub increase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub monotone: bool,
    pub first_violation: Option<MonotoneViolation>,
    pub pairs_checked: usize,
}

/// Check whether the b iterates are entrywise non-increasing on `region`,
/// comparing consecutive stored snapshots (run with snapshot stride 1 for
/// a literal step-by-step verdict).
pub fn check_componentwise_monotone(trace: &IterationTrace, region: &IndexSet) -> MonotoneReport {
    let mut first_violation = None;
    let mut pairs_checked = 0;
    'outer: for pair in trace.snapshots.windows(2) {
        pairs_checked += 1;
        let (prev, next) = (&pair[0], &pair[1]);
        for (i, (pe, ne)) in prev.b.iter().zip(&next.b).enumerate() {
            let k = i as u64 + 1;
            if region.contains(k) && *ne > pe + MONOTONE_SLACK {
                first_violation = Some(MonotoneViolation {
                    from_step: prev.step,
                    to_step: next.step,
                    index: k,
                    increase: ne - pe,
                });
                break 'outer;
            }
        }
    }
    MonotoneReport { monotone: first_violation.is_none(), first_violation, pairs_checked }
}
