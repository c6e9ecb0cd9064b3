//! Classification of the window-sum dichotomy.
//!
//! For a signed basis direction v2, the convergence argument on the part
//! of the support where v2 is positive hinges on the window sums
//! s(j, l) = <b_j + ... + b_{j+l}, v2>: either some window stays
//! nonpositive forever (the tail telescopes), or every window crosses
//! to nonnegative at a finite offset (yielding a lattice-decreasing
//! subsequence). A finite trace can certify crossings but can only
//! report "stays nonpositive" up to its horizon.

use super::{IterationTrace, TerminalStatus};
use crate::l2core::{IndexSet, SeqVec};
use crate::{Error, Result};

/// Outcome of the dichotomy scan over one recorded run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    /// Some window never reached >= 0 within the horizon and the run
    /// finished (converged or stalled), so the window is as closed as a
    /// finite run can make it. `start` is the first such step index.
    WindowStaysNonpositive { start: usize },
    /// Every window's sum crossed to >= 0; `offsets[j - 1]` is the first
    /// offset k with s(j, k) >= 0.
    EveryWindowCrosses { offsets: Vec<usize> },
    /// The iteration budget ran out while some window was still open.
    Inconclusive { horizon: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub outcome: CaseOutcome,
    /// Running sums C_m = <b_1 + ... + b_m, v2>; every window sum is a
    /// difference of these.
    pub partial_sums: Vec<f64>,
    /// Which basis direction the series came from.
    pub direction_index: usize,
    /// The part of the support the dichotomy governs (where v2 > 0 off
    /// the other supports); carried for reporting.
    pub region: IndexSet,
    /// Number of iterates the scan saw.
    pub horizon: usize,
}

/// Scan the coefficient series of `v2` over the trace and classify.
///
/// `v2` must be one of the trace's basis directions; the series
/// <b_j, v2> then comes from the exact per-step coefficient records
/// rather than strided snapshots. Iterates are taken from step 1 on,
/// where they are certified to lie in the cone.
pub fn classify_case(trace: &IterationTrace, v2: &SeqVec, region: &IndexSet) -> Result<CaseReport> {
    let direction_index = (0..trace.basis.len())
        .find(|&i| trace.basis.vector(i).sub(v2).norm() <= 1e-8)
        .ok_or_else(|| {
            Error::InvalidArgument(
                "classification direction must be one of the basis vectors".into(),
            )
        })?;

    let series = trace.coefficient_series(direction_index);
    let (offsets, partial_sums) = window_crossings(&series);
    let horizon = series.len();

    let outcome = match offsets.iter().position(Option::is_none) {
        None => CaseOutcome::EveryWindowCrosses {
            offsets: offsets.into_iter().map(Option::unwrap).collect(),
        },
        Some(open) => {
            if trace.terminal_status == TerminalStatus::MaxIters {
                CaseOutcome::Inconclusive { horizon }
            } else {
                CaseOutcome::WindowStaysNonpositive { start: open + 1 }
            }
        }
    };

    Ok(CaseReport { outcome, partial_sums, direction_index, region: region.clone(), horizon })
}

/// For each window start j (1-based), the smallest offset k >= 0 with
/// c_j + ... + c_{j+k} >= 0, or None if no recorded sum gets there.
/// Also returns the running sums C_1..C_m.
///
/// s(j, k) >= 0 is equivalent to C_{j+k} >= C_{j-1}, so each answer is a
/// "next element >= mine" query on the prefix-sum array, solved in one
/// right-to-left sweep with a stack of undominated candidates.
pub(crate) fn window_crossings(series: &[f64]) -> (Vec<Option<usize>>, Vec<f64>) {
    let m = series.len();
    let mut prefix = vec![0.0f64; m + 1];
    for (i, c) in series.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c;
    }

    let mut stack: Vec<usize> = Vec::new();
    let mut next_geq = vec![None; m + 1];
    for t in (0..=m).rev() {
        // Anything smaller than prefix[t] can never answer a query to the
        // left of t: t itself is closer and at least as large.
        while stack.last().is_some_and(|&top| prefix[top] < prefix[t]) {
            stack.pop();
        }
        next_geq[t] = stack.last().copied();
        stack.push(t);
    }

    let offsets = (1..=m).map(|j| next_geq[j - 1].map(|t| t - j)).collect();
    (offsets, prefix[1..].to_vec())
}
