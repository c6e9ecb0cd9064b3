//! The alternating projection iteration.
//!
//! Starting from b_0, each step applies the subspace projection and then
//! the cone projection: a_j = b_{j-1} - Q(b_{j-1}), b_j = (a_j)^+. The
//! engine records scalar diagnostics every step, full iterate snapshots on
//! a stride, and stops on a combined feasibility-plus-stationarity
//! residual. Monitors check Fejer monotonicity, entrywise lattice
//! monotonicity on an index set, and classify the window-sum dichotomy
//! that drives the finite-overlap convergence argument.

mod checks;
mod classify;
mod run;

pub use checks::{check_componentwise_monotone, check_fejer, FejerViolation, MonotoneReport};
pub use classify::{classify_case, CaseOutcome, CaseReport};
pub use run::{run_apm, run_codim1, run_many};

use crate::l2core::SeqVec;
use crate::projections::Basis;
use crate::tol::{
    EPS_SUPP_DEFAULT, MAX_ITERS_DEFAULT, SNAPSHOT_STRIDE_DEFAULT, TOL_RESIDUAL_DEFAULT,
};
use crate::{Error, Result};

/// Knobs shared by every run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Stop once dist_to_A + dist_to_B + step_delta falls to this level.
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Full iterates are kept every this many steps (plus step 0 and the
    /// final step); scalar diagnostics are kept every step.
    pub snapshot_stride: usize,
    /// 1-based coordinates whose value is recorded at every step.
    pub tracked_indices: Vec<u64>,
    /// Magnitude below which an entry counts as structurally zero.
    pub eps_supp: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol_residual: TOL_RESIDUAL_DEFAULT,
            max_iters: MAX_ITERS_DEFAULT,
            snapshot_stride: SNAPSHOT_STRIDE_DEFAULT,
            tracked_indices: Vec::new(),
            eps_supp: EPS_SUPP_DEFAULT,
        }
    }
}

impl RunOptions {
    fn validate(&self, truncation: usize) -> Result<()> {
        if !(self.tol_residual.is_finite() && self.tol_residual > 0.0) {
            return Err(Error::InvalidArgument("tol_residual must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidArgument("snapshot_stride must be positive".into()));
        }
        if !(self.eps_supp.is_finite() && self.eps_supp > 0.0) {
            return Err(Error::InvalidArgument("eps_supp must be positive".into()));
        }
        if let Some(bad) = self.tracked_indices.iter().find(|&&k| k < 1 || k as usize > truncation)
        {
            return Err(Error::InvalidArgument(format!(
                "tracked index {bad} outside truncation {truncation}"
            )));
        }
        Ok(())
    }
}

/// A basis, a start point, and the run knobs, all at one truncation.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    basis: Basis,
    start: SeqVec,
    options: RunOptions,
}

impl ProblemInstance {
    pub fn new(basis: Basis, start: SeqVec, options: RunOptions) -> Result<Self> {
        if start.len() != basis.truncation() {
            return Err(Error::InvalidArgument(format!(
                "start has truncation {} but basis has {}",
                start.len(),
                basis.truncation()
            )));
        }
        options.validate(basis.truncation())?;
        Ok(ProblemInstance { basis, start, options })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn start(&self) -> &SeqVec {
        &self.start
    }

    pub fn options(&self) -> &RunOptions {
        &self.options
    }

    pub fn truncation(&self) -> usize {
        self.basis.truncation()
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TerminalStatus {
    /// Residual reached tol_residual.
    Converged,
    /// Iteration budget exhausted with residual still above tolerance.
    MaxIters,
    /// Step sizes collapsed to the floating-point floor for many
    /// consecutive steps while the residual stayed above tolerance.
    Stalled,
}

/// Scalar diagnostics for one step j.
#[derive(Debug, Clone)]
pub struct StepRecord {
    /// ||Q(b_j)||: distance from the cone iterate to the subspace.
    pub dist_to_a: f64,
    /// ||(a_j)^-||: distance from the subspace iterate to the cone.
    pub dist_to_b: f64,
    /// ||b_j - b_{j-1}||.
    pub step_delta: f64,
    /// ||b_j||, the Fejer distance to the origin.
    pub norm_b: f64,
    /// ||a_j||.
    pub norm_a: f64,
    /// The coefficients <b_{j-1}, v_i> subtracted by this step.
    pub q_coefficients: Vec<f64>,
}

impl StepRecord {
    /// The stopping-rule residual of this step.
    pub fn residual(&self) -> f64 {
        self.dist_to_a + self.dist_to_b + self.step_delta
    }
}

/// Full iterates kept at one step.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub b: Vec<f64>,
    /// Absent only for the step-0 snapshot of the start point.
    pub a: Option<Vec<f64>>,
}

/// Everything a run produced. Step j's scalars live at `steps[j - 1]`.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
    pub tracked_indices: Vec<u64>,
    /// Row per step, column per tracked index: the value of b_j there.
    pub tracked_values: Vec<Vec<f64>>,
    /// <b_J, v_i> for the final iterate, completing the coefficient series
    /// (step records hold the coefficients of b_0 .. b_{J-1}).
    pub final_coefficients: Vec<f64>,
    pub limit_estimate: SeqVec,
    pub terminal_status: TerminalStatus,
    pub basis: Basis,
    pub tol_residual: f64,
    pub eps_supp: f64,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.steps.last().map_or(0.0, StepRecord::residual)
    }

    /// The series <b_j, v_i> for j = 1..=J (iterates inside the cone).
    pub fn coefficient_series(&self, i: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self.steps.iter().skip(1).map(|s| s.q_coefficients[i]).collect();
        out.push(self.final_coefficients[i]);
        out
    }

    /// Snapshot of b at the final step.
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("every trace ends with a snapshot")
    }
}
