//! Central numeric tolerances.
//!
//! Every threshold that a contract pins lives here so tests and callers
//! reference one definition.

/// Entries with magnitude at or below this are treated as zero when a
/// numeric support is extracted.
pub const EPS_SUPP_DEFAULT: f64 = 1e-12;

/// Maximum certified orthonormality residual accepted by [`crate::projections::Basis`].
pub const ORTHO_RESIDUAL_DEFAULT: f64 = 1e-10;

/// Default combined-residual stopping tolerance for the iteration.
pub const TOL_RESIDUAL_DEFAULT: f64 = 1e-10;

/// Default iteration cap.
pub const MAX_ITERS_DEFAULT: usize = 100_000;

/// Default stride between full iterate snapshots; scalars are kept every step.
pub const SNAPSHOT_STRIDE_DEFAULT: usize = 10;

/// A step is a stall candidate when its delta falls below this.
pub const STALL_DELTA: f64 = 1e-15;

/// Consecutive stall candidates (with residual still above tolerance)
/// before the run reports `Stalled`.
pub const STALL_STEPS: usize = 50;

/// Additive slack allowed before a distance increase counts as a
/// monotonicity violation.
pub const FEJER_SLACK: f64 = 1e-12;

/// Membership tolerance for a point claimed to lie in the intersection.
pub const FEASIBLE_POINT_TOL: f64 = 1e-10;

/// Entrywise slack for componentwise-monotonicity checks.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// An entry of a probe image below the negation of this witnesses a
/// cone-preservation failure.
pub const CONE_ENTRY_SLACK: f64 = 1e-12;

/// Minimum norm for a span-meets-cone certificate vector.
pub const CERT_MIN_NORM: f64 = 1e-6;

/// Angular width used when clustering per-index directions.
pub const ANGLE_CLUSTER_TOL: f64 = 1e-9;

/// Pairs with hypot at or below this impose no direction and are skipped
/// by the angle-based analyzers.
pub const DIRECTION_FLOOR: f64 = 1e-13;
