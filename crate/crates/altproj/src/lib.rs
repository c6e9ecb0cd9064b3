//! Alternating projections between the orthogonal complement of a finite
//! family of vectors and the nonnegative cone, in truncated `l2` with
//! certified tail bounds.
//!
//! The crate is layered bottom-up:
//!
//! * [`l2core`]: truncated sequence vectors, closed-form generator
//!   descriptors, and index-set algebra;
//! * [`projections`]: orthonormal bases, the coefficient operator `Q`, and
//!   the two metric projections;
//! * [`apm_engine`]: the instrumented alternating-projection iteration and
//!   its trace checkers;
//! * [`structure`]: analyzers that decide which convergence mechanism
//!   applies (disjoint supports, sign conditions, cone/span certificates,
//!   support-splitting rotations) plus the decomposition solver;
//! * [`harness`]: the instance catalog, run configuration, exporters, and
//!   the acceptance suite used by the CLI.

pub mod apm_engine;
mod error;
pub mod harness;
pub mod l2core;
pub mod projections;
pub mod structure;
pub mod tol;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
