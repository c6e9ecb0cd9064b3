use thiserror::Error;

/// Errors surfaced by the library.
///
/// Every failure mode named in the module contracts maps onto one variant;
/// callers that need to branch (the CLI exit codes, the suite) match on the
/// variant rather than on message text.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor received entries or parameters outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Orthonormalization hit a pivot too small relative to the input scale.
    #[error("dependent family: vector {index} has pivot norm {pivot:.3e} below {threshold:.3e}")]
    DependentFamily { index: usize, pivot: f64, threshold: f64 },

    /// An iterate left the representable range (overflow or NaN).
    #[error("non-finite iterate at step {step}")]
    NonFiniteIterate { step: usize },

    /// A distance-monotonicity check was asked about a point outside the
    /// feasible intersection.
    #[error("not a feasible point: subspace residual {subspace_residual:.3e}, cone residual {cone_residual:.3e}")]
    NotFeasiblePoint { subspace_residual: f64, cone_residual: f64 },

    /// An operation's structural precondition does not hold for the input.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The operation is defined but not implemented for this shape of input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Catalog lookup miss.
    #[error("no catalog instance named {0:?}")]
    NotFound(String),

    /// Run configuration failed schema or semantic validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
