//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building problems or running solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two objects that must live in the same space do not.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// A NaN or infinity appeared where a finite number is required.
    /// `coordinate` identifies the offending entry.
    #[error("non-finite value in {context} at coordinate {coordinate}")]
    NonFinite { context: String, coordinate: usize },

    /// Construction-time parameter outside its admissible range.
    #[error("rejected parameters: {0}")]
    RejectedParameters(String),

    /// Solver configuration that violates the step-size or schedule rules.
    #[error("rejected config: {0}")]
    RejectedConfig(String),

    /// An operation was handed an input it cannot work with
    /// (unbounded sampling domain, degenerate domain, missing trace column).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Power iteration hit its iteration cap before the Rayleigh quotient
    /// settled. Carries the best estimate found so far.
    #[error(
        "spectral norm estimate did not converge after {iterations} iterations (best estimate {best_estimate})"
    )]
    NormEstimateStalled {
        best_estimate: f64,
        iterations: usize,
    },

    /// The inner fixed-point iteration behind a resolvent hit its cap.
    #[error(
        "resolvent iteration did not converge after {iterations} iterations (residual {residual})"
    )]
    InnerSolveStalled {
        residual: f64,
        last_iterate: Vec<f64>,
        iterations: usize,
    },

    /// A solver produced a non-finite intermediate; `quantity` names it.
    #[error("numerical failure: {quantity}")]
    NumericalFailure { quantity: String },
}
