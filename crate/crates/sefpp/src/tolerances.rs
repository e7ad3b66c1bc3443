//! Default tolerances and iteration caps, collected in one place so the
//! numbers quoted in the documentation are the numbers the code runs with.

/// Relative tolerance on successive Rayleigh quotients in the spectral-norm
/// power iteration.
pub const SPECTRAL_NORM_TOL: f64 = 1e-10;

/// Iteration cap for the spectral-norm power iteration.
pub const POWER_ITERATION_CAP: usize = 10_000;

/// Declared fixed points must reproduce themselves to this accuracy.
pub const DECLARED_FIXED_POINT_TOL: f64 = 1e-10;

/// Slack allowed when checking the quasi-pseudocontractive inequality
/// on sampled points.
pub const QPC_SLACK: f64 = 1e-9;

/// Slack allowed when checking quasi-nonexpansiveness of a normalized
/// operator on sampled points.
pub const QNE_SLACK: f64 = 1e-9;

/// Slack allowed between a sampled Lipschitz estimate and its bound.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

/// Symmetry and positive-semidefiniteness tolerance for quadratic forms.
pub const PSD_TOL: f64 = 1e-10;

/// Fixed-point residual of the inner iteration behind a resolvent.
pub const RESOLVENT_INNER_TOL: f64 = 1e-10;

/// Iteration cap for the inner iteration behind a resolvent.
pub const RESOLVENT_ITERATION_CAP: usize = 100_000;

/// A known solution must satisfy both fixed-point equations and the
/// coupling equation to this accuracy.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-8;

/// Relative slack used by the Fejer monotonicity checks:
/// a step passes when gamma grows by no more than `FEJER_SLACK * (1 + gamma)`.
pub const FEJER_SLACK: f64 = 1e-12;

/// Default stopping tolerance on the summed residuals of a solve.
pub const DEFAULT_STOP_TOL: f64 = 1e-6;

/// Default iteration cap for solves.
pub const DEFAULT_MAX_ITERS: usize = 100_000;
