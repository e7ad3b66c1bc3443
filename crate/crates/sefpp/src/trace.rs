//! Per-iteration history produced by every solver run.

use crate::linalg::Point;

/// State and diagnostics at one iteration index.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub n: usize,
    pub x: Point,
    pub y: Point,
    /// ||D1 x - D2 y||, or the mode's coupling gap where noted.
    pub coupling_residual: f64,
    /// ||x - T1 x|| against the raw mapping, not its averaged wrapper.
    pub fix_residual_x: f64,
    pub fix_residual_y: f64,
    /// ||x - p||^2 + ||y - q||^2 against a verified solution, when one was
    /// supplied.
    pub gamma: Option<f64>,
    /// Norm of the raw update direction x - Ux - D1*(D2 y - D1 x). Recorded
    /// on norm-free runs, where its decay certifies progress without any
    /// operator-norm computation.
    pub direction_norm_x: Option<f64>,
    pub direction_norm_y: Option<f64>,
}

impl TraceRecord {
    /// Combined residual the coupled solvers test against the stop tolerance.
    pub fn residual_sum(&self) -> f64 {
        self.coupling_residual + self.fix_residual_x + self.fix_residual_y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminationReason {
    /// The stop rule dropped below the configured tolerance.
    Converged,
    /// The iteration budget ran out first.
    MaxIterations,
    /// A step produced something unusable; details in `failure_detail`.
    NumericalFailure,
}

/// Full history of a run. The records always contain the initial state, so
/// a trace is never empty; `records[i]` holds iteration index
/// `start_index + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
    pub termination: TerminationReason,
    /// Present exactly when `termination` is `NumericalFailure`.
    pub failure_detail: Option<String>,
    /// Parameter rules that were overridden rather than enforced.
    pub warnings: Vec<String>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_record(&self) -> &TraceRecord {
        self.records.last().expect("a trace always has records")
    }

    /// Record with iteration index `n`, if the run reached it.
    pub fn by_index(&self, n: usize) -> Option<&TraceRecord> {
        let first = self.records.first()?.n;
        let record = self.records.get(n.checked_sub(first)?)?;
        debug_assert_eq!(record.n, n);
        Some(record)
    }

    pub fn converged(&self) -> bool {
        self.termination == TerminationReason::Converged
    }
}
