//! Solvers and diagnostics for split equality fixed-point problems.
//!
//! Given two nonlinear self-mappings `T1`, `T2` and two linear operators
//! `D1`, `D2` into a common third space, the split equality fixed-point
//! problem asks for a pair `(x, y)` with
//!
//! ```text
//! x in Fix(T1),   y in Fix(T2),   D1 x = D2 y.
//! ```
//!
//! The crate provides:
//!
//! - coupled fixed-point solvers, one that uses the operator norms of
//!   `D1`, `D2` to size its steps and one that provably never computes
//!   an operator norm ([`solvers`]);
//! - the two-layer averaging that turns a Lipschitz quasi-pseudocontractive
//!   mapping into a quasi-nonexpansive one ([`normalized`]);
//! - reductions for split feasibility, split variational inequality and
//!   split convex minimization problems ([`applications`]);
//! - residual, gamma and Fejer-monotonicity diagnostics ([`diagnostics`]);
//! - classic baselines (CQ, projected alternating updates) for comparison.

pub mod applications;
pub mod benchmarks;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod mappings;
pub mod normalized;
pub mod prox;
pub mod schedule;
pub mod sets;
pub mod solvers;
pub mod tolerances;
pub mod trace;

pub use applications::{ScmpProblem, SvipProblem, solve_scmp, solve_sfp, solve_svip};
pub use benchmarks::{
    CheckOutcome, ReferenceTable, ReferenceValue, Series, TableRun, consistent_affine_problem,
    reference_mappings, reference_table, run_reference_table,
};
pub use diagnostics::KnownSolution;
pub use error::{Error, Result};
pub use linalg::{LinearOperator, Point};
pub use mappings::{MappingClass, NonlinearMapping};
pub use normalized::NormalizedOperator;
pub use prox::ProxFunction;
pub use schedule::{AlphaSchedule, TauSchedule};
pub use sets::ConvexSet;
pub use solvers::{SefppProblem, SolverConfig, SolverMode, WeightChoice, solve};
pub use trace::{IterationTrace, TerminationReason, TraceRecord};
