//! The coupled split-equality solvers, their decoupled cousin, and two
//! classical baselines.
//!
//! Both coupled solvers run the same two-half step. With current state
//! `(x, y)` and the averaged wrappers `U`, `V` of the two mappings:
//!
//! ```text
//! v = (1 - tau) x + tau U x + tau D1*(D2 y - D1 x),    x+ = (1 - alpha) v + alpha U v
//! w = (1 - tau) y + tau V y + tau D2*(D1 x - D2 y),    y+ = (1 - alpha) w + alpha V w
//! ```
//!
//! The two solvers differ only in how they justify the step sizes:
//!
//! - [`solve_known_norm`] checks `tau_n < 2 / (||D1||^2 + ||D2||^2)`, which
//!   costs two spectral-norm estimates up front;
//! - [`solve_norm_free`] instead requires `tau_n` to be square-summable with
//!   divergent sum and bounded by 1. It never computes an operator norm:
//!   the step above only ever applies `D1`, `D2` and their adjoints, and the
//!   per-operator norm-call counters stay at zero for the whole run.
//!
//! [`solve_decoupled_km`] drops the coupling entirely and relaxes each raw
//! mapping on its own; it is the scheme behind the reference tables in
//! [`crate::benchmarks`] and a useful control when studying what the
//! coupling terms contribute.

use crate::diagnostics::{self, KnownSolution};
use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, Point, dim_mismatch};
use crate::mappings::NonlinearMapping;
use crate::normalized::{NormalizedOperator, default_eta_zeta};
use crate::schedule::{AlphaSchedule, TauSchedule};
use crate::sets::ConvexSet;
use crate::tolerances::{DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL};
use crate::trace::{IterationTrace, TerminationReason, TraceRecord};

/// A split equality fixed-point problem instance: find x in Fix(T1) and
/// y in Fix(T2) with D1 x = D2 y, starting the search at (x0, y0).
#[derive(Clone, Debug)]
pub struct SefppProblem {
    d1: LinearOperator,
    d2: LinearOperator,
    t1: NonlinearMapping,
    t2: NonlinearMapping,
    x0: Point,
    y0: Point,
}

impl SefppProblem {
    pub fn new(
        d1: LinearOperator,
        d2: LinearOperator,
        t1: NonlinearMapping,
        t2: NonlinearMapping,
        x0: Point,
        y0: Point,
    ) -> Result<Self> {
        if d1.domain_dim() != x0.dim() {
            return Err(dim_mismatch("D1 domain vs x0", d1.domain_dim(), x0.dim()));
        }
        if d2.domain_dim() != y0.dim() {
            return Err(dim_mismatch("D2 domain vs y0", d2.domain_dim(), y0.dim()));
        }
        if d1.codomain_dim() != d2.codomain_dim() {
            return Err(dim_mismatch(
                "coupling space of D1 vs D2",
                d1.codomain_dim(),
                d2.codomain_dim(),
            ));
        }
        Ok(Self {
            d1,
            d2,
            t1,
            t2,
            x0,
            y0,
        })
    }

    pub fn d1(&self) -> &LinearOperator {
        &self.d1
    }

    pub fn d2(&self) -> &LinearOperator {
        &self.d2
    }

    pub fn t1(&self) -> &NonlinearMapping {
        &self.t1
    }

    pub fn t2(&self) -> &NonlinearMapping {
        &self.t2
    }

    pub fn x0(&self) -> &Point {
        &self.x0
    }

    pub fn y0(&self) -> &Point {
        &self.y0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMode {
    KnownNorm,
    NormFree,
    DecoupledKm,
}

/// How to pick the averaging weights for the two wrapped mappings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightChoice {
    /// [`default_eta_zeta`] of the larger declared Lipschitz constant.
    Auto,
    Fixed {
        eta: f64,
        zeta: f64,
    },
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub alpha: AlphaSchedule,
    pub tau: TauSchedule,
    pub weights: WeightChoice,
    pub max_iters: usize,
    pub stop_tolerance: f64,
    /// Iteration index of the initial record; schedules are evaluated at the
    /// index a step departs from. 0 and 1 are accepted, 1 is conventional.
    pub start_index: usize,
    /// Downgrades step-size and weight-range rejections to trace warnings.
    pub parameter_override: bool,
    /// Supplies gamma tracking against a verified solution pair.
    pub known_solution: Option<KnownSolution>,
}

impl SolverConfig {
    pub fn new(mode: SolverMode, alpha: AlphaSchedule, tau: TauSchedule) -> Self {
        Self {
            mode,
            alpha,
            tau,
            weights: WeightChoice::Auto,
            max_iters: DEFAULT_MAX_ITERS,
            stop_tolerance: DEFAULT_STOP_TOL,
            start_index: 1,
            parameter_override: false,
            known_solution: None,
        }
    }

    pub fn with_weights(mut self, weights: WeightChoice) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_stop_tolerance(mut self, tol: f64) -> Self {
        self.stop_tolerance = tol;
        self
    }

    pub fn with_start_index(mut self, start_index: usize) -> Self {
        self.start_index = start_index;
        self
    }

    pub fn with_override(mut self, allow: bool) -> Self {
        self.parameter_override = allow;
        self
    }

    pub fn with_known_solution(mut self, solution: KnownSolution) -> Self {
        self.known_solution = Some(solution);
        self
    }

    pub(crate) fn validate_base(&self) -> Result<()> {
        if !self.stop_tolerance.is_finite() || self.stop_tolerance < 0.0 {
            return Err(Error::RejectedConfig(format!(
                "stop tolerance must be finite and nonnegative, got {}",
                self.stop_tolerance
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::RejectedConfig(
                "iteration budget must allow at least one step".into(),
            ));
        }
        if self.start_index > 1 {
            return Err(Error::RejectedConfig(format!(
                "start index must be 0 or 1, got {}",
                self.start_index
            )));
        }
        Ok(())
    }
}

/// Dispatches on `config.mode`.
pub fn solve(problem: &SefppProblem, config: &SolverConfig) -> Result<IterationTrace> {
    match config.mode {
        SolverMode::KnownNorm => solve_known_norm(problem, config),
        SolverMode::NormFree => solve_norm_free(problem, config),
        SolverMode::DecoupledKm => solve_decoupled_km(problem, config),
    }
}

/// Coupled solver whose step-size rule uses the operator norms of D1 and D2:
/// every emitted tau_n must stay below `2 / (||D1||^2 + ||D2||^2)`, and
/// tau_n must vanish with a divergent sum. Rejections become warnings under
/// `parameter_override`.
pub fn solve_known_norm(problem: &SefppProblem, config: &SolverConfig) -> Result<IterationTrace> {
    config.validate_base()?;
    let (u, v, mut warnings) = averaged_pair(problem, config)?;
    let l1 = problem.d1.operator_norm_default()?.powi(2);
    let l2 = problem.d2.operator_norm_default()?.powi(2);
    let bound = if l1 + l2 > 0.0 {
        2.0 / (l1 + l2)
    } else {
        f64::INFINITY
    };
    let mut violations = Vec::new();
    if !config.tau.limit_is_zero() {
        violations.push(format!(
            "step sizes must vanish, but {} does not",
            config.tau.describe()
        ));
    }
    if !config.tau.sum_diverges() {
        violations.push(format!(
            "step sizes must have a divergent sum, but {} does not",
            config.tau.describe()
        ));
    }
    let first = config.tau.value(config.start_index);
    if !(first > 0.0 && first < bound) {
        violations.push(format!(
            "first step size {first} must lie in (0, {bound:.6}) given \
             ||D1||^2 + ||D2||^2 = {:.6}",
            l1 + l2
        ));
    }
    absorb_violations(&mut warnings, violations, config.parameter_override)?;
    drive(
        problem,
        config,
        Engine::Coupled {
            u: &u,
            v: &v,
            record_directions: false,
        },
        warnings,
    )
}

/// Coupled solver that never computes an operator norm. The step is the same
/// as in [`solve_known_norm`]; the step-size rule instead demands a
/// square-summable schedule with divergent sum, bounded by 1. The update
/// directions `x - Ux - D1*(D2 y - D1 x)` and its mirror are recorded per
/// iteration, since watching them vanish is this solver's convergence
/// certificate. Rejections become warnings under `parameter_override`.
pub fn solve_norm_free(problem: &SefppProblem, config: &SolverConfig) -> Result<IterationTrace> {
    config.validate_base()?;
    let (u, v, mut warnings) = averaged_pair(problem, config)?;
    let mut violations = Vec::new();
    if !config.tau.sum_diverges() {
        violations.push(format!(
            "step sizes must have a divergent sum, but {} does not",
            config.tau.describe()
        ));
    }
    if !config.tau.square_summable() {
        violations.push(format!(
            "step sizes must be square-summable, but {} is not",
            config.tau.describe()
        ));
    }
    let first = config.tau.value(config.start_index);
    if !(first > 0.0 && first < 1.0) {
        violations.push(format!("first step size {first} must lie in (0, 1)"));
    }
    absorb_violations(&mut warnings, violations, config.parameter_override)?;
    drive(
        problem,
        config,
        Engine::Coupled {
            u: &u,
            v: &v,
            record_directions: true,
        },
        warnings,
    )
}

/// Relaxes the two raw mappings independently, ignoring the coupling:
///
/// ```text
/// v = (1 - tau) x + tau T1 x,    x+ = (1 - alpha) v + alpha T1 v
/// ```
///
/// and likewise for y. Stops on `||x - T1 x|| + ||y - T2 y||`; the coupling
/// residual is still recorded so a trace shows what this scheme leaves
/// unsolved. No Lipschitz declarations or averaging weights are needed.
pub fn solve_decoupled_km(problem: &SefppProblem, config: &SolverConfig) -> Result<IterationTrace> {
    config.validate_base()?;
    let mut warnings = Vec::new();
    let first = config.tau.value(config.start_index);
    let violations = if !(first > 0.0 && first <= 1.0) {
        vec![format!("first relaxation step {first} must lie in (0, 1]")]
    } else {
        Vec::new()
    };
    absorb_violations(&mut warnings, violations, config.parameter_override)?;
    drive(problem, config, Engine::Decoupled, warnings)
}

/// One coupled step under the known-norm contract. Permissive at this level:
/// any finite `tau >= 0` and `alpha` in [0, 1) are applied as given, so
/// single steps can be studied outside the solvers' validation.
pub fn step_known_norm(
    problem: &SefppProblem,
    u: &NormalizedOperator,
    v: &NormalizedOperator,
    alpha: f64,
    tau: f64,
    x: &Point,
    y: &Point,
) -> Result<(Point, Point)> {
    check_step_weights(alpha, tau)?;
    coupled_update(problem, u, v, alpha, tau, x, y)
}

/// One coupled step under the norm-free contract. The arithmetic is
/// identical to [`step_known_norm`] and computes no operator norms; the two
/// entry points exist because the solvers' validation differs, not the step.
pub fn step_norm_free(
    problem: &SefppProblem,
    u: &NormalizedOperator,
    v: &NormalizedOperator,
    alpha: f64,
    tau: f64,
    x: &Point,
    y: &Point,
) -> Result<(Point, Point)> {
    check_step_weights(alpha, tau)?;
    coupled_update(problem, u, v, alpha, tau, x, y)
}

fn check_step_weights(alpha: f64, tau: f64) -> Result<()> {
    if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
        return Err(Error::RejectedParameters(format!(
            "relaxation weight must lie in [0, 1), got {alpha}"
        )));
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::RejectedParameters(format!(
            "step size must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

/// Builds the averaged pair (U, V) from the problem's mappings, sharing one
/// (eta, zeta). Needs declared Lipschitz constants; range failures fall back
/// to the unchecked constructor when overriding is allowed.
fn averaged_pair(
    problem: &SefppProblem,
    config: &SolverConfig,
) -> Result<(NormalizedOperator, NormalizedOperator, Vec<String>)> {
    let l1 = problem.t1.lipschitz().ok_or_else(|| {
        Error::RejectedParameters("T1 needs a declared Lipschitz constant for averaging".into())
    })?;
    let l2 = problem.t2.lipschitz().ok_or_else(|| {
        Error::RejectedParameters("T2 needs a declared Lipschitz constant for averaging".into())
    })?;
    let (eta, zeta) = match config.weights {
        WeightChoice::Auto => default_eta_zeta(l1.max(l2))?,
        WeightChoice::Fixed { eta, zeta } => (eta, zeta),
    };
    let strict = NormalizedOperator::new(problem.t1.clone(), eta, zeta)
        .and_then(|u| Ok((u, NormalizedOperator::new(problem.t2.clone(), eta, zeta)?)));
    match strict {
        Ok((u, v)) => Ok((u, v, Vec::new())),
        Err(e) => {
            if !config.parameter_override {
                return Err(e);
            }
            let u = NormalizedOperator::new_unchecked(problem.t1.clone(), eta, zeta)?;
            let v = NormalizedOperator::new_unchecked(problem.t2.clone(), eta, zeta)?;
            Ok((u, v, vec![format!("overridden: {e}")]))
        }
    }
}

pub(crate) fn absorb_violations(
    warnings: &mut Vec<String>,
    violations: Vec<String>,
    allowed: bool,
) -> Result<()> {
    if violations.is_empty() {
        return Ok(());
    }
    if allowed {
        warnings.extend(violations.into_iter().map(|v| format!("overridden: {v}")));
        Ok(())
    } else {
        Err(Error::RejectedConfig(violations.join("; ")))
    }
}

enum Engine<'a> {
    Coupled {
        u: &'a NormalizedOperator,
        v: &'a NormalizedOperator,
        record_directions: bool,
    },
    Decoupled,
}

impl Engine<'_> {
    fn step(
        &self,
        problem: &SefppProblem,
        alpha: f64,
        tau: f64,
        x: &Point,
        y: &Point,
    ) -> Result<(Point, Point)> {
        match self {
            Engine::Coupled { u, v, .. } => coupled_update(problem, u, v, alpha, tau, x, y),
            Engine::Decoupled => decoupled_update(problem, alpha, tau, x, y),
        }
    }

    fn directions(
        &self,
        problem: &SefppProblem,
        x: &Point,
        y: &Point,
    ) -> Result<Option<(f64, f64)>> {
        match self {
            Engine::Coupled {
                u,
                v,
                record_directions: true,
            } => {
                let (cx, cy) = coupling_terms(problem, x, y)?;
                let k = x.sub(&u.evaluate(x)?).sub(&cx);
                let r = y.sub(&v.evaluate(y)?).sub(&cy);
                Ok(Some((k.norm(), r.norm())))
            }
            _ => Ok(None),
        }
    }

    fn stop_value(&self, record: &TraceRecord) -> f64 {
        match self {
            Engine::Coupled { .. } => record.residual_sum(),
            Engine::Decoupled => record.fix_residual_x + record.fix_residual_y,
        }
    }
}

/// D1*(D2 y - D1 x) and D2*(D1 x - D2 y).
fn coupling_terms(problem: &SefppProblem, x: &Point, y: &Point) -> Result<(Point, Point)> {
    let d1x = problem.d1.apply(x)?;
    let d2y = problem.d2.apply(y)?;
    let gap = d2y.sub(&d1x);
    let cx = problem.d1.adjoint_apply(&gap)?;
    let cy = problem.d2.adjoint_apply(&gap.scale(-1.0))?;
    Ok((cx, cy))
}

fn coupled_update(
    problem: &SefppProblem,
    u: &NormalizedOperator,
    v: &NormalizedOperator,
    alpha: f64,
    tau: f64,
    x: &Point,
    y: &Point,
) -> Result<(Point, Point)> {
    let (cx, cy) = coupling_terms(problem, x, y)?;

    let ux = u.evaluate(x)?;
    let vn = x.scale(1.0 - tau).axpy(tau, &ux).axpy(tau, &cx);
    let uvn = u.evaluate(&vn)?;
    let x_next = vn.scale(1.0 - alpha).axpy(alpha, &uvn);

    let vy = v.evaluate(y)?;
    let wn = y.scale(1.0 - tau).axpy(tau, &vy).axpy(tau, &cy);
    let vwn = v.evaluate(&wn)?;
    let y_next = wn.scale(1.0 - alpha).axpy(alpha, &vwn);

    check_iterate(&x_next, &y_next)?;
    Ok((x_next, y_next))
}

fn decoupled_update(
    problem: &SefppProblem,
    alpha: f64,
    tau: f64,
    x: &Point,
    y: &Point,
) -> Result<(Point, Point)> {
    let tx = problem.t1.evaluate(x)?;
    let vn = x.scale(1.0 - tau).axpy(tau, &tx);
    let tvn = problem.t1.evaluate(&vn)?;
    let x_next = vn.scale(1.0 - alpha).axpy(alpha, &tvn);

    let ty = problem.t2.evaluate(y)?;
    let wn = y.scale(1.0 - tau).axpy(tau, &ty);
    let twn = problem.t2.evaluate(&wn)?;
    let y_next = wn.scale(1.0 - alpha).axpy(alpha, &twn);

    check_iterate(&x_next, &y_next)?;
    Ok((x_next, y_next))
}

fn check_iterate(x: &Point, y: &Point) -> Result<()> {
    for (label, point) in [("x", x), ("y", y)] {
        if let Some(i) = point.first_non_finite() {
            return Err(Error::NumericalFailure {
                quantity: format!("iterate {label}, coordinate {i}"),
            });
        }
    }
    Ok(())
}

fn make_record(
    problem: &SefppProblem,
    engine: &Engine<'_>,
    config: &SolverConfig,
    n: usize,
    x: Point,
    y: Point,
) -> Result<TraceRecord> {
    let res = diagnostics::residuals(problem, &x, &y)?;
    let gamma = config
        .known_solution
        .as_ref()
        .map(|s| s.gamma(&x, &y))
        .transpose()?;
    let directions = engine.directions(problem, &x, &y)?;
    let (direction_norm_x, direction_norm_y) = match directions {
        Some((k, r)) => (Some(k), Some(r)),
        None => (None, None),
    };
    Ok(TraceRecord {
        n,
        x,
        y,
        coupling_residual: res.coupling,
        fix_residual_x: res.fix_x,
        fix_residual_y: res.fix_y,
        gamma,
        direction_norm_x,
        direction_norm_y,
    })
}

fn drive(
    problem: &SefppProblem,
    config: &SolverConfig,
    engine: Engine<'_>,
    warnings: Vec<String>,
) -> Result<IterationTrace> {
    let mut records = vec![make_record(
        problem,
        &engine,
        config,
        config.start_index,
        problem.x0.clone(),
        problem.y0.clone(),
    )?];
    let (termination, failure_detail) = loop {
        let last = records.last().expect("records start nonempty");
        if engine.stop_value(last) < config.stop_tolerance {
            break (TerminationReason::Converged, None);
        }
        if records.len() > config.max_iters {
            break (TerminationReason::MaxIterations, None);
        }
        let n = last.n;
        let alpha = config.alpha.value(n);
        let tau = config.tau.value(n);
        let outcome = engine
            .step(problem, alpha, tau, &last.x, &last.y)
            .and_then(|(x, y)| make_record(problem, &engine, config, n + 1, x, y));
        match outcome {
            Ok(record) => records.push(record),
            Err(e) => {
                break (
                    TerminationReason::NumericalFailure,
                    Some(format!("at iteration {n}: {e}")),
                );
            }
        }
    };
    Ok(IterationTrace {
        records,
        termination,
        failure_detail,
        warnings,
    })
}

/// The classical CQ iteration for a split feasibility problem: find x in C
/// with D x in Q via
///
/// ```text
/// x+ = P_C(x - lambda D*(D x - P_Q(D x))),    lambda in (0, 2 / ||D||^2).
/// ```
///
/// The trace records y := P_Q(D x); its fixed-point residual is identically
/// zero. Stops on `||x - P_C x|| + ||D x - P_Q(D x)|| < stop_tolerance`.
/// Only `max_iters`, `stop_tolerance`, `start_index` and
/// `parameter_override` are read from the config.
pub fn baseline_cq(
    c: &ConvexSet,
    q: &ConvexSet,
    d: &LinearOperator,
    lambda: f64,
    x0: &Point,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    config.validate_base()?;
    if c.dim() != d.domain_dim() {
        return Err(dim_mismatch("C vs D domain", d.domain_dim(), c.dim()));
    }
    if q.dim() != d.codomain_dim() {
        return Err(dim_mismatch("Q vs D codomain", d.codomain_dim(), q.dim()));
    }
    if x0.dim() != c.dim() {
        return Err(dim_mismatch("x0 vs C", c.dim(), x0.dim()));
    }
    let norm_sq = d.operator_norm_default()?.powi(2);
    let bound = if norm_sq > 0.0 {
        2.0 / norm_sq
    } else {
        f64::INFINITY
    };
    let mut warnings = Vec::new();
    let violations = if !(lambda > 0.0 && lambda < bound) {
        vec![format!("CQ step size {lambda} must lie in (0, {bound:.6})")]
    } else {
        Vec::new()
    };
    absorb_violations(&mut warnings, violations, config.parameter_override)?;

    let cq_record = |n: usize, x: &Point| -> Result<(TraceRecord, Point)> {
        let dx = d.apply(x)?;
        let pq = q.project(&dx)?;
        Ok((
            TraceRecord {
                n,
                x: x.clone(),
                y: pq.clone(),
                coupling_residual: dx.distance(&pq)?,
                fix_residual_x: x.distance(&c.project(x)?)?,
                fix_residual_y: 0.0,
                gamma: None,
                direction_norm_x: None,
                direction_norm_y: None,
            },
            dx.sub(&pq),
        ))
    };

    let (first, mut gap) = cq_record(config.start_index, x0)?;
    let mut records = vec![first];
    let (termination, failure_detail) = loop {
        let last = records.last().expect("records start nonempty");
        if last.fix_residual_x + last.coupling_residual < config.stop_tolerance {
            break (TerminationReason::Converged, None);
        }
        if records.len() > config.max_iters {
            break (TerminationReason::MaxIterations, None);
        }
        let n = last.n;
        let outcome = d
            .adjoint_apply(&gap)
            .and_then(|g| c.project(&last.x.axpy(-lambda, &g)))
            .and_then(|x| {
                check_iterate(&x, &x)?;
                cq_record(n + 1, &x)
            });
        match outcome {
            Ok((record, next_gap)) => {
                records.push(record);
                gap = next_gap;
            }
            Err(e) => {
                break (
                    TerminationReason::NumericalFailure,
                    Some(format!("at iteration {n}: {e}")),
                );
            }
        }
    };
    Ok(IterationTrace {
        records,
        termination,
        failure_detail,
        warnings,
    })
}

/// Projected alternating updates for split equality feasibility: find x in C,
/// y in Q with D1 x = D2 y via
///
/// ```text
/// x+ = P_C(x - lambda_n D1*(D1 x - D2 y))
/// y+ = P_Q(y + lambda_n D2*(D1 x - D2 y))
/// ```
///
/// with `lambda_n` in `(0, 2 / (||D1||^2 + ||D2||^2))`. Stops on the sum of
/// `||D1 x - D2 y||` and both projection residuals.
///
/// The problem arrives unpacked: a baseline for feasibility between two
/// sets has no mappings, so [`SefppProblem`] does not fit it.
#[allow(clippy::too_many_arguments)]
pub fn baseline_alternating(
    c: &ConvexSet,
    q: &ConvexSet,
    d1: &LinearOperator,
    d2: &LinearOperator,
    lambda: &TauSchedule,
    x0: &Point,
    y0: &Point,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    config.validate_base()?;
    if c.dim() != d1.domain_dim() {
        return Err(dim_mismatch("C vs D1 domain", d1.domain_dim(), c.dim()));
    }
    if q.dim() != d2.domain_dim() {
        return Err(dim_mismatch("Q vs D2 domain", d2.domain_dim(), q.dim()));
    }
    if d1.codomain_dim() != d2.codomain_dim() {
        return Err(dim_mismatch(
            "coupling space of D1 vs D2",
            d1.codomain_dim(),
            d2.codomain_dim(),
        ));
    }
    if x0.dim() != c.dim() {
        return Err(dim_mismatch("x0 vs C", c.dim(), x0.dim()));
    }
    if y0.dim() != q.dim() {
        return Err(dim_mismatch("y0 vs Q", q.dim(), y0.dim()));
    }
    let norm_sq = d1.operator_norm_default()?.powi(2) + d2.operator_norm_default()?.powi(2);
    let bound = if norm_sq > 0.0 {
        2.0 / norm_sq
    } else {
        f64::INFINITY
    };
    let first = lambda.value(config.start_index);
    let mut warnings = Vec::new();
    let violations = if !(first > 0.0 && first < bound) {
        vec![format!(
            "first alternating step size {first} must lie in (0, {bound:.6})"
        )]
    } else {
        Vec::new()
    };
    absorb_violations(&mut warnings, violations, config.parameter_override)?;

    let alt_record = |n: usize, x: &Point, y: &Point| -> Result<(TraceRecord, Point)> {
        let gap = d1.apply(x)?.sub(&d2.apply(y)?);
        Ok((
            TraceRecord {
                n,
                x: x.clone(),
                y: y.clone(),
                coupling_residual: gap.norm(),
                fix_residual_x: x.distance(&c.project(x)?)?,
                fix_residual_y: y.distance(&q.project(y)?)?,
                gamma: None,
                direction_norm_x: None,
                direction_norm_y: None,
            },
            gap,
        ))
    };

    let (first_record, mut gap) = alt_record(config.start_index, x0, y0)?;
    let mut records = vec![first_record];
    let (termination, failure_detail) = loop {
        let last = records.last().expect("records start nonempty");
        if last.residual_sum() < config.stop_tolerance {
            break (TerminationReason::Converged, None);
        }
        if records.len() > config.max_iters {
            break (TerminationReason::MaxIterations, None);
        }
        let n = last.n;
        let step = lambda.value(n);
        let outcome = d1
            .adjoint_apply(&gap)
            .and_then(|gx| c.project(&last.x.axpy(-step, &gx)))
            .and_then(|x| {
                let gy = d2.adjoint_apply(&gap)?;
                let y = q.project(&last.y.axpy(step, &gy))?;
                check_iterate(&x, &y)?;
                alt_record(n + 1, &x, &y)
            });
        match outcome {
            Ok((record, next_gap)) => {
                records.push(record);
                gap = next_gap;
            }
            Err(e) => {
                break (
                    TerminationReason::NumericalFailure,
                    Some(format!("at iteration {n}: {e}")),
                );
            }
        }
    };
    Ok(IterationTrace {
        records,
        termination,
        failure_detail,
        warnings,
    })
}
