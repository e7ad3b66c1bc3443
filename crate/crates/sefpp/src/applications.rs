//! Reductions of three classical split problems to the coupled solvers.
//!
//! Each reduction compiles its problem down to fixed-point language and
//! hands off to [`crate::solvers`]:
//!
//! - [`solve_sfp`]: a split feasibility-type problem with a single mapping,
//!   find x in Fix(T) with D x in Fix(T), run as one coupled sequence;
//! - [`solve_svip`]: a split variational inequality, each side turned into
//!   the resolvent of its monotone field;
//! - [`solve_scmp`]: split convex minimization, each objective turned into
//!   its proximal mapping.
//!
//! Resolvents and proximal mappings are firmly nonexpansive, so both carry
//! Lipschitz constant 1; with the automatic weights this puts the inner
//! averaging weight below 1/(1+sqrt 2).

use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, Point, dim_mismatch};
use crate::mappings::NonlinearMapping;
use crate::normalized::{NormalizedOperator, default_eta_zeta};
use crate::prox::ProxFunction;
use crate::sets::ConvexSet;
use crate::solvers::{
    self, SefppProblem, SolverConfig, SolverMode, WeightChoice, absorb_violations,
};
use crate::trace::{IterationTrace, TerminationReason, TraceRecord};

/// Split problem with one mapping serving both spaces: find x in Fix(T)
/// whose image D x is again a fixed point of T. Requires a square D, since
/// T acts on the search space and on the image space alike.
///
/// The scheme is the x-half of the coupled step with the partner sequence
/// substituted by y_n := T(D x_n):
///
/// ```text
/// v = (1 - tau) x + tau U x + tau D*(T D x - D x),
/// x+ = (1 - alpha) v + alpha U v,
/// ```
///
/// where U is the averaged wrapper of T. Stops when
/// `||x - T x|| + ||D x - T(D x)|| < stop_tolerance`. The trace records the
/// substituted partner as y; its fixed-point residual `||y - T y||` is
/// reported but does not enter the stopping rule.
///
/// The mode picks the step-size contract: `KnownNorm` demands a vanishing,
/// divergent-sum schedule below `2 / ||D||^2` (one norm estimate, only D's);
/// `NormFree` demands a square-summable divergent-sum schedule below 1,
/// computes no norms, and records the update direction norm per iteration.
/// `DecoupledKm` is rejected: with the coupling dropped there is no
/// substituted sequence left to follow.
pub fn solve_sfp(
    t: &NonlinearMapping,
    d: &LinearOperator,
    x0: &Point,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    config.validate_base()?;
    if d.domain_dim() != d.codomain_dim() {
        return Err(dim_mismatch(
            "D codomain vs D domain (one mapping serves both spaces)",
            d.domain_dim(),
            d.codomain_dim(),
        ));
    }
    if x0.dim() != d.domain_dim() {
        return Err(dim_mismatch("x0 vs D domain", d.domain_dim(), x0.dim()));
    }
    let l = t.lipschitz().ok_or_else(|| {
        Error::RejectedParameters("T needs a declared Lipschitz constant for averaging".into())
    })?;
    let (eta, zeta) = match config.weights {
        WeightChoice::Auto => default_eta_zeta(l)?,
        WeightChoice::Fixed { eta, zeta } => (eta, zeta),
    };
    let (u, mut warnings) = match NormalizedOperator::new(t.clone(), eta, zeta) {
        Ok(u) => (u, Vec::new()),
        Err(e) => {
            if !config.parameter_override {
                return Err(e);
            }
            let u = NormalizedOperator::new_unchecked(t.clone(), eta, zeta)?;
            (u, vec![format!("overridden: {e}")])
        }
    };

    let record_directions = match config.mode {
        SolverMode::KnownNorm => {
            let norm_sq = d.operator_norm_default()?.powi(2);
            let bound = if norm_sq > 0.0 {
                2.0 / norm_sq
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
                     ||D||^2 = {norm_sq:.6}"
                ));
            }
            absorb_violations(&mut warnings, violations, config.parameter_override)?;
            false
        }
        SolverMode::NormFree => {
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
            true
        }
        SolverMode::DecoupledKm => {
            return Err(Error::RejectedConfig(
                "this reduction substitutes the partner sequence through the \
                 coupling, so it needs a coupled solver mode"
                    .into(),
            ));
        }
    };

    // One record's worth of derived quantities; y is the substituted partner.
    let make_record = |n: usize, x: Point| -> Result<TraceRecord> {
        let dx = d.apply(&x)?;
        let y = t.evaluate(&dx)?;
        let coupling_residual = dx.distance(&y)?;
        let fix_residual_x = x.distance(&t.evaluate(&x)?)?;
        let fix_residual_y = y.distance(&t.evaluate(&y)?)?;
        let direction_norm_x = if record_directions {
            let ux = u.evaluate(&x)?;
            let correction = d.adjoint_apply(&y.sub(&dx))?;
            Some(x.sub(&ux).sub(&correction).norm())
        } else {
            None
        };
        Ok(TraceRecord {
            n,
            x,
            y,
            coupling_residual,
            fix_residual_x,
            fix_residual_y,
            gamma: None,
            direction_norm_x,
            direction_norm_y: None,
        })
    };
    let step = |alpha: f64, tau: f64, x: &Point, y: &Point| -> Result<Point> {
        let dx = d.apply(x)?;
        let correction = d.adjoint_apply(&y.sub(&dx))?;
        let ux = u.evaluate(x)?;
        let vn = x.scale(1.0 - tau).axpy(tau, &ux).axpy(tau, &correction);
        let uvn = u.evaluate(&vn)?;
        let x_next = vn.scale(1.0 - alpha).axpy(alpha, &uvn);
        if let Some(i) = x_next.first_non_finite() {
            return Err(Error::NumericalFailure {
                quantity: format!("iterate x, coordinate {i}"),
            });
        }
        Ok(x_next)
    };

    let mut records = vec![make_record(config.start_index, x0.clone())?];
    let (termination, failure_detail) = loop {
        let last = records.last().expect("records start nonempty");
        if last.fix_residual_x + last.coupling_residual < config.stop_tolerance {
            break (TerminationReason::Converged, None);
        }
        if records.len() > config.max_iters {
            break (TerminationReason::MaxIterations, None);
        }
        let n = last.n;
        let alpha = config.alpha.value(n);
        let tau = config.tau.value(n);
        let outcome = step(alpha, tau, &last.x, &last.y).and_then(|x| make_record(n + 1, x));
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

/// A split variational inequality: find x* solving VI(F1, K1) and y* solving
/// VI(F2, K2) with D1 x* = D2 y*.
#[derive(Clone, Debug)]
pub struct SvipProblem {
    f1: NonlinearMapping,
    f2: NonlinearMapping,
    k1: ConvexSet,
    k2: ConvexSet,
    d1: LinearOperator,
    d2: LinearOperator,
    lambda: f64,
}

impl SvipProblem {
    pub fn new(
        f1: NonlinearMapping,
        f2: NonlinearMapping,
        k1: ConvexSet,
        k2: ConvexSet,
        d1: LinearOperator,
        d2: LinearOperator,
        lambda: f64,
    ) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "resolvent parameter must be finite and positive, got {lambda}"
            )));
        }
        if k1.dim() != d1.domain_dim() {
            return Err(dim_mismatch("K1 vs D1 domain", d1.domain_dim(), k1.dim()));
        }
        if k2.dim() != d2.domain_dim() {
            return Err(dim_mismatch("K2 vs D2 domain", d2.domain_dim(), k2.dim()));
        }
        if d1.codomain_dim() != d2.codomain_dim() {
            return Err(dim_mismatch(
                "coupling space of D1 vs D2",
                d1.codomain_dim(),
                d2.codomain_dim(),
            ));
        }
        Ok(Self {
            f1,
            f2,
            k1,
            k2,
            d1,
            d2,
            lambda,
        })
    }
}

/// Solves a split variational inequality by replacing each field with its
/// resolvent: T_i := the mapping taking q to the solution of the regularized
/// inequality VI(lambda F_i + I - q, K_i). A point is fixed under T_i exactly
/// when it solves VI(F_i, K_i), so the pair problem becomes a split equality
/// fixed-point problem and runs on the coupled solvers.
///
/// A stalled inner resolvent solve surfaces in the trace as a numerical
/// failure tagged with the outer iteration index. An inconsistent instance
/// (both inequalities solvable, but no solution pair with D1 x* = D2 y*)
/// runs out its budget and reports max iterations; emptiness is not
/// detectable numerically, so it is never an error.
pub fn solve_svip(
    problem: &SvipProblem,
    x0: &Point,
    y0: &Point,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    let t1 = NonlinearMapping::resolvent(problem.f1.clone(), problem.k1.clone(), problem.lambda)?;
    let t2 = NonlinearMapping::resolvent(problem.f2.clone(), problem.k2.clone(), problem.lambda)?;
    let inner = SefppProblem::new(
        problem.d1.clone(),
        problem.d2.clone(),
        t1,
        t2,
        x0.clone(),
        y0.clone(),
    )?;
    dispatch_coupled(&inner, config)
}

/// Split convex minimization: minimize M over the first space and N over the
/// second, subject to D1 x* = D2 y*.
#[derive(Clone, Debug)]
pub struct ScmpProblem {
    m: ProxFunction,
    n: ProxFunction,
    d1: LinearOperator,
    d2: LinearOperator,
    lambda: f64,
}

impl ScmpProblem {
    pub fn new(
        m: ProxFunction,
        n: ProxFunction,
        d1: LinearOperator,
        d2: LinearOperator,
        lambda: f64,
    ) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "proximal step size must be finite and positive, got {lambda}"
            )));
        }
        if let Some(dim) = m.dim_constraint()
            && dim != d1.domain_dim()
        {
            return Err(dim_mismatch("M vs D1 domain", d1.domain_dim(), dim));
        }
        if let Some(dim) = n.dim_constraint()
            && dim != d2.domain_dim()
        {
            return Err(dim_mismatch("N vs D2 domain", d2.domain_dim(), dim));
        }
        if d1.codomain_dim() != d2.codomain_dim() {
            return Err(dim_mismatch(
                "coupling space of D1 vs D2",
                d1.codomain_dim(),
                d2.codomain_dim(),
            ));
        }
        Ok(Self {
            m,
            n,
            d1,
            d2,
            lambda,
        })
    }
}

/// Solves a split convex minimization problem by replacing each objective
/// with its proximal mapping prox_{lambda f}. A point is fixed under the
/// prox exactly when it minimizes the objective, so the pair problem becomes
/// a split equality fixed-point problem and runs on the coupled solvers.
pub fn solve_scmp(
    problem: &ScmpProblem,
    x0: &Point,
    y0: &Point,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    let t1 = NonlinearMapping::proximal(problem.m.clone(), problem.lambda)?;
    let t2 = NonlinearMapping::proximal(problem.n.clone(), problem.lambda)?;
    let inner = SefppProblem::new(
        problem.d1.clone(),
        problem.d2.clone(),
        t1,
        t2,
        x0.clone(),
        y0.clone(),
    )?;
    dispatch_coupled(&inner, config)
}

fn dispatch_coupled(problem: &SefppProblem, config: &SolverConfig) -> Result<IterationTrace> {
    match config.mode {
        SolverMode::KnownNorm => solvers::solve_known_norm(problem, config),
        SolverMode::NormFree => solvers::solve_norm_free(problem, config),
        SolverMode::DecoupledKm => Err(Error::RejectedConfig(
            "split reductions target the coupling, so they need a coupled \
             solver mode"
                .into(),
        )),
    }
}
