//! Residuals, distance-to-solution tracking, and Fejer monotonicity checks.

use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::schedule::TauSchedule;
use crate::solvers::SefppProblem;
use crate::tolerances::{FEJER_SLACK, KNOWN_SOLUTION_TOL};
use crate::trace::IterationTrace;

/// The three gaps that vanish exactly at a solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// ||D1 x - D2 y||.
    pub coupling: f64,
    /// ||x - T1 x||.
    pub fix_x: f64,
    /// ||y - T2 y||.
    pub fix_y: f64,
}

impl Residuals {
    pub fn sum(&self) -> f64 {
        self.coupling + self.fix_x + self.fix_y
    }
}

pub fn residuals(problem: &SefppProblem, x: &Point, y: &Point) -> Result<Residuals> {
    let d1x = problem.d1().apply(x)?;
    let d2y = problem.d2().apply(y)?;
    Ok(Residuals {
        coupling: d1x.distance(&d2y)?,
        fix_x: x.distance(&problem.t1().evaluate(x)?)?,
        fix_y: y.distance(&problem.t2().evaluate(y)?)?,
    })
}

/// A solution pair that has been checked against its problem, used to track
/// the squared distance gamma_n = ||x_n - p||^2 + ||y_n - q||^2 along a run.
#[derive(Clone, Debug, PartialEq)]
pub struct KnownSolution {
    p: Point,
    q: Point,
}

impl KnownSolution {
    /// Accepts the pair only if both fixed-point residuals and the coupling
    /// gap are tiny; anything else would make every gamma it produces
    /// meaningless.
    pub fn verified(problem: &SefppProblem, p: Point, q: Point) -> Result<Self> {
        let r = residuals(problem, &p, &q)?;
        for (what, gap) in [
            ("||p - T1 p||", r.fix_x),
            ("||q - T2 q||", r.fix_y),
            ("||D1 p - D2 q||", r.coupling),
        ] {
            if gap > KNOWN_SOLUTION_TOL {
                return Err(Error::RejectedParameters(format!(
                    "claimed solution fails {what} = {gap:.3e}"
                )));
            }
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> &Point {
        &self.p
    }

    pub fn q(&self) -> &Point {
        &self.q
    }

    /// gamma(x, y) = ||x - p||^2 + ||y - q||^2.
    pub fn gamma(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(x.distance(&self.p)?.powi(2) + y.distance(&self.q)?.powi(2))
    }
}

/// Which monotonicity law to test gamma against.
#[derive(Clone, Copy, Debug)]
pub enum FejerVariant {
    /// gamma_{n+1} <= gamma_n.
    Monotone,
    /// gamma_{n+1} <= (1 + 2 phi^2 tau_n^2) gamma_n: the residual coupling
    /// term can inject energy proportional to tau_n^2, bounded via phi.
    NearMonotone { phi: f64, tau: TauSchedule },
}

#[derive(Clone, Debug)]
pub struct FejerReport {
    pub holds: bool,
    /// Iteration index n of the first step with gamma_{n+1} above its bound.
    pub first_violation: Option<usize>,
    /// Largest gamma_{n+1} - bound_n over all steps; nonpositive when the
    /// law holds everywhere.
    pub worst_excess: f64,
    pub steps_checked: usize,
}

/// Tests the chosen monotonicity law along a trace, with an absolute floor
/// of `FEJER_SLACK * (1 + gamma_n)` of slack per step so that honest rounding
/// noise near zero does not read as a violation. The trace must carry gamma
/// values, i.e. the run must have been given a verified solution.
pub fn check_fejer(trace: &IterationTrace, variant: FejerVariant) -> Result<FejerReport> {
    if let FejerVariant::NearMonotone { phi, .. } = variant
        && !(phi.is_finite() && phi > 0.0)
    {
        return Err(Error::InvalidInput(format!(
            "near-monotone factor must be finite and positive, got {phi}"
        )));
    }
    let gammas: Vec<(usize, f64)> = trace
        .records
        .iter()
        .map(|r| r.gamma.map(|g| (r.n, g)))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            Error::InvalidInput("trace has no gamma values; rerun with a known solution".into())
        })?;
    let mut first_violation = None;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut steps_checked = 0;
    for pair in gammas.windows(2) {
        let (n, before) = pair[0];
        let (_, after) = pair[1];
        let factor = match variant {
            FejerVariant::Monotone => 1.0,
            FejerVariant::NearMonotone { phi, tau } => {
                let t = tau.value(n);
                1.0 + 2.0 * phi * phi * t * t
            }
        };
        let bound = factor * before + FEJER_SLACK * (1.0 + before);
        let excess = after - bound;
        worst_excess = worst_excess.max(excess);
        if excess > 0.0 && first_violation.is_none() {
            first_violation = Some(n);
        }
        steps_checked += 1;
    }
    if steps_checked == 0 {
        worst_excess = 0.0;
    }
    Ok(FejerReport {
        holds: first_violation.is_none(),
        first_violation,
        worst_excess,
        steps_checked,
    })
}
