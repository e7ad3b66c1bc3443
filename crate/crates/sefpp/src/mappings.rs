//! Nonlinear self-maps: the fixed-point operators the solvers iterate.
//!
//! A [`NonlinearMapping`] bundles an evaluation closure with the metadata the
//! solvers and diagnostics need: an optional Lipschitz constant, any fixed
//! points the caller can vouch for, and a coarse contractivity class. The
//! metadata is declarative. Nothing here tries to prove a Lipschitz constant
//! or a class from the closure; the sampled checkers below can refute a claim
//! on a bounded region, which is as much as pointwise evaluation allows.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Point, check_finite, dim_mismatch};
use crate::prox::ProxFunction;
use crate::sets::ConvexSet;
use crate::tolerances::{
    DECLARED_FIXED_POINT_TOL, QPC_SLACK, RESOLVENT_INNER_TOL, RESOLVENT_ITERATION_CAP,
};

/// Seed for the sampled checkers, fixed so repeated checks agree.
const SAMPLING_SEED: u64 = 0x5EF9;

/// How a mapping behaves relative to its fixed-point set. The classes are
/// nested: quasi-nonexpansive maps are demicontractive with constant 0, and
/// demicontractive maps are quasi-pseudocontractive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MappingClass {
    QuasiNonexpansive,
    /// ||Ty - p||^2 <= ||y - p||^2 + k ||y - Ty||^2 with the stated k < 1.
    Demicontractive(f64),
    /// ||Ty - p||^2 <= ||y - p||^2 + ||y - Ty||^2.
    QuasiPseudocontractive,
    Unclassified,
}

type Evaluator = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A self-map of R^n together with declared analytic metadata.
#[derive(Clone)]
pub struct NonlinearMapping {
    evaluator: Arc<Evaluator>,
    lipschitz: Option<f64>,
    fixed_points: Vec<Point>,
    class: MappingClass,
    /// Semi-compactness (every bounded sequence with ||y_n - T y_n|| -> 0 has
    /// a convergent subsequence) matters for norm convergence of the solvers
    /// but is not checkable pointwise, so it is carried as a declaration.
    semi_compact: bool,
}

impl fmt::Debug for NonlinearMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearMapping")
            .field("lipschitz", &self.lipschitz)
            .field("fixed_points", &self.fixed_points.len())
            .field("class", &self.class)
            .field("semi_compact", &self.semi_compact)
            .finish()
    }
}

impl NonlinearMapping {
    pub fn from_fn(f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(f),
            lipschitz: None,
            fixed_points: Vec::new(),
            class: MappingClass::Unclassified,
            semi_compact: false,
        }
    }

    /// Applies a scalar function coordinate by coordinate.
    pub fn from_scalar_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::from_fn(move |x| Point::new(x.coords().iter().map(|&c| f(c)).collect()))
    }

    pub fn identity() -> Self {
        let mut map = Self::from_fn(|x| Ok(x.clone()));
        map.lipschitz = Some(1.0);
        map.class = MappingClass::QuasiNonexpansive;
        map
    }

    /// T x = scale * x + offset, acting on points of the offset's dimension.
    pub fn affine(scale: f64, offset: Vec<f64>) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::InvalidInput(format!(
                "affine scale must be finite, got {scale}"
            )));
        }
        check_finite("affine offset", &offset)?;
        let dim = offset.len();
        if dim == 0 {
            return Err(Error::InvalidInput("affine offset must be nonempty".into()));
        }
        let mut map = Self::from_fn(move |x| {
            if x.dim() != dim {
                return Err(dim_mismatch("affine mapping argument", dim, x.dim()));
            }
            Point::new(
                x.coords()
                    .iter()
                    .zip(&offset)
                    .map(|(&c, &b)| scale * c + b)
                    .collect(),
            )
        });
        map.lipschitz = Some(scale.abs());
        if scale.abs() <= 1.0 {
            map.class = MappingClass::QuasiNonexpansive;
        }
        Ok(map)
    }

    /// T x = A x + b with a square matrix A. The Lipschitz constant is left
    /// undeclared; declare one via [`with_lipschitz`](Self::with_lipschitz)
    /// if downstream code needs it, so that no spectral norm is computed
    /// behind the caller's back.
    pub fn affine_matrix(rows: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "affine matrix needs at least one row".into(),
            ));
        }
        for row in &rows {
            if row.len() != n {
                return Err(dim_mismatch("affine matrix row", n, row.len()));
            }
            check_finite("affine matrix entry", row)?;
        }
        if offset.len() != n {
            return Err(dim_mismatch("affine matrix offset", n, offset.len()));
        }
        check_finite("affine matrix offset", &offset)?;
        let a = DMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
        let b = DVector::from_vec(offset);
        Ok(Self::from_fn(move |x| {
            if x.dim() != n {
                return Err(dim_mismatch("affine mapping argument", n, x.dim()));
            }
            let out = &a * x.vector() + &b;
            Point::new(out.iter().copied().collect())
        }))
    }

    /// Metric projection onto a closed convex set, as a mapping.
    pub fn projection(set: ConvexSet) -> Self {
        let mut map = Self::from_fn(move |x| set.project(x));
        map.lipschitz = Some(1.0);
        map.class = MappingClass::QuasiNonexpansive;
        map
    }

    /// prox_{lambda f} as a mapping. Proximal maps are firmly nonexpansive.
    pub fn proximal(f: ProxFunction, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "proximal step size must be finite and positive, got {lambda}"
            )));
        }
        let mut map = Self::from_fn(move |x| f.prox(lambda, x));
        map.lipschitz = Some(1.0);
        map.class = MappingClass::QuasiNonexpansive;
        Ok(map)
    }

    /// The resolvent q -> the solution of VI(lambda F + I - q, K), evaluated
    /// through [`resolvent_vi`]. Nonexpansive for monotone F.
    pub fn resolvent(f: NonlinearMapping, k: ConvexSet, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "resolvent parameter must be finite and positive, got {lambda}"
            )));
        }
        let mut map = Self::from_fn(move |q| resolvent_vi(&f, &k, lambda, q));
        map.lipschitz = Some(1.0);
        map.class = MappingClass::QuasiNonexpansive;
        Ok(map)
    }

    /// Declares a Lipschitz constant. Declarations are trusted downstream,
    /// e.g. when choosing normalization parameters, so declare honestly.
    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidInput(format!(
                "Lipschitz constant must be finite and nonnegative, got {l}"
            )));
        }
        self.lipschitz = Some(l);
        Ok(self)
    }

    /// Declares fixed points, verifying each one actually stays put.
    pub fn with_fixed_points(mut self, points: Vec<Point>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            let drift = self.evaluate(p)?.distance(p)?;
            if drift > DECLARED_FIXED_POINT_TOL {
                return Err(Error::RejectedParameters(format!(
                    "declared fixed point #{i} moves by {drift:.3e} under the mapping"
                )));
            }
        }
        self.fixed_points = points;
        Ok(self)
    }

    pub fn with_class(mut self, class: MappingClass) -> Self {
        self.class = class;
        self
    }

    pub fn with_semi_compact(mut self, flag: bool) -> Self {
        self.semi_compact = flag;
        self
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn fixed_points(&self) -> &[Point] {
        &self.fixed_points
    }

    pub fn class(&self) -> MappingClass {
        self.class
    }

    pub fn semi_compact(&self) -> bool {
        self.semi_compact
    }

    /// Evaluates the mapping, enforcing that it is a finite self-map: the
    /// output must keep the input's dimension, and a non-finite output is
    /// reported with the offending coordinate.
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        let out = (self.evaluator)(x)?;
        if out.dim() != x.dim() {
            return Err(dim_mismatch("mapping output", x.dim(), out.dim()));
        }
        if let Some(coordinate) = out.first_non_finite() {
            return Err(Error::NonFinite {
                context: "mapping output".into(),
                coordinate,
            });
        }
        Ok(out)
    }
}

/// Solves the regularized variational inequality behind a resolvent: find
/// y in K with <lambda F(y) + y - q, z - y> >= 0 for all z in K, by projected
/// gradient steps on the strongly monotone field lambda F + I - q.
///
/// The step size is 1 / (1 + lambda L) when F declares a Lipschitz constant
/// L, and the conservative 0.1 / lambda otherwise. Convergence is declared
/// when the unit-step natural residual ||y - P_K(y - (lambda F(y) + y - q))||
/// drops to the inner tolerance; hitting the iteration cap reports the best
/// residual and the last iterate instead of silently returning it.
pub fn resolvent_vi(f: &NonlinearMapping, k: &ConvexSet, lambda: f64, q: &Point) -> Result<Point> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "resolvent parameter must be finite and positive, got {lambda}"
        )));
    }
    if k.dim() != q.dim() {
        return Err(dim_mismatch("resolvent argument", k.dim(), q.dim()));
    }
    let step = match f.lipschitz() {
        Some(l) => 1.0 / (1.0 + lambda * l),
        None => 0.1 / lambda,
    };
    let mut y = k.project(q)?;
    let mut residual = f64::INFINITY;
    for _ in 0..RESOLVENT_ITERATION_CAP {
        let fy = f.evaluate(&y)?;
        // g = lambda F(y) + y - q
        let g = fy.scale(lambda).axpy(1.0, &y).sub(q);
        residual = y.sub(&k.project(&y.sub(&g))?).norm();
        if residual <= RESOLVENT_INNER_TOL {
            return Ok(y);
        }
        y = k.project(&y.axpy(-step, &g))?;
    }
    Err(Error::InnerSolveStalled {
        residual,
        last_iterate: y.coords().to_vec(),
        iterations: RESOLVENT_ITERATION_CAP,
    })
}

/// Outcome of a sampled quasi-pseudocontractivity check.
#[derive(Clone, Debug)]
pub struct QpcReport {
    pub holds: bool,
    /// Largest observed ||Ty - p||^2 - ||y - p||^2 - ||y - Ty||^2.
    pub worst_violation: f64,
    pub samples: usize,
}

/// Samples the quasi-pseudocontractivity inequality for T at the point p over
/// a bounded region. A positive `worst_violation` beyond a small slack
/// refutes the property on that region; staying nonpositive is evidence, not
/// proof. Deterministic for fixed arguments.
pub fn check_quasi_pseudocontractive(
    t: &NonlinearMapping,
    p: &Point,
    domain: &ConvexSet,
    samples: usize,
) -> Result<QpcReport> {
    if samples == 0 {
        return Err(Error::InvalidInput(
            "quasi-pseudocontractivity check needs at least one sample".into(),
        ));
    }
    if domain.dim() != p.dim() {
        return Err(dim_mismatch("check region", p.dim(), domain.dim()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let y = domain.sample(&mut rng)?;
        let ty = t.evaluate(&y)?;
        let violation = ty.distance(p)?.powi(2) - y.distance(p)?.powi(2) - y.distance(&ty)?.powi(2);
        worst = worst.max(violation);
    }
    Ok(QpcReport {
        holds: worst <= QPC_SLACK,
        worst_violation: worst,
        samples,
    })
}

/// Largest ratio ||f(x) - f(y)|| / ||x - y|| over sampled pairs, or None when
/// the region yields no pair of distinct points.
pub(crate) fn sampled_lipschitz(
    f: impl Fn(&Point) -> Result<Point>,
    domain: &ConvexSet,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for _ in 0..pairs {
        let x = domain.sample(rng)?;
        let y = domain.sample(rng)?;
        let gap = x.distance(&y)?;
        if gap == 0.0 {
            continue;
        }
        let ratio = f(&x)?.distance(&f(&y)?)? / gap;
        best = Some(best.map_or(ratio, |b| b.max(ratio)));
    }
    Ok(best)
}

/// Sampled lower bound for the Lipschitz constant of T on a bounded region.
/// `pairs` counts sampled point pairs. Deterministic for fixed arguments.
/// A region with no two distinct sample points cannot support an estimate
/// and is rejected.
pub fn estimate_lipschitz(t: &NonlinearMapping, domain: &ConvexSet, pairs: usize) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::InvalidInput(
            "Lipschitz estimation needs at least one sample pair".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    sampled_lipschitz(|x| t.evaluate(x), domain, pairs, &mut rng)?.ok_or_else(|| {
        Error::InvalidInput("region is degenerate: no pair of distinct sample points".into())
    })
}
