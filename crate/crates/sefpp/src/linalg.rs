//! Points in a finite-dimensional real Hilbert space and dense linear
//! operators between such spaces.
//!
//! Everything downstream works with two primitives: [`Point`], a finite
//! vector of coordinates, and [`LinearOperator`], a dense matrix together
//! with a cached spectral norm. The spectral norm is estimated by power
//! iteration on `D* D`, so callers that must stay norm-free can tell from
//! [`LinearOperator::norm_call_count`] whether anyone asked for it.

use std::sync::OnceLock;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances::{POWER_ITERATION_CAP, SPECTRAL_NORM_TOL};

/// A point of a real Hilbert space, stored as a dense coordinate vector.
///
/// Invariants: at least one coordinate, all coordinates finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    v: DVector<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::RejectedParameters(
                "a point needs at least one coordinate".into(),
            ));
        }
        check_finite("point coordinates", &coords)?;
        Ok(Self {
            v: DVector::from_vec(coords),
        })
    }

    /// Builds a point from a slice; same validation as [`Point::new`].
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub(crate) fn from_vector(v: DVector<f64>) -> Self {
        Self { v }
    }

    pub(crate) fn vector(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.v.as_slice()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// Inner product; the points must live in the same space.
    pub fn inner(&self, other: &Point) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(dim_mismatch("inner product", self.dim(), other.dim()));
        }
        Ok(self.v.dot(&other.v))
    }

    /// Euclidean distance to another point of the same space.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(dim_mismatch("distance", self.dim(), other.dim()));
        }
        Ok((&self.v - &other.v).norm())
    }

    /// `self + t * other`, the workhorse of every averaging step.
    pub(crate) fn axpy(&self, t: f64, other: &Point) -> Point {
        Point::from_vector(&self.v + t * &other.v)
    }

    pub(crate) fn scale(&self, t: f64) -> Point {
        Point::from_vector(t * &self.v)
    }

    pub(crate) fn sub(&self, other: &Point) -> Point {
        Point::from_vector(&self.v - &other.v)
    }

    /// True when every coordinate is finite.
    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|c| c.is_finite())
    }

    /// Index of the first non-finite coordinate, if any.
    pub(crate) fn first_non_finite(&self) -> Option<usize> {
        self.v.iter().position(|c| !c.is_finite())
    }
}

/// A dense linear operator `D: R^m -> R^k` with a lazily computed,
/// cached spectral norm.
///
/// The cache is idempotent: racing computations may both run, but both
/// arrive at the same value because power iteration is deterministic.
pub struct LinearOperator {
    matrix: DMatrix<f64>,
    norm_cache: OnceLock<f64>,
    norm_calls: AtomicUsize,
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator")
            .field("shape", &(self.matrix.nrows(), self.matrix.ncols()))
            .field("cached_norm", &self.norm_cache.get())
            .finish()
    }
}

impl Clone for LinearOperator {
    /// Copies the matrix and any cached norm, but starts a fresh norm-call
    /// counter: the counter instruments one instance, not the value.
    fn clone(&self) -> Self {
        Self {
            matrix: self.matrix.clone(),
            norm_cache: self.norm_cache.clone(),
            norm_calls: AtomicUsize::new(0),
        }
    }
}

impl LinearOperator {
    /// Builds an operator from rows; all rows must share a length and all
    /// entries must be finite.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::RejectedParameters(
                "a linear operator needs at least one row and one column".into(),
            ));
        }
        let ncols = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(dim_mismatch(&format!("row {i}"), ncols, row.len()));
            }
            check_finite(&format!("operator row {i}"), row)?;
        }
        let nrows = rows.len();
        let matrix = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::RejectedParameters(
                "a linear operator needs at least one row and one column".into(),
            ));
        }
        check_finite("operator entries", matrix.as_slice())?;
        Ok(Self::from_matrix_unchecked(matrix))
    }

    fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            norm_cache: OnceLock::new(),
            norm_calls: AtomicUsize::new(0),
        }
    }

    /// The identity on `R^n`.
    pub fn identity(n: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(n, n))
    }

    /// The 1x1 operator `x -> c x`.
    pub fn scalar(c: f64) -> Result<Self> {
        Self::new(vec![vec![c]])
    }

    /// The zero operator `R^m -> R^k`.
    pub fn zeros(codomain: usize, domain: usize) -> Result<Self> {
        if codomain == 0 || domain == 0 {
            return Err(Error::RejectedParameters(
                "a linear operator needs at least one row and one column".into(),
            ));
        }
        Ok(Self::from_matrix_unchecked(DMatrix::zeros(
            codomain, domain,
        )))
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `D x`.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.domain_dim() {
            return Err(dim_mismatch("operator domain", self.domain_dim(), x.dim()));
        }
        Ok(Point::from_vector(&self.matrix * x.vector()))
    }

    /// `D* y`, the adjoint applied to a point of the codomain.
    pub fn adjoint_apply(&self, y: &Point) -> Result<Point> {
        if y.dim() != self.codomain_dim() {
            return Err(dim_mismatch(
                "operator codomain",
                self.codomain_dim(),
                y.dim(),
            ));
        }
        Ok(Point::from_vector(self.matrix.tr_mul(y.vector())))
    }

    /// The adjoint as an operator of its own. Transposition is exact, so
    /// `d.adjoint().adjoint()` reproduces `d` entry for entry.
    pub fn adjoint(&self) -> LinearOperator {
        Self::from_matrix_unchecked(self.matrix.transpose())
    }

    /// Spectral norm of the operator, estimated by power iteration on
    /// `D* D` and cached on first success.
    ///
    /// The iteration starts from the normalized all-ones vector and stops
    /// once successive Rayleigh quotients differ by less than
    /// `tol * current`, with a cap of [`POWER_ITERATION_CAP`] iterations.
    /// A start that happens to lie in the kernel of `D* D` restarts from
    /// basis vectors, deterministically.
    ///
    /// Every call is counted, cached or not; see [`Self::norm_call_count`].
    pub fn operator_norm(&self, tol: f64) -> Result<f64> {
        self.norm_calls.fetch_add(1, Ordering::Relaxed);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::RejectedParameters(format!(
                "operator_norm tolerance must be positive and finite, got {tol}"
            )));
        }
        if let Some(&n) = self.norm_cache.get() {
            return Ok(n);
        }
        let n = power_iteration(&self.matrix, tol)?;
        let _ = self.norm_cache.set(n);
        Ok(n)
    }

    /// Spectral norm at the default tolerance [`SPECTRAL_NORM_TOL`].
    pub fn operator_norm_default(&self) -> Result<f64> {
        self.operator_norm(SPECTRAL_NORM_TOL)
    }

    /// The cached spectral norm, when one has been computed.
    pub fn cached_norm(&self) -> Option<f64> {
        self.norm_cache.get().copied()
    }

    /// How many times `operator_norm` has been invoked on this operator.
    /// Norm-free code paths assert this stays zero.
    pub fn norm_call_count(&self) -> usize {
        self.norm_calls.load(Ordering::Relaxed)
    }
}

/// Power iteration on `S = D* D`; returns `sqrt(lambda_max(S))`.
fn power_iteration(matrix: &DMatrix<f64>, tol: f64) -> Result<f64> {
    if matrix.iter().all(|&e| e == 0.0) {
        return Ok(0.0);
    }
    let dim = matrix.ncols();
    let mut v = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    let mut rho_prev: Option<f64> = None;
    let mut best = 0.0_f64;
    let mut restart = 0usize;
    for _ in 0..POWER_ITERATION_CAP {
        let w = matrix * &v;
        let u = matrix.tr_mul(&w);
        let rho = v.dot(&u);
        if !rho.is_finite() {
            return Err(Error::NumericalFailure {
                quantity: "Rayleigh quotient in operator_norm".into(),
            });
        }
        let un = u.norm();
        if un == 0.0 {
            // v lies in the kernel of D* D. Restart from the next basis
            // vector; some basis vector must leave the kernel since D != 0.
            if restart < dim {
                v = DVector::zeros(dim);
                v[restart] = 1.0;
                restart += 1;
                rho_prev = None;
                continue;
            }
            return Ok(0.0);
        }
        best = best.max(rho);
        if let Some(p) = rho_prev
            && (rho - p).abs() < tol * rho
        {
            return Ok(rho.sqrt());
        }
        rho_prev = Some(rho);
        v = u / un;
    }
    Err(Error::NormEstimateStalled {
        best_estimate: best.sqrt(),
        iterations: POWER_ITERATION_CAP,
    })
}

pub(crate) fn dim_mismatch(context: &str, expected: usize, actual: usize) -> Error {
    Error::DimensionMismatch {
        context: context.to_string(),
        expected,
        actual,
    }
}

pub(crate) fn check_finite(context: &str, coords: &[f64]) -> Result<()> {
    match coords.iter().position(|c| !c.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::NonFinite {
            context: context.to_string(),
            coordinate: i,
        }),
    }
}
