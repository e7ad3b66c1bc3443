//! Proximal maps for the handful of convex functions the solvers need.
//!
//! Each variant knows how to evaluate `prox_{lambda f}(x) = argmin_t f(t) +
//! ||t - x||^2 / (2 lambda)` in closed form, so no inner iteration is
//! involved. For a quadratic the minimizer solves a symmetric positive
//! definite system, for a weighted l1 norm it is the soft-threshold map, and
//! for an indicator function it is the metric projection onto the set.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{Point, check_finite, dim_mismatch};
use crate::sets::ConvexSet;
use crate::tolerances::PSD_TOL;

#[derive(Clone, Debug)]
pub enum ProxFunction {
    /// f(t) = <At, t> / 2 - <b, t> with A symmetric positive semidefinite.
    Quadratic { a: DMatrix<f64>, b: DVector<f64> },
    /// f(t) = weight * sum_i |t_i|.
    L1 { weight: f64 },
    /// f(t) = 0 on the set and +infinity outside it.
    Indicator { set: ConvexSet },
}

impl ProxFunction {
    /// Quadratic f(t) = <At, t> / 2 - <b, t>, given as dense rows. The matrix
    /// must be square, symmetric, and positive semidefinite up to a small
    /// eigenvalue tolerance; asymmetry or a genuinely negative eigenvalue is
    /// rejected because the prox below assumes a convex objective.
    pub fn quadratic(rows: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "quadratic term needs at least one row".into(),
            ));
        }
        for row in &rows {
            if row.len() != n {
                return Err(dim_mismatch("quadratic matrix row", n, row.len()));
            }
            check_finite("quadratic matrix entry", row)?;
        }
        if b.len() != n {
            return Err(dim_mismatch("quadratic linear term", n, b.len()));
        }
        check_finite("quadratic linear term", &b)?;
        let a = DMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
        let asym = (&a - a.transpose()).abs().max();
        if asym > PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "quadratic matrix must be symmetric, worst asymmetry {asym:.3e}"
            )));
        }
        let min_eig = a
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "quadratic matrix must be positive semidefinite, \
                 smallest eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self::Quadratic {
            a,
            b: DVector::from_vec(b),
        })
    }

    pub fn l1(weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidInput(format!(
                "l1 weight must be finite and nonnegative, got {weight}"
            )));
        }
        Ok(Self::L1 { weight })
    }

    pub fn indicator(set: ConvexSet) -> Self {
        Self::Indicator { set }
    }

    /// Dimension the function insists on, when it has one. The l1 norm works
    /// in any dimension.
    pub fn dim_constraint(&self) -> Option<usize> {
        match self {
            Self::Quadratic { a, .. } => Some(a.nrows()),
            Self::L1 { .. } => None,
            Self::Indicator { set } => Some(set.dim()),
        }
    }

    /// prox_{lambda f}(x). Requires lambda > 0.
    pub fn prox(&self, lambda: f64, x: &Point) -> Result<Point> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "prox step size must be finite and positive, got {lambda}"
            )));
        }
        if let Some(n) = self.dim_constraint()
            && n != x.dim()
        {
            return Err(dim_mismatch("prox argument", n, x.dim()));
        }
        match self {
            Self::Quadratic { a, b } => {
                // Minimizer of <At,t>/2 - <b,t> + ||t - x||^2 / (2 lambda)
                // solves (I + lambda A) t = x + lambda b.
                let n = a.nrows();
                let system = DMatrix::identity(n, n) + a.scale(lambda);
                let rhs = x.vector() + b.scale(lambda);
                let solved = Cholesky::new(system.clone())
                    .map(|ch| ch.solve(&rhs))
                    .or_else(|| system.lu().solve(&rhs))
                    .ok_or(Error::NumericalFailure {
                        quantity: "quadratic prox system solve".into(),
                    })?;
                Point::from_slice(solved.as_slice())
            }
            Self::L1 { weight } => {
                let shift = lambda * weight;
                let coords: Vec<f64> = x
                    .coords()
                    .iter()
                    .map(|&c| c.signum() * (c.abs() - shift).max(0.0))
                    .collect();
                Point::new(coords)
            }
            Self::Indicator { set } => set.project(x),
        }
    }
}
