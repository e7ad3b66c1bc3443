//! Closed convex sets with metric projections: boxes, balls, halfspaces.

use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::linalg::{Point, check_finite, dim_mismatch};

/// A closed convex subset of `R^n` supporting exact metric projection.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    /// `{ x : lo <= x <= hi }` componentwise. Bounds may be infinite.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `{ x : |x - center| <= radius }`.
    Ball { center: Point, radius: f64 },
    /// `{ x : <normal, x> <= offset }`.
    Halfspace { normal: Point, offset: f64 },
}

impl ConvexSet {
    /// A box with componentwise bounds; `lo <= hi` and neither may be NaN.
    pub fn box_set(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::RejectedParameters(
                "a box needs at least one coordinate".into(),
            ));
        }
        if lo.len() != hi.len() {
            return Err(dim_mismatch("box bounds", lo.len(), hi.len()));
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::RejectedParameters(format!(
                    "box bounds must satisfy lo <= hi, violated at coordinate {i}: [{l}, {h}]"
                )));
            }
        }
        Ok(Self::Box { lo, hi })
    }

    /// The whole space `R^n`, as a box with infinite bounds.
    pub fn whole_space(dim: usize) -> Result<Self> {
        Self::box_set(vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim])
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::RejectedParameters(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::RejectedParameters(
                "halfspace normal must be nonzero".into(),
            ));
        }
        if !offset.is_finite() {
            return Err(Error::RejectedParameters(format!(
                "halfspace offset must be finite, got {offset}"
            )));
        }
        Ok(Self::Halfspace { normal, offset })
    }

    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            Self::Ball { center, .. } => center.dim(),
            Self::Halfspace { normal, .. } => normal.dim(),
        }
    }

    /// Metric projection onto the set.
    ///
    /// Box: componentwise clamp. Ball: radial pull-back. Halfspace
    /// `<a, x> <= b`: `x - ((<a, x> - b) / |a|^2) a` when violated.
    pub fn project(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.dim() {
            return Err(dim_mismatch("projection", self.dim(), x.dim()));
        }
        match self {
            Self::Box { lo, hi } => {
                let coords = x
                    .coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(&c, (&l, &h))| c.clamp(l, h))
                    .collect();
                Point::new(coords)
            }
            Self::Ball { center, radius } => {
                let d = x.sub(center);
                let dist = d.norm();
                if dist <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center.axpy(radius / dist, &d))
                }
            }
            Self::Halfspace { normal, offset } => {
                let value = normal.inner(x)?;
                if value <= *offset {
                    Ok(x.clone())
                } else {
                    let scale = (value - offset) / normal.inner(normal)?;
                    Ok(x.axpy(-scale, normal))
                }
            }
        }
    }

    /// Membership up to a slack on the defining inequalities.
    pub fn contains(&self, x: &Point, slack: f64) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(dim_mismatch("membership", self.dim(), x.dim()));
        }
        Ok(match self {
            Self::Box { lo, hi } => x
                .coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&c, (&l, &h))| c >= l - slack && c <= h + slack),
            Self::Ball { center, radius } => x.distance(center)? <= radius + slack,
            Self::Halfspace { normal, offset } => normal.inner(x)? <= offset + slack,
        })
    }

    /// True when the set is bounded, which is what uniform sampling needs.
    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Box { lo, hi } => {
                lo.iter().all(|l| l.is_finite()) && hi.iter().all(|h| h.is_finite())
            }
            Self::Ball { .. } => true,
            Self::Halfspace { .. } => false,
        }
    }

    /// Draws a uniform sample from a bounded set. Boxes sample each
    /// coordinate independently; balls combine a uniform direction with a
    /// `u^(1/n)`-distributed radius. Unbounded sets are rejected.
    pub fn sample(&self, rng: &mut impl Rng) -> Result<Point> {
        if !self.is_bounded() {
            return Err(Error::InvalidInput(
                "uniform sampling needs a bounded set; boxes with infinite bounds and halfspaces do not qualify".into(),
            ));
        }
        match self {
            Self::Box { lo, hi } => {
                let coords = lo
                    .iter()
                    .zip(hi)
                    .map(|(&l, &h)| if l == h { l } else { rng.random_range(l..=h) })
                    .collect();
                Point::new(coords)
            }
            Self::Ball { center, radius } => {
                let n = center.dim();
                let mut dir: Vec<f64> = (0..n)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect();
                let mut norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm == 0.0 {
                    dir = vec![1.0; n];
                    norm = (n as f64).sqrt();
                }
                let r = radius * rng.random_range(0.0..=1.0_f64).powf(1.0 / n as f64);
                let step = Point::new(dir)?;
                check_finite("ball sample", step.coords())?;
                Ok(center.axpy(r / norm, &step))
            }
            Self::Halfspace { .. } => unreachable!("halfspaces are unbounded"),
        }
    }
}
