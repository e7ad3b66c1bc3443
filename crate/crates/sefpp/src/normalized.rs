//! Two-layer averaging of a Lipschitz quasi-pseudocontractive mapping.
//!
//! For a mapping T with Lipschitz constant L, the operator
//!
//! ```text
//! U = (1 - eta) I + eta T((1 - zeta) I + zeta T)
//! ```
//!
//! keeps exactly the fixed points of T, and whenever T is
//! quasi-pseudocontractive and `0 < eta < zeta < 1 / (1 + sqrt(1 + L^2))`
//! it is quasi-nonexpansive: iterating U cannot move away from Fix(T). That
//! is the property the coupled solvers lean on, since raw
//! quasi-pseudocontractive maps may expand.
//!
//! Composing the two averaged layers bounds the Lipschitz constant of U by
//! `(1 - eta) + eta L (1 - zeta + zeta L)`, which never exceeds `(1 + L)^2`.
//! [`verify_normalization`] measures all of this on samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::mappings::{NonlinearMapping, sampled_lipschitz};
use crate::sets::ConvexSet;
use crate::tolerances::{DECLARED_FIXED_POINT_TOL, LIPSCHITZ_SLACK, QNE_SLACK};

/// A mapping wrapped in the two-layer averaging above.
#[derive(Clone, Debug)]
pub struct NormalizedOperator {
    base: NonlinearMapping,
    eta: f64,
    zeta: f64,
    base_lipschitz: f64,
}

impl NormalizedOperator {
    /// Wraps `base`, enforcing `0 < eta < zeta < 1 / (1 + sqrt(1 + L^2))`
    /// with L the declared Lipschitz constant of `base`. Parameters outside
    /// that range void the quasi-nonexpansiveness guarantee and are rejected;
    /// use [`new_unchecked`](Self::new_unchecked) to experiment anyway.
    pub fn new(base: NonlinearMapping, eta: f64, zeta: f64) -> Result<Self> {
        let l = declared_lipschitz(&base)?;
        let bound = 1.0 / (1.0 + (1.0 + l * l).sqrt());
        if !(eta > 0.0 && eta < zeta && zeta < bound) {
            return Err(Error::RejectedParameters(format!(
                "averaging weights need 0 < eta < zeta < {bound:.6} \
                 (Lipschitz constant {l}), got eta = {eta}, zeta = {zeta}"
            )));
        }
        Self::build(base, eta, zeta, l)
    }

    /// Wraps `base` with weights that may violate the guarantee range. Only
    /// basic sanity is enforced: both weights in (0, 1). Fixed points are
    /// still preserved; quasi-nonexpansiveness is the caller's risk.
    pub fn new_unchecked(base: NonlinearMapping, eta: f64, zeta: f64) -> Result<Self> {
        let l = declared_lipschitz(&base)?;
        for (name, w) in [("eta", eta), ("zeta", zeta)] {
            if !w.is_finite() || w <= 0.0 || w >= 1.0 {
                return Err(Error::RejectedParameters(format!(
                    "averaging weight {name} must lie in (0, 1), got {w}"
                )));
            }
        }
        Self::build(base, eta, zeta, l)
    }

    fn build(base: NonlinearMapping, eta: f64, zeta: f64, l: f64) -> Result<Self> {
        let op = Self {
            base,
            eta,
            zeta,
            base_lipschitz: l,
        };
        // Fix(U) = Fix(T) is the whole point; make sure the declared points
        // survive the wrapping instead of trusting the algebra blindly.
        for (i, p) in op.base.fixed_points().iter().enumerate() {
            let drift = op.evaluate(p)?.distance(p)?;
            if drift > DECLARED_FIXED_POINT_TOL {
                return Err(Error::RejectedParameters(format!(
                    "fixed point #{i} moves by {drift:.3e} under the averaged mapping"
                )));
            }
        }
        Ok(op)
    }

    /// U x = (1 - eta) x + eta T((1 - zeta) x + zeta T x).
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        let tx = self.base.evaluate(x)?;
        let inner = x.scale(1.0 - self.zeta).axpy(self.zeta, &tx);
        let t_inner = self.base.evaluate(&inner)?;
        Ok(x.scale(1.0 - self.eta).axpy(self.eta, &t_inner))
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn base(&self) -> &NonlinearMapping {
        &self.base
    }

    pub fn base_lipschitz(&self) -> f64 {
        self.base_lipschitz
    }

    /// Lipschitz bound that composition gives U:
    /// (1 - eta) + eta L (1 - zeta + zeta L), at most (1 + L)^2.
    pub fn provable_lipschitz(&self) -> f64 {
        let l = self.base_lipschitz;
        (1.0 - self.eta) + self.eta * l * (1.0 - self.zeta + self.zeta * l)
    }
}

fn declared_lipschitz(base: &NonlinearMapping) -> Result<f64> {
    base.lipschitz().ok_or_else(|| {
        Error::RejectedParameters(
            "averaging needs a declared Lipschitz constant on the base mapping".into(),
        )
    })
}

/// Default averaging weights for a mapping with Lipschitz constant `l`:
/// zeta takes 90% of the admissible range and eta half of zeta.
pub fn default_eta_zeta(l: f64) -> Result<(f64, f64)> {
    if !l.is_finite() || l < 0.0 {
        return Err(Error::InvalidInput(format!(
            "Lipschitz constant must be finite and nonnegative, got {l}"
        )));
    }
    let zeta = 0.9 / (1.0 + (1.0 + l * l).sqrt());
    Ok((zeta / 2.0, zeta))
}

/// What sampling says about a wrapped operator on a bounded region.
#[derive(Clone, Debug)]
pub struct NormalizationReport {
    /// Every declared fixed point of the base stays fixed under U.
    pub fixed_points_preserved: bool,
    pub worst_fixed_point_drift: f64,
    /// Largest sampled ||Ux - Uy|| / ||x - y||.
    pub sampled_lipschitz: f64,
    /// Sampled Lipschitz ratio stays within (1 + L)^2 plus slack.
    pub lipschitz_within_bound: bool,
    /// Whether the stricter L^2 figure happened to hold on these samples.
    /// Recorded for interest only: it generally fails when L < 1, where
    /// L^2 < L and even the base mapping itself moves points too much.
    pub squared_lipschitz_held: bool,
    /// ||Ux - p|| <= ||x - p|| held for every sample and declared fixed
    /// point, up to slack.
    pub quasi_nonexpansive: bool,
    /// Largest sampled ||Ux - p|| - ||x - p||.
    pub worst_expansion: f64,
    pub samples: usize,
}

/// Samples the wrapped operator on a bounded region and reports whether the
/// properties the averaging is supposed to deliver actually show up: fixed
/// points preserved, Lipschitz ratio within the composition bound, and no
/// expansion relative to the declared fixed points. The base mapping must
/// declare at least one fixed point. Deterministic for fixed arguments.
pub fn verify_normalization(
    op: &NormalizedOperator,
    domain: &ConvexSet,
    samples: usize,
) -> Result<NormalizationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput(
            "normalization check needs at least one sample".into(),
        ));
    }
    let fixed = op.base().fixed_points();
    if fixed.is_empty() {
        return Err(Error::InvalidInput(
            "normalization check needs at least one declared fixed point".into(),
        ));
    }
    let mut worst_drift: f64 = 0.0;
    for p in fixed {
        worst_drift = worst_drift.max(op.evaluate(p)?.distance(p)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EF9_0002);
    let sampled =
        sampled_lipschitz(|x| op.evaluate(x), domain, samples, &mut rng)?.ok_or_else(|| {
            Error::InvalidInput("region is degenerate: no pair of distinct sample points".into())
        })?;
    let l = op.base_lipschitz();
    let loose = (1.0 + l) * (1.0 + l);

    let mut worst_expansion = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = domain.sample(&mut rng)?;
        let ux = op.evaluate(&x)?;
        for p in fixed {
            worst_expansion = worst_expansion.max(ux.distance(p)? - x.distance(p)?);
        }
    }

    Ok(NormalizationReport {
        fixed_points_preserved: worst_drift <= DECLARED_FIXED_POINT_TOL,
        worst_fixed_point_drift: worst_drift,
        sampled_lipschitz: sampled,
        lipschitz_within_bound: sampled <= loose + LIPSCHITZ_SLACK,
        squared_lipschitz_held: sampled <= l * l + LIPSCHITZ_SLACK,
        quasi_nonexpansive: worst_expansion <= QNE_SLACK,
        worst_expansion,
        samples,
    })
}
