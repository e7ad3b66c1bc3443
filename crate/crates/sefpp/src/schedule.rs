//! Step-size schedules and the summability predicates the solvers check.
//!
//! Every family here is nonincreasing in `n`, so a range condition on the
//! first emitted value bounds the whole run. Schedules are evaluated at the
//! iteration index recorded in the trace; with the default start index 1,
//! `harmonic(1.0)` emits 1/2, 1/3, 1/4, ...

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauSchedule {
    /// tau_n = value.
    Constant { value: f64 },
    /// tau_n = scale / (n + 1).
    Harmonic { scale: f64 },
    /// tau_n = scale / (n + 1)^exponent.
    Power { scale: f64, exponent: f64 },
}

impl TauSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        check_positive("constant step size", value)?;
        Ok(Self::Constant { value })
    }

    pub fn harmonic(scale: f64) -> Result<Self> {
        check_positive("harmonic scale", scale)?;
        Ok(Self::Harmonic { scale })
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        check_positive("power-law scale", scale)?;
        check_positive("power-law exponent", exponent)?;
        Ok(Self::Power { scale, exponent })
    }

    pub fn value(&self, n: usize) -> f64 {
        let m = n as f64 + 1.0;
        match *self {
            Self::Constant { value } => value,
            Self::Harmonic { scale } => scale / m,
            Self::Power { scale, exponent } => scale / m.powf(exponent),
        }
    }

    /// Whether tau_n -> 0.
    pub fn limit_is_zero(&self) -> bool {
        !matches!(self, Self::Constant { .. })
    }

    /// Whether sum tau_n diverges.
    pub fn sum_diverges(&self) -> bool {
        match *self {
            Self::Constant { .. } | Self::Harmonic { .. } => true,
            Self::Power { exponent, .. } => exponent <= 1.0,
        }
    }

    /// Whether sum tau_n^2 converges.
    pub fn square_summable(&self) -> bool {
        match *self {
            Self::Constant { .. } => false,
            Self::Harmonic { .. } => true,
            Self::Power { exponent, .. } => exponent > 0.5,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Constant { value } => format!("constant {value}"),
            Self::Harmonic { scale } => format!("{scale}/(n+1)"),
            Self::Power { scale, exponent } => format!("{scale}/(n+1)^{exponent}"),
        }
    }
}

/// Relaxation weights for the second averaging in each step. Kept constant:
/// the convergence analysis only needs alpha bounded away from 0 and 1, and
/// a constant is the simplest way to stay there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaSchedule {
    Constant { value: f64 },
}

impl AlphaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 || value >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "relaxation weight must lie strictly inside (0, 1), got {value}"
            )));
        }
        Ok(Self::Constant { value })
    }

    pub fn value(&self, _n: usize) -> f64 {
        match *self {
            Self::Constant { value } => value,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Constant { value } => format!("constant {value}"),
        }
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "{what} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}
