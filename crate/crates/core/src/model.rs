//! Closed-form structural recovery model.
//!
//! For firms whose log asset value at maturity is normal with standard
//! deviation `B` conditional on the market factor, the expected recovery of
//! defaulted debt as a function of the default probability is
//!
//! ```text
//! RR(PD) = exp(-B·Φ⁻¹(PD) + B²/2) · Φ(Φ⁻¹(PD) - B) / PD
//! L(PD)  = PD · (1 - RR(PD))
//! ```
//!
//! with `B = √((1-c)·σ²·T)`. Both are evaluated through `ln Φ` and
//! exponentiated once, which keeps small default probabilities from turning
//! into an `∞ · 0` product.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{log_norm_cdf, norm_cdf_inv, Probability};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("default probability {0} must lie strictly between 0 and 1")]
    PdOutOfDomain(f64),
    #[error("compound parameter B must be finite and non-negative, got {0}")]
    InvalidB(f64),
    #[error("invalid model parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("curve grid must be strictly increasing inside (0, 1)")]
    InvalidGrid,
}

/// Parameters of the correlated asset diffusion shared by every firm in a
/// portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Drift per year.
    pub mu: f64,
    /// Volatility per square-root year.
    pub sigma: f64,
    /// Correlation with the market factor, in `[0, 1)`.
    pub c: f64,
    /// Model-maturity in years.
    pub maturity: f64,
    /// Initial asset value.
    pub v0: f64,
    /// Face value of the zero-coupon debt.
    pub face_value: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |name, value, reason| Err(ModelError::InvalidParam { name, value, reason });
        if !self.mu.is_finite() {
            return bad("mu", self.mu, "must be finite");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma", self.sigma, "must be positive");
        }
        if !(0.0..1.0).contains(&self.c) {
            return bad("c", self.c, "must lie in [0, 1)");
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return bad("maturity", self.maturity, "must be positive");
        }
        if !(self.v0 > 0.0 && self.v0.is_finite()) {
            return bad("v0", self.v0, "must be positive");
        }
        if !(self.face_value > 0.0 && self.face_value.is_finite()) {
            return bad("face_value", self.face_value, "must be positive");
        }
        Ok(())
    }

    /// Drift of `ln V` over the horizon, `(μ - σ²/2)·T`.
    pub fn log_drift(&self) -> f64 {
        (self.mu - 0.5 * self.sigma * self.sigma) * self.maturity
    }

    /// Standard deviation of the market part of `ln V(T)`.
    pub fn market_scale(&self) -> f64 {
        (self.c * self.maturity).sqrt() * self.sigma
    }

    /// Standard deviation of the idiosyncratic part of `ln V(T)`.
    pub fn idiosyncratic_scale(&self) -> f64 {
        ((1.0 - self.c) * self.maturity).sqrt() * self.sigma
    }

    /// Default probability conditional on a standard normal market shock.
    pub fn conditional_pd(&self, market_shock: f64) -> f64 {
        let threshold = (self.face_value / self.v0).ln() - self.log_drift();
        crate::numerics::norm_cdf(
            (threshold - self.market_scale() * market_shock) / self.idiosyncratic_scale(),
        )
    }

    /// Unconditional default probability at maturity.
    pub fn unconditional_pd(&self) -> f64 {
        let threshold = (self.face_value / self.v0).ln() - self.log_drift();
        crate::numerics::norm_cdf(threshold / (self.sigma * self.maturity.sqrt()))
    }
}

/// The compound parameter `B`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompoundB(f64);

impl CompoundB {
    /// `b = 0` is accepted as the fully correlated limit.
    pub fn new(b: f64) -> Result<Self, ModelError> {
        if b >= 0.0 && b.is_finite() {
            Ok(Self(b))
        } else {
            Err(ModelError::InvalidB(b))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `B = √((1-c)·σ²·T)`.
pub fn compound_b(params: &ModelParams) -> CompoundB {
    CompoundB(((1.0 - params.c) * params.sigma * params.sigma * params.maturity).sqrt())
}

/// Recovery and loss at one default probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub pd: Probability,
    pub rr: f64,
    pub loss: f64,
}

fn check_pd(pd: f64) -> Result<(), ModelError> {
    if pd > 0.0 && pd < 1.0 {
        Ok(())
    } else {
        Err(ModelError::PdOutOfDomain(pd))
    }
}

/// `ln(exp(-b·x + b²/2)·Φ(x - b))` with `x = Φ⁻¹(pd)`, i.e. `ln(pd·RR)`.
fn log_recovered_mass(pd: f64, b: f64) -> Result<f64, ModelError> {
    let x = norm_cdf_inv(pd).map_err(|_| ModelError::PdOutOfDomain(pd))?;
    Ok(-b * x + 0.5 * b * b + log_norm_cdf(x - b))
}

/// Evaluates recovery and loss together.
pub fn evaluate(pd: f64, b: CompoundB) -> Result<CurvePoint, ModelError> {
    check_pd(pd)?;
    let pd_p = Probability::new(pd).expect("checked above");
    if b.0 == 0.0 {
        return Ok(CurvePoint {
            pd: pd_p,
            rr: 1.0,
            loss: 0.0,
        });
    }
    let log_mass = log_recovered_mass(pd, b.0)?;
    let mass = log_mass.exp();
    let rr = (log_mass - pd.ln()).exp().min(1.0);
    let loss = (pd - mass).max(0.0);
    Ok(CurvePoint { pd: pd_p, rr, loss })
}

/// Expected recovery rate of defaulted debt at default probability `pd`.
pub fn structural_rr(pd: f64, b: CompoundB) -> Result<f64, ModelError> {
    evaluate(pd, b).map(|p| p.rr)
}

/// Expected portfolio loss `PD·(1 - RR)`.
pub fn expected_loss(pd: f64, b: CompoundB) -> Result<f64, ModelError> {
    evaluate(pd, b).map(|p| p.loss)
}

/// The default PD grid for curve sampling: 0.01, 0.02, …, 0.99.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

/// One recovery/loss curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub b: CompoundB,
    pub points: Vec<CurvePoint>,
}

/// Samples recovery and loss curves for each `b` over `grid`.
pub fn sample_curves(b_values: &[CompoundB], grid: &[f64]) -> Result<Vec<Curve>, ModelError> {
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    if !increasing || grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(ModelError::InvalidGrid);
    }
    b_values
        .iter()
        .map(|&b| {
            let points = grid
                .iter()
                .map(|&pd| evaluate(pd, b))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Curve { b, points })
        })
        .collect()
}
