//! Special functions and the random-stream contract used by every other
//! module.

mod normal;
mod rng;

use thiserror::Error;

pub use normal::{erfc, erfcx, log_norm_cdf, norm_cdf, norm_cdf_inv, norm_pdf};
pub use rng::{substream, SeedSpec, Substream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self, NumericsError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(NumericsError::InvalidProbability(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = NumericsError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}
