//! Monte Carlo oracle for the correlated asset diffusion
//!
//! ```text
//! dV/V = μ dt + √c σ dW_m + √(1-c) σ dW_k
//! ```
//!
//! sampled exactly at maturity, plus a generator of synthetic issuer/rating/
//! event tables driven by the same dynamics.

mod synthetic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_indexed, Execution};
use crate::model::{ModelError, ModelParams};
use crate::numerics::{substream, SeedSpec};

pub use synthetic::{
    generate_dataset, generate_dataset_with, CohortTruth, Dataset, GeneratorError, LatentOutcome,
    Manifest, RatingTarget, RatingTruth, RowCounts, SyntheticDatasetConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("firm count must be at least 1")]
    NoFirms,
    #[error("realization count must be at least 1")]
    NoRealizations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    /// Firms per portfolio (K).
    pub firms: usize,
    /// Market realizations (M).
    pub realizations: u64,
    /// Master seed; realization `i` draws from substream `i`.
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if self.firms == 0 {
            return Err(SimError::NoFirms);
        }
        if self.realizations == 0 {
            return Err(SimError::NoRealizations);
        }
        Ok(())
    }
}

/// Portfolio statistics of one market scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketRealization {
    pub index: u64,
    /// Standard normal market shock `Z_m`.
    pub market_shock: f64,
    pub defaults: u64,
    /// Fraction of firms with `V(T) < F`.
    pub pd_real: f64,
    /// Mean `V(T)/F` over defaulted firms; absent without defaults.
    pub rr_real: Option<f64>,
    /// Mean of `(1 - V/F)·1{default}` over all firms.
    pub loss_real: f64,
}

/// Draws `(Z_m, [ln(V_k(T)/V0)])` for one realization.
fn log_terminal_values(config: &SimConfig, index: u64) -> (f64, impl Iterator<Item = f64>) {
    let p = config.params;
    let mut stream = substream(SeedSpec::new(config.seed, index));
    let z_m = stream.normal();
    let common = p.log_drift() + p.market_scale() * z_m;
    let idio = p.idiosyncratic_scale();
    let values = stream.take(config.firms).map(move |z_k| common + idio * z_k);
    (z_m, values)
}

/// Terminal asset values `V_k(T)` of all firms in realization `index`.
pub fn terminal_values(config: &SimConfig, index: u64) -> Vec<f64> {
    let v0 = config.params.v0;
    let (_, values) = log_terminal_values(config, index);
    values.map(|x| v0 * x.exp()).collect()
}

fn realize(config: &SimConfig, index: u64) -> MarketRealization {
    let p = config.params;
    let log_face = (p.face_value / p.v0).ln();
    let (market_shock, values) = log_terminal_values(config, index);
    let mut defaults = 0u64;
    let mut recovered = 0.0;
    for x in values {
        if x < log_face {
            defaults += 1;
            recovered += (x - log_face).exp();
        }
    }
    let k = config.firms as f64;
    MarketRealization {
        index,
        market_shock,
        defaults,
        pd_real: defaults as f64 / k,
        rr_real: (defaults > 0).then(|| recovered / defaults as f64),
        loss_real: (defaults as f64 - recovered) / k,
    }
}

/// Runs all realizations using the default execution mode.
pub fn simulate(config: &SimConfig) -> Result<Vec<MarketRealization>, SimError> {
    simulate_with(config, Execution::default())
}

/// Runs all realizations; output is identical for every execution mode.
pub fn simulate_with(
    config: &SimConfig,
    execution: Execution,
) -> Result<Vec<MarketRealization>, SimError> {
    config.validate()?;
    Ok(map_indexed(config.realizations, execution, |i| realize(config, i)))
}
