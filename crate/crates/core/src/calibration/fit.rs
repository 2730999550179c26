use serde::{Deserialize, Serialize};

use super::binning::BinnedSeries;
use super::search::minimize;
use super::CalibrationError;
use crate::model::{expected_loss, CompoundB};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Unweighted,
    /// Each bin's squared residual weighted by its point count.
    ByCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub b_lower: f64,
    pub b_upper: f64,
    /// Target accuracy of `b_hat`.
    pub b_tol: f64,
    pub weighting: Weighting,
    pub grid_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            b_lower: 1e-3,
            b_upper: 5.0,
            b_tol: 1e-7,
            weighting: Weighting::Unweighted,
            grid_points: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub b_hat: f64,
    /// Sum of squared loss residuals at `b_hat`.
    pub sse: f64,
    pub n_bins_used: usize,
    pub label: Option<String>,
    pub maturity_years: Option<f64>,
    pub warning: Option<String>,
}

impl FitResult {
    pub fn with_label(mut self, label: impl Into<String>, maturity_years: Option<f64>) -> Self {
        self.label = Some(label.into());
        self.maturity_years = maturity_years;
        self
    }
}

/// Loss-curve objective over the used bins of a series.
#[derive(Debug, Clone)]
pub struct LossObjective {
    targets: Vec<(f64, f64, f64)>,
}

impl LossObjective {
    pub fn new(binned: &BinnedSeries, weighting: Weighting) -> Self {
        let targets = binned
            .used_bins()
            .filter(|b| b.pd_mid > 0.0 && b.pd_mid < 1.0)
            .map(|b| {
                let w = match weighting {
                    Weighting::Unweighted => 1.0,
                    Weighting::ByCount => b.count as f64,
                };
                (b.pd_mid, b.mean_loss.expect("used bins have a loss"), w)
            })
            .collect();
        Self { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `Σ w·(L(pd_mid, b) - mean_loss)²`.
    pub fn sse(&self, b: f64) -> f64 {
        let b = CompoundB::new(b.max(0.0)).expect("non-negative finite b");
        self.targets
            .iter()
            .map(|&(pd, loss, w)| {
                let model = expected_loss(pd, b).expect("pd inside (0, 1)");
                w * (model - loss).powi(2)
            })
            .sum()
    }
}

/// Least-squares fit of `B` to binned mean losses with default options.
pub fn fit_b(binned: &BinnedSeries) -> Result<FitResult, CalibrationError> {
    fit_b_with(binned, &FitOptions::default())
}

pub fn fit_b_with(binned: &BinnedSeries, options: &FitOptions) -> Result<FitResult, CalibrationError> {
    if !(options.b_lower >= 0.0 && options.b_lower < options.b_upper && options.b_upper.is_finite()) {
        return Err(CalibrationError::InvalidOption(format!(
            "bad B search interval [{}, {}]",
            options.b_lower, options.b_upper
        )));
    }
    let objective = LossObjective::new(binned, options.weighting);
    if objective.len() < 2 {
        return Err(CalibrationError::InsufficientBins(objective.len()));
    }
    if objective.targets.iter().all(|&(_, loss, _)| loss == 0.0) {
        let warning = "all binned losses are zero; B is not identified".to_string();
        log::warn!("{warning}");
        return Ok(FitResult {
            b_hat: options.b_lower,
            sse: objective.sse(options.b_lower),
            n_bins_used: objective.len(),
            label: None,
            maturity_years: None,
            warning: Some(warning),
        });
    }
    let m = minimize(
        |b| objective.sse(b),
        options.b_lower,
        options.b_upper,
        options.grid_points,
        options.b_tol,
    );
    Ok(FitResult {
        b_hat: m.x,
        sse: m.value,
        n_bins_used: objective.len(),
        label: None,
        maturity_years: None,
        warning: None,
    })
}
