//! Binning of `(PD, RR)` observations and least-squares estimation of `B`.

mod binning;
mod fit;
mod report;
mod search;

pub use binning::{bin_points, bin_series, Bin, BinDomain, BinOptions, BinnedSeries, PdPoint};
pub use fit::{fit_b, fit_b_with, FitOptions, FitResult, LossObjective, Weighting};
pub use report::{FitReport, FitRow, MaturityComparison};
pub use search::{brent, minimize, Minimum};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibrationError {
    #[error("no points to bin")]
    EmptyInput,
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("invalid point pd={pd} rr={rr:?}")]
    InvalidPoint { pd: f64, rr: Option<f64> },
    #[error("need at least 2 populated bins, found {0}")]
    InsufficientBins(usize),
}
