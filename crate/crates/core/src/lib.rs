//! Structural (Merton-type) model of the default/recovery link.
//!
//! The recovery rate of a homogeneous portfolio as a function of its
//! realized default rate is
//!
//! ```text
//! RR(PD) = exp(-B·Φ⁻¹(PD) + B²/2) · Φ(Φ⁻¹(PD) - B) / PD,   B = √((1-c)σ²T)
//! ```
//!
//! Modules:
//! - [`numerics`]: normal CDF/quantile, seeded random streams.
//! - [`model`]: closed-form recovery and loss curves.
//! - [`simulator`]: Monte Carlo oracle and synthetic rating datasets.
//! - [`cohort`]: CSV ingestion and withdrawal-adjusted cohort statistics.
//! - [`calibration`]: PD binning and least-squares fit of `B`.

pub mod calibration;
pub mod cohort;
pub mod exec;
pub mod model;
pub mod numerics;
pub mod simulator;

/// Round-trip float formatting (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
