use std::io::Write;

use serde::{Deserialize, Serialize};

use super::binning::BinnedSeries;
use super::fit::FitResult;
use crate::format_float;
use crate::model::{expected_loss, structural_rr, CompoundB};

/// Observed bin means next to the fitted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub pd_mid: f64,
    pub count: usize,
    pub mean_loss: f64,
    pub model_loss: f64,
    pub mean_rr: Option<f64>,
    pub model_rr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fit: FitResult,
    pub rows: Vec<FitRow>,
}

impl FitReport {
    pub fn new(binned: &BinnedSeries, fit: FitResult) -> Self {
        let b = CompoundB::new(fit.b_hat).expect("fitted B is non-negative");
        let rows = binned
            .used_bins()
            .filter(|bin| bin.pd_mid > 0.0 && bin.pd_mid < 1.0)
            .map(|bin| FitRow {
                pd_mid: bin.pd_mid,
                count: bin.count,
                mean_loss: bin.mean_loss.unwrap_or_default(),
                model_loss: expected_loss(bin.pd_mid, b).expect("pd inside (0, 1)"),
                mean_rr: bin.mean_rr,
                model_rr: structural_rr(bin.pd_mid, b).expect("pd inside (0, 1)"),
            })
            .collect();
        Self { fit, rows }
    }

    pub fn has_recovery(&self) -> bool {
        self.rows.iter().any(|r| r.mean_rr.is_some())
    }

    /// Writes one CSV row per used bin; recovery columns only when observed.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let with_rr = self.has_recovery();
        let mut header = vec!["pd_mid", "count", "mean_loss", "model_loss"];
        if with_rr {
            header.extend(["mean_rr", "model_rr"]);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                format_float(r.pd_mid),
                r.count.to_string(),
                format_float(r.mean_loss),
                format_float(r.model_loss),
            ];
            if with_rr {
                rec.push(r.mean_rr.map(format_float).unwrap_or_default());
                rec.push(format_float(r.model_rr));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fitted `B` at two maturities against the `√T` scaling of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaturityComparison {
    pub short_years: f64,
    pub long_years: f64,
    pub b_short: f64,
    pub b_long: f64,
    /// `b_long / b_short`.
    pub b_ratio: f64,
    /// `√(long / short)`.
    pub sqrt_t_ratio: f64,
}

impl MaturityComparison {
    pub fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        let ((short_years, b_short), (long_years, b_long)) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        Self {
            short_years,
            long_years,
            b_short,
            b_long,
            b_ratio: b_long / b_short,
            sqrt_t_ratio: (long_years / short_years).sqrt(),
        }
    }

    /// Whether the fitted `B` falls with maturity, against the `√T` growth the
    /// constant-parameter model implies.
    pub fn decreasing(&self) -> bool {
        self.b_long < self.b_short
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{bin_points, fit_b, BinOptions, PdPoint};

    #[test]
    fn report_matches_fit() {
        let b = CompoundB::new(0.7).unwrap();
        let pts: Vec<_> = (1..=300)
            .map(|i| {
                let pd = i as f64 / 310.0;
                PdPoint::with_recovery(pd, structural_rr(pd, b).unwrap())
            })
            .collect();
        let binned = bin_points(&pts, &BinOptions::default()).unwrap();
        let fit = fit_b(&binned).unwrap();
        let report = FitReport::new(&binned, fit);
        assert_eq!(report.rows.len(), 30);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("pd_mid,count,mean_loss,model_loss,mean_rr,model_rr\n"));
        assert_eq!(text.lines().count(), 31);
    }

    #[test]
    fn loss_only_report_omits_recovery() {
        let pts: Vec<_> = (1..=60).map(|i| PdPoint::with_loss(i as f64 / 61.0, 0.1 * i as f64 / 61.0)).collect();
        let binned = bin_points(&pts, &BinOptions { n_bins: 6, ..Default::default() }).unwrap();
        let report = FitReport::new(&binned, fit_b(&binned).unwrap());
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("pd_mid,count,mean_loss,model_loss\n"));
    }

    #[test]
    fn maturity_comparison_orders_inputs() {
        let m = MaturityComparison::new((4.0, 0.635), (2.0, 0.882));
        assert_eq!(m.short_years, 2.0);
        assert!(m.decreasing());
        assert!((m.sqrt_t_ratio - 2f64.sqrt()).abs() < 1e-15);
    }
}
