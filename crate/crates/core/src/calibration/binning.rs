use serde::{Deserialize, Serialize};

use super::CalibrationError;

/// Range covered by the PD bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinDomain {
    /// `[0, max observed PD]`.
    #[default]
    Observed,
    /// `[0, 1]`.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinOptions {
    pub n_bins: usize,
    /// Bins with fewer points carry no means.
    pub min_count: usize,
    pub domain: BinDomain,
}

impl Default for BinOptions {
    fn default() -> Self {
        Self {
            n_bins: 30,
            min_count: 5,
            domain: BinDomain::Observed,
        }
    }
}

/// One observed `(PD, RR)` pair, e.g. a cohort or a Monte Carlo realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdPoint {
    pub pd: f64,
    pub rr: Option<f64>,
    pub loss: f64,
}

impl PdPoint {
    /// A point with recovery; its loss is `pd·(1 - rr)`.
    pub fn with_recovery(pd: f64, rr: f64) -> Self {
        Self {
            pd,
            rr: Some(rr),
            loss: pd * (1.0 - rr),
        }
    }

    /// A point that only reports a loss rate.
    pub fn with_loss(pd: f64, loss: f64) -> Self {
        Self { pd, rr: None, loss }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Mean PD of the members; the geometric centre for an empty bin.
    pub pd_mid: f64,
    pub mean_rr: Option<f64>,
    pub mean_loss: Option<f64>,
}

impl Bin {
    pub fn is_used(&self) -> bool {
        self.mean_loss.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    /// `n_bins + 1` edges.
    pub edges: Vec<f64>,
    pub bins: Vec<Bin>,
    pub options: BinOptions,
}

impl BinnedSeries {
    pub fn used_bins(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(|b| b.is_used())
    }

    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Bins `(PD, RR)` pairs into 30 equal-width PD bins with default options.
pub fn bin_series(points: &[(f64, f64)]) -> Result<BinnedSeries, CalibrationError> {
    let pts: Vec<PdPoint> = points
        .iter()
        .map(|&(pd, rr)| PdPoint::with_recovery(pd, rr))
        .collect();
    bin_points(&pts, &BinOptions::default())
}

/// Bins points into equal-width PD bins.
///
/// Each point falls in exactly one bin; only the last bin includes its right
/// edge. Per bin, `pd_mid`, `mean_rr` and `mean_loss` are plain means over
/// the members (`mean_rr` over members that carry a recovery).
pub fn bin_points(points: &[PdPoint], options: &BinOptions) -> Result<BinnedSeries, CalibrationError> {
    if points.is_empty() {
        return Err(CalibrationError::EmptyInput);
    }
    if options.n_bins == 0 {
        return Err(CalibrationError::InvalidOption("n_bins must be positive".into()));
    }
    for p in points {
        let rr_ok = p.rr.is_none_or(|rr| rr.is_finite());
        if !(p.pd > 0.0 && p.pd <= 1.0) || !p.loss.is_finite() || !rr_ok {
            return Err(CalibrationError::InvalidPoint {
                pd: p.pd,
                rr: p.rr,
            });
        }
    }
    let upper = match options.domain {
        BinDomain::Unit => 1.0,
        BinDomain::Observed => points.iter().map(|p| p.pd).fold(0.0, f64::max),
    };
    let n = options.n_bins;
    let width = upper / n as f64;
    let edges: Vec<f64> = (0..=n).map(|i| i as f64 * width).collect();

    #[derive(Default, Clone)]
    struct Acc {
        count: usize,
        pd: f64,
        loss: f64,
        rr: f64,
        rr_count: usize,
    }
    let mut acc = vec![Acc::default(); n];
    for p in points {
        let idx = ((p.pd / width) as usize).min(n - 1);
        let a = &mut acc[idx];
        a.count += 1;
        a.pd += p.pd;
        a.loss += p.loss;
        if let Some(rr) = p.rr {
            a.rr += rr;
            a.rr_count += 1;
        }
    }

    let bins = acc
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let used = a.count >= options.min_count && a.count > 0;
            Bin {
                lower: edges[i],
                upper: edges[i + 1],
                count: a.count,
                pd_mid: if a.count > 0 {
                    a.pd / a.count as f64
                } else {
                    0.5 * (edges[i] + edges[i + 1])
                },
                mean_rr: (used && a.rr_count > 0).then(|| a.rr / a.rr_count as f64),
                mean_loss: used.then(|| a.loss / a.count as f64),
            }
        })
        .collect();
    Ok(BinnedSeries {
        edges,
        bins,
        options: *options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(bin_series(&[]), Err(CalibrationError::EmptyInput));
    }

    #[test]
    fn identical_points_share_one_bin() {
        let pts = vec![(0.3, 0.6); 7];
        let s = bin_series(&pts).unwrap();
        let used: Vec<_> = s.used_bins().collect();
        assert_eq!(used.len(), 1);
        assert_eq!(used[0].count, 7);
        assert!((used[0].mean_rr.unwrap() - 0.6).abs() < 1e-15);
        assert!((used[0].mean_loss.unwrap() - 0.12).abs() < 1e-15);
        assert_eq!(s.bins[29].count, 7);
    }

    #[test]
    fn sparse_bins_carry_no_means() {
        let mut pts = vec![(0.9, 0.2); 5];
        pts.extend(vec![(0.1, 0.5); 4]);
        let s = bin_series(&pts).unwrap();
        let low = s.bins.iter().find(|b| b.count == 4).unwrap();
        assert!(low.mean_rr.is_none() && low.mean_loss.is_none());
        assert_eq!(s.used_bins().count(), 1);
    }

    #[test]
    fn uniform_grid_fills_every_bin() {
        // 149 cell centres of width 0.002 plus the right edge 0.3: 5 per bin.
        let mut pts: Vec<_> = (0..149).map(|i| ((i as f64 + 0.5) * 0.002, 0.5)).collect();
        pts.push((0.3, 0.5));
        let s = bin_points(
            &pts.iter().map(|&(p, r)| PdPoint::with_recovery(p, r)).collect::<Vec<_>>(),
            &BinOptions::default(),
        )
        .unwrap();
        assert!(s.bins.iter().all(|b| b.count == 5), "{:?}", s.bins.iter().map(|b| b.count).collect::<Vec<_>>());
    }

    #[test]
    fn unit_domain_spans_zero_to_one() {
        let opts = BinOptions {
            domain: BinDomain::Unit,
            ..BinOptions::default()
        };
        let s = bin_points(&[PdPoint::with_recovery(0.21, 0.5)], &opts).unwrap();
        assert_eq!(*s.edges.last().unwrap(), 1.0);
        assert_eq!(s.bins[6].count, 1);
    }

    #[test]
    fn rejects_out_of_range_pd() {
        assert!(bin_series(&[(0.0, 0.5)]).is_err());
        assert!(bin_series(&[(1.1, 0.5)]).is_err());
        assert!(bin_series(&[(f64::NAN, 0.5)]).is_err());
    }

    proptest! {
        #[test]
        fn bins_partition_the_points(
            pts in prop::collection::vec((1e-6f64..=1.0, 0.0f64..=1.0), 1..300)
        ) {
            let s = bin_series(&pts).unwrap();
            prop_assert_eq!(s.total_count(), pts.len());
            prop_assert_eq!(s.edges.len(), 31);
            let w0 = s.edges[1] - s.edges[0];
            for w in s.edges.windows(2) {
                prop_assert!(((w[1] - w[0]) - w0).abs() <= 1e-12);
            }
            for b in &s.bins {
                if b.count > 0 {
                    prop_assert!(b.pd_mid >= b.lower - 1e-15 && b.pd_mid <= b.upper + 1e-15);
                }
            }
        }
    }
}
