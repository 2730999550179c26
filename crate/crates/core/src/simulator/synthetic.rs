//! Synthetic default-and-recovery datasets with known ground truth.
//!
//! Each start date gets a fresh population of `issuers_per_rating` issuers
//! per rating. An issuer is rated at its start date and carries a `WR`
//! (withdrawn rating) snapshot one month later, so it belongs to exactly one
//! cohort of the monthly grid. One standard normal market shock per start
//! date drives all of that date's defaults; withdrawals are drawn
//! independently. A withdrawn issuer's default, if any, is never observed,
//! which is the censoring the withdrawal-adjusted default rate undoes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::cohort::{
    write_events, write_issuers, write_ratings, Issuer, IssuerEvent, Rating, RatingSnapshot,
    Seniority,
};
use crate::exec::{map_indexed, Execution};
use crate::model::{compound_b, ModelParams};
use crate::numerics::{norm_cdf_inv, substream, SeedSpec};

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("target PD {target} for rating {rating} is unreachable")]
    UnreachablePd { rating: Rating, target: f64 },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

/// A rating bucket and its unconditional default probability over the
/// horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingTarget {
    pub rating: Rating,
    pub target_pd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDatasetConfig {
    pub mu: f64,
    pub sigma: f64,
    pub c: f64,
    pub maturity_years: u32,
    pub v0: f64,
    pub ratings: Vec<RatingTarget>,
    /// Withdrawal probability per horizon.
    pub withdrawal_prob: f64,
    pub issuers_per_rating: usize,
    pub start_dates: Vec<NaiveDate>,
    pub seniority: Seniority,
    pub seed: u64,
}

impl SyntheticDatasetConfig {
    /// Picks `σ` so that `√((1-c)σ²T)` equals `b`.
    pub fn sigma_for_b(b: f64, c: f64, maturity_years: u32) -> f64 {
        b / ((1.0 - c) * maturity_years as f64).sqrt()
    }

    /// Face value giving `rating_target.target_pd` as unconditional PD.
    fn rating_params(&self, target: &RatingTarget) -> Result<ModelParams, GeneratorError> {
        let t = self.maturity_years as f64;
        let z = norm_cdf_inv(target.target_pd).map_err(|_| GeneratorError::UnreachablePd {
            rating: target.rating,
            target: target.target_pd,
        })?;
        let log_drift = (self.mu - 0.5 * self.sigma * self.sigma) * t;
        let face_value = self.v0 * (log_drift + self.sigma * t.sqrt() * z).exp();
        if !(face_value > 0.0 && face_value.is_finite()) {
            return Err(GeneratorError::UnreachablePd {
                rating: target.rating,
                target: target.target_pd,
            });
        }
        let params = ModelParams {
            mu: self.mu,
            sigma: self.sigma,
            c: self.c,
            maturity: t,
            v0: self.v0,
            face_value,
        };
        params
            .validate()
            .map_err(|e| GeneratorError::InvalidConfig(e.to_string()))?;
        Ok(params)
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: &str| Err(GeneratorError::InvalidConfig(m.to_string()));
        if self.maturity_years == 0 {
            return bad("maturity_years must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.withdrawal_prob) {
            return bad("withdrawal_prob must lie in [0, 1]");
        }
        if self.issuers_per_rating == 0 {
            return bad("issuers_per_rating must be at least 1");
        }
        if self.ratings.is_empty() {
            return bad("no ratings configured");
        }
        if self.ratings.iter().any(|r| r.rating == Rating::Wr) {
            return bad("WR is reserved for withdrawn ratings");
        }
        let mut seen = std::collections::BTreeSet::new();
        if !self.ratings.iter().all(|r| seen.insert(r.rating)) {
            return bad("duplicate rating");
        }
        if self.start_dates.is_empty() {
            return bad("no start dates");
        }
        if !self.start_dates.windows(2).all(|w| w[0] < w[1]) {
            return bad("start dates must be strictly increasing");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTruth {
    pub target_pd: f64,
    pub params: ModelParams,
}

/// Ground truth of one `(start date, rating)` population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortTruth {
    pub start: NaiveDate,
    pub rating: Rating,
    pub market_shock: f64,
    pub conditional_pd: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCounts {
    pub issuers: usize,
    pub ratings: usize,
    pub events: usize,
}

/// Sidecar describing how a dataset was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Compound parameter keyed by model-maturity in years.
    pub b_by_maturity: BTreeMap<String, f64>,
    pub maturity_years: u32,
    pub withdrawal_prob: f64,
    pub mu: f64,
    pub sigma: f64,
    pub c: f64,
    pub v0: f64,
    pub seniority: Seniority,
    pub issuers_per_rating: usize,
    pub seed: u64,
    pub start_dates: Vec<NaiveDate>,
    pub ratings: BTreeMap<Rating, RatingTruth>,
    pub cohorts: Vec<CohortTruth>,
    pub row_counts: RowCounts,
}

impl Manifest {
    pub fn b(&self) -> f64 {
        self.b_by_maturity[&self.maturity_years.to_string()]
    }
}

/// Latent draws of one issuer, before withdrawal censoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatentOutcome {
    pub defaulted: bool,
    pub withdrawn: bool,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub issuers: Vec<Issuer>,
    pub ratings: Vec<RatingSnapshot>,
    pub events: Vec<IssuerEvent>,
    pub manifest: Manifest,
    /// Parallel to `issuers`.
    pub latent: Vec<LatentOutcome>,
}

impl Dataset {
    /// Writes `issuers.csv`, `ratings.csv`, `events.csv` and `manifest.json`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), GeneratorError> {
        std::fs::create_dir_all(dir).map_err(|source| GeneratorError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let create = |name: &str| {
            let path = dir.join(name);
            File::create(&path)
                .map(BufWriter::new)
                .map_err(|source| GeneratorError::Io {
                    path: path.display().to_string(),
                    source,
                })
        };
        let csv_err = |name: &str| {
            let path = dir.join(name).display().to_string();
            move |source| GeneratorError::Csv { path, source }
        };
        write_issuers(create("issuers.csv")?, &self.issuers).map_err(csv_err("issuers.csv"))?;
        write_ratings(create("ratings.csv")?, &self.ratings).map_err(csv_err("ratings.csv"))?;
        write_events(create("events.csv")?, &self.events).map_err(csv_err("events.csv"))?;
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), json + "\n").map_err(|source| {
            GeneratorError::Io {
                path: dir.join("manifest.json").display().to_string(),
                source,
            }
        })
    }
}

struct Population {
    issuers: Vec<Issuer>,
    ratings: Vec<RatingSnapshot>,
    events: Vec<IssuerEvent>,
    latent: Vec<LatentOutcome>,
    truth: Vec<CohortTruth>,
}

// Stream layout: start index in the high bits, rating slot (0 = market) low.
const RATING_SLOT_BITS: u32 = 16;

fn generate_population(
    cfg: &SyntheticDatasetConfig,
    params: &[ModelParams],
    start_idx: usize,
) -> Result<Population, GeneratorError> {
    let start = cfg.start_dates[start_idx];
    let out_of_range = || GeneratorError::InvalidConfig(format!("start date {start} out of range"));
    let end = start
        .checked_add_months(Months::new(12 * cfg.maturity_years))
        .ok_or_else(out_of_range)?;
    let unrated = start
        .checked_add_months(Months::new(1))
        .ok_or_else(out_of_range)?;
    let window_days = (end - start).num_days() as u64;
    let stream_base = (start_idx as u64) << RATING_SLOT_BITS;

    let market_shock = substream(SeedSpec::new(cfg.seed, stream_base)).normal();

    let n = cfg.issuers_per_rating * cfg.ratings.len();
    let mut pop = Population {
        issuers: Vec::with_capacity(n),
        ratings: Vec::with_capacity(2 * n),
        events: Vec::new(),
        latent: Vec::with_capacity(n),
        truth: Vec::with_capacity(cfg.ratings.len()),
    };
    let stamp = start.format("%Y%m%d").to_string();
    for (slot, (target, p)) in cfg.ratings.iter().zip(params).enumerate() {
        let log_face = (p.face_value / p.v0).ln();
        let common = p.log_drift() + p.market_scale() * market_shock;
        let idio = p.idiosyncratic_scale();
        pop.truth.push(CohortTruth {
            start,
            rating: target.rating,
            market_shock,
            conditional_pd: p.conditional_pd(market_shock),
        });

        let mut stream = substream(SeedSpec::new(cfg.seed, stream_base | (slot as u64 + 1)));
        for k in 0..cfg.issuers_per_rating {
            // Fixed draw order per issuer keeps streams aligned whatever the outcome.
            let z = stream.normal();
            let u_withdraw = stream.uniform();
            let event_day = stream.below(window_days);

            let id = format!("{stamp}-{}-{k:05}", target.rating);
            pop.issuers.push(Issuer {
                issuer_id: id.clone(),
                name: format!("Synthetic {} {stamp} #{k}", target.rating),
            });
            pop.ratings.push(RatingSnapshot {
                issuer_id: id.clone(),
                date: start,
                rating: target.rating,
                seniority: cfg.seniority,
            });
            pop.ratings.push(RatingSnapshot {
                issuer_id: id.clone(),
                date: unrated,
                rating: Rating::Wr,
                seniority: cfg.seniority,
            });

            let log_value = common + idio * z;
            let defaulted = log_value < log_face;
            let withdrawn = u_withdraw < cfg.withdrawal_prob;
            let date = start + chrono::Days::new(event_day);
            if withdrawn {
                pop.events.push(IssuerEvent::withdrawal(id, date));
            } else if defaulted {
                let rr = (log_value - log_face).exp().clamp(0.0, 1.0);
                pop.events.push(IssuerEvent::default_with_recovery(id, date, rr));
            }
            pop.latent.push(LatentOutcome {
                defaulted,
                withdrawn,
            });
        }
    }
    Ok(pop)
}

/// Generates a dataset using the default execution mode.
pub fn generate_dataset(cfg: &SyntheticDatasetConfig) -> Result<Dataset, GeneratorError> {
    generate_dataset_with(cfg, Execution::default())
}

/// Generates a dataset; output is identical for every execution mode.
pub fn generate_dataset_with(
    cfg: &SyntheticDatasetConfig,
    execution: Execution,
) -> Result<Dataset, GeneratorError> {
    cfg.validate()?;
    let params = cfg
        .ratings
        .iter()
        .map(|t| cfg.rating_params(t))
        .collect::<Result<Vec<_>, _>>()?;

    let populations = map_indexed(cfg.start_dates.len() as u64, execution, |i| {
        generate_population(cfg, &params, i as usize)
    });

    let mut issuers = Vec::new();
    let mut ratings = Vec::new();
    let mut events = Vec::new();
    let mut latent = Vec::new();
    let mut cohorts = Vec::new();
    for pop in populations {
        let pop = pop?;
        issuers.extend(pop.issuers);
        ratings.extend(pop.ratings);
        events.extend(pop.events);
        latent.extend(pop.latent);
        cohorts.extend(pop.truth);
    }

    let b = compound_b(&params[0]).value();
    let manifest = Manifest {
        b_by_maturity: BTreeMap::from([(cfg.maturity_years.to_string(), b)]),
        maturity_years: cfg.maturity_years,
        withdrawal_prob: cfg.withdrawal_prob,
        mu: cfg.mu,
        sigma: cfg.sigma,
        c: cfg.c,
        v0: cfg.v0,
        seniority: cfg.seniority,
        issuers_per_rating: cfg.issuers_per_rating,
        seed: cfg.seed,
        start_dates: cfg.start_dates.clone(),
        ratings: cfg
            .ratings
            .iter()
            .zip(&params)
            .map(|(t, p)| {
                (
                    t.rating,
                    RatingTruth {
                        target_pd: t.target_pd,
                        params: *p,
                    },
                )
            })
            .collect(),
        cohorts,
        row_counts: RowCounts {
            issuers: issuers.len(),
            ratings: ratings.len(),
            events: events.len(),
        },
    };
    Ok(Dataset {
        issuers,
        ratings,
        events,
        manifest,
        latent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::EventType;

    fn d(y: i32, m: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, 1).unwrap()
    }

    fn config(p_w: f64) -> SyntheticDatasetConfig {
        SyntheticDatasetConfig {
            mu: 0.0,
            sigma: 0.5,
            c: 0.4,
            maturity_years: 1,
            v0: 100.0,
            ratings: vec![RatingTarget {
                rating: Rating::Caa1,
                target_pd: 0.2,
            }],
            withdrawal_prob: p_w,
            issuers_per_rating: 5000,
            start_dates: vec![d(2000, 1)],
            seniority: Seniority::SeniorSecured,
            seed: 5,
        }
    }

    #[test]
    fn default_count_matches_conditional_pd() {
        let data = generate_dataset(&config(0.0)).unwrap();
        assert!(data.events.iter().all(|e| e.event_type == EventType::Default));
        let p = data.manifest.cohorts[0].conditional_pd;
        let n = 5000.0;
        let rate = data.events.len() as f64 / n;
        let three_sigma = 3.0 * (p * (1.0 - p) / n).sqrt();
        assert!((rate - p).abs() <= three_sigma, "{rate} vs {p}");
    }

    #[test]
    fn full_withdrawal() {
        let data = generate_dataset(&config(1.0)).unwrap();
        assert_eq!(data.events.len(), 5000);
        assert!(data.events.iter().all(|e| e.event_type == EventType::Withdrawal));
    }

    #[test]
    fn recoveries_in_unit_interval_and_dates_in_window() {
        let data = generate_dataset(&config(0.1)).unwrap();
        let end = d(2001, 1);
        for e in &data.events {
            assert!(e.date >= d(2000, 1) && e.date < end);
            if let Some(rr) = e.recovery_rate {
                assert!((0.0..=1.0).contains(&rr));
            }
        }
    }

    #[test]
    fn face_value_calibration_hits_target() {
        let data = generate_dataset(&config(0.0)).unwrap();
        let truth = &data.manifest.ratings[&Rating::Caa1];
        assert!((truth.params.unconditional_pd() - 0.2).abs() < 1e-12);
        let b = data.manifest.b();
        assert!((b - (0.6f64 * 0.25).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unreachable_target_is_an_error() {
        let mut cfg = config(0.0);
        cfg.ratings[0].target_pd = 1.0;
        assert!(matches!(
            generate_dataset(&cfg),
            Err(GeneratorError::UnreachablePd { .. })
        ));
    }

    #[test]
    fn execution_modes_agree() {
        let mut cfg = config(0.1);
        cfg.issuers_per_rating = 50;
        cfg.start_dates = (1..=6).map(|m| d(2000, m)).collect();
        let a = generate_dataset_with(&cfg, Execution::Sequential).unwrap();
        let b = generate_dataset_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.ratings, b.ratings);
        assert_eq!(a.manifest, b.manifest);
    }
}
