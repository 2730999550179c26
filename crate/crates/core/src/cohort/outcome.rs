use std::collections::BTreeSet;

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use super::records::{EventType, Rating, Seniority};
use super::store::RecordStore;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohortError {
    #[error("cohort has no members")]
    Empty,
    #[error("all {n_c} cohort members were withdrawn; default rate undefined")]
    AllWithdrawn { n_c: u64 },
    #[error("invalid cohort spec: {0}")]
    InvalidSpec(String),
}

/// Selection rule for a cohort built at `start` (t = 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub start: NaiveDate,
    /// Model-maturity `T` in years.
    pub maturity_years: u32,
    pub ratings: BTreeSet<Rating>,
    pub seniority: Seniority,
}

impl CohortSpec {
    pub fn new(
        start: NaiveDate,
        maturity_years: u32,
        ratings: impl IntoIterator<Item = Rating>,
        seniority: Seniority,
    ) -> Self {
        Self {
            start,
            maturity_years,
            ratings: ratings.into_iter().collect(),
            seniority,
        }
    }

    /// Exclusive end of the observation window, `start + 12·T` months.
    pub fn window_end(&self) -> Result<NaiveDate, CohortError> {
        if self.maturity_years == 0 {
            return Err(CohortError::InvalidSpec("maturity must be at least one year".into()));
        }
        if self.ratings.is_empty() {
            return Err(CohortError::InvalidSpec("no ratings selected".into()));
        }
        self.start
            .checked_add_months(Months::new(12 * self.maturity_years))
            .ok_or_else(|| CohortError::InvalidSpec("window end out of calendar range".into()))
    }

    pub fn with_start(&self, start: NaiveDate) -> Self {
        Self {
            start,
            ..self.clone()
        }
    }

    /// Ratings joined by `|`, e.g. `Caa1|Caa2|Caa3`.
    pub fn ratings_label(&self) -> String {
        self.ratings
            .iter()
            .map(|r| r.as_str())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Counts and rates of one cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortOutcome {
    pub n_c: u64,
    pub n_w: u64,
    pub n_d: u64,
    /// Withdrawal-adjusted default rate `n_d / (n_c - n_w)`.
    pub pd: f64,
    pub mean_rr: Option<f64>,
    pub rr_count: u64,
}

impl CohortOutcome {
    pub fn survivors(&self) -> u64 {
        self.n_c - self.n_w - self.n_d
    }

    /// Numerator and denominator of the default rate.
    pub fn pd_fraction(&self) -> (u64, u64) {
        (self.n_d, self.n_c - self.n_w)
    }
}

#[derive(Default)]
struct Tally {
    n_c: u64,
    n_w: u64,
    n_d: u64,
    rr_sum: f64,
    rr_count: u64,
}

impl Tally {
    fn add_member(&mut self, store: &RecordStore, issuer: usize, start: NaiveDate, end: NaiveDate) {
        self.n_c += 1;
        match store.first_event(issuer, start, end) {
            Some(e) if e.event_type == EventType::Withdrawal => self.n_w += 1,
            Some(e) => {
                self.n_d += 1;
                if let Some(rr) = e.recovery_rate {
                    self.rr_sum += rr;
                    self.rr_count += 1;
                }
            }
            None => {}
        }
    }

    fn finish(self) -> Result<CohortOutcome, CohortError> {
        if self.n_c == 0 {
            return Err(CohortError::Empty);
        }
        let observed = self.n_c - self.n_w;
        if observed == 0 {
            return Err(CohortError::AllWithdrawn { n_c: self.n_c });
        }
        Ok(CohortOutcome {
            n_c: self.n_c,
            n_w: self.n_w,
            n_d: self.n_d,
            pd: self.n_d as f64 / observed as f64,
            mean_rr: (self.rr_count > 0).then(|| self.rr_sum / self.rr_count as f64),
            rr_count: self.rr_count,
        })
    }
}

/// Builds one cohort.
///
/// Members are the `(issuer, seniority)` pairs whose latest rating on or
/// before `spec.start` is one of `spec.ratings`. The first event inside
/// `[start, start + T)` decides each member's outcome; a same-day default
/// outranks a withdrawal.
pub fn build_cohort(store: &RecordStore, spec: &CohortSpec) -> Result<CohortOutcome, CohortError> {
    let end = spec.window_end()?;
    let mut tally = Tally::default();
    for (key, &(issuer, seniority)) in store.keys().iter().enumerate() {
        if seniority != spec.seniority {
            continue;
        }
        match store.rating_as_of(key, spec.start) {
            Some(r) if spec.ratings.contains(&r) => tally.add_member(store, issuer, spec.start, end),
            _ => {}
        }
    }
    tally.finish()
}

/// One entry of a rolling cohort series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub outcome: Result<CohortOutcome, CohortError>,
}

impl SeriesPoint {
    /// `(pd, mean_rr)` when both are defined.
    pub fn pd_rr(&self) -> Option<(f64, f64)> {
        match &self.outcome {
            Ok(o) => o.mean_rr.map(|rr| (o.pd, rr)),
            Err(_) => None,
        }
    }
}

/// Monthly start dates from `first` to `last` inclusive.
pub fn monthly_starts(first: NaiveDate, last: NaiveDate) -> Vec<NaiveDate> {
    let mut starts = Vec::new();
    let mut i = 0;
    while let Some(d) = first.checked_add_months(Months::new(i)) {
        if d > last {
            break;
        }
        starts.push(d);
        i += 1;
    }
    starts
}

/// Builds one cohort per monthly start date in `[first, last]`.
///
/// Degenerate cohorts are kept in the series with their error so that
/// downstream statistics can skip them.
pub fn rolling_series(
    store: &RecordStore,
    base: &CohortSpec,
    first: NaiveDate,
    last: NaiveDate,
) -> Result<Vec<SeriesPoint>, CohortError> {
    if first > last {
        return Err(CohortError::InvalidSpec(format!(
            "first start {first} is after last start {last}"
        )));
    }
    base.window_end()?;

    // Sweep the rating timeline once, keeping the current member set.
    let keys = store.keys();
    let timeline = store.timeline();
    let mut cursor = 0;
    let mut members: BTreeSet<usize> = BTreeSet::new();
    let mut points = Vec::new();
    for start in monthly_starts(first, last) {
        while cursor < timeline.len() && timeline[cursor].0 <= start {
            let (_, key, rating) = timeline[cursor];
            if keys[key].1 == base.seniority {
                if base.ratings.contains(&rating) {
                    members.insert(key);
                } else {
                    members.remove(&key);
                }
            }
            cursor += 1;
        }
        let spec = base.with_start(start);
        let end = spec.window_end()?;
        let mut tally = Tally::default();
        for &key in &members {
            tally.add_member(store, keys[key].0, start, end);
        }
        points.push(SeriesPoint {
            start,
            end,
            outcome: tally.finish(),
        });
    }
    Ok(points)
}
