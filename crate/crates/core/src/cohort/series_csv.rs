//! The cohort-series table written by the `cohort` command and read by
//! `correlate` and `fit`.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;

use super::csv_io::parse_date;
use super::outcome::{CohortError, CohortSpec, SeriesPoint};
use super::records::Seniority;
use crate::format_float;

pub const SERIES_HEADER: [&str; 12] = [
    "start_date",
    "end_date",
    "ratings",
    "seniority",
    "maturity_years",
    "n_c",
    "n_w",
    "n_d",
    "pd",
    "mean_rr",
    "rr_count",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohortStatus {
    Ok,
    NoRecovery,
    Empty,
    AllWithdrawn,
}

impl CohortStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CohortStatus::Ok => "ok",
            CohortStatus::NoRecovery => "no_recovery",
            CohortStatus::Empty => "empty",
            CohortStatus::AllWithdrawn => "all_withdrawn",
        }
    }
}

impl fmt::Display for CohortStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CohortStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ok" => Ok(CohortStatus::Ok),
            "no_recovery" => Ok(CohortStatus::NoRecovery),
            "empty" => Ok(CohortStatus::Empty),
            "all_withdrawn" => Ok(CohortStatus::AllWithdrawn),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

/// One row of the cohort-series table.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortRecord {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub ratings: String,
    pub seniority: Seniority,
    pub maturity_years: u32,
    pub n_c: u64,
    pub n_w: u64,
    pub n_d: u64,
    pub pd: Option<f64>,
    pub mean_rr: Option<f64>,
    pub rr_count: u64,
    pub status: CohortStatus,
}

impl CohortRecord {
    pub fn from_point(spec: &CohortSpec, point: &SeriesPoint) -> Self {
        let mut rec = CohortRecord {
            start: point.start,
            end: point.end,
            ratings: spec.ratings_label(),
            seniority: spec.seniority,
            maturity_years: spec.maturity_years,
            n_c: 0,
            n_w: 0,
            n_d: 0,
            pd: None,
            mean_rr: None,
            rr_count: 0,
            status: CohortStatus::Empty,
        };
        match &point.outcome {
            Ok(o) => {
                rec.n_c = o.n_c;
                rec.n_w = o.n_w;
                rec.n_d = o.n_d;
                rec.pd = Some(o.pd);
                rec.mean_rr = o.mean_rr;
                rec.rr_count = o.rr_count;
                rec.status = if o.mean_rr.is_some() {
                    CohortStatus::Ok
                } else {
                    CohortStatus::NoRecovery
                };
            }
            Err(CohortError::AllWithdrawn { n_c }) => {
                rec.n_c = *n_c;
                rec.n_w = *n_c;
                rec.status = CohortStatus::AllWithdrawn;
            }
            Err(_) => {}
        }
        rec
    }

    /// `(pd, mean_rr)` for cohorts usable in correlation and calibration.
    pub fn pd_rr(&self) -> Option<(f64, f64)> {
        match (self.status, self.pd, self.mean_rr) {
            (CohortStatus::Ok, Some(pd), Some(rr)) => Some((pd, rr)),
            _ => None,
        }
    }
}

pub fn write_series<W: Write>(w: W, records: &[CohortRecord]) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(SERIES_HEADER)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for r in records {
        wtr.write_record([
            r.start.format("%Y-%m-%d").to_string(),
            r.end.format("%Y-%m-%d").to_string(),
            r.ratings.clone(),
            r.seniority.to_string(),
            r.maturity_years.to_string(),
            r.n_c.to_string(),
            r.n_w.to_string(),
            r.n_d.to_string(),
            opt(r.pd),
            opt(r.mean_rr),
            r.rr_count.to_string(),
            r.status.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesReadError {
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header {expected:?}")]
    Header { expected: Vec<String> },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

pub fn read_series<R: Read>(r: R) -> Result<Vec<CohortRecord>, SeriesReadError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    if rdr.headers()?.iter().ne(SERIES_HEADER.iter().copied()) {
        return Err(SeriesReadError::Header {
            expected: SERIES_HEADER.iter().map(|s| s.to_string()).collect(),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let fail = |message: String| SeriesReadError::Row { line, message };
        let int = |i: usize| -> Result<u64, SeriesReadError> {
            row[i]
                .trim()
                .parse()
                .map_err(|_| fail(format!("bad {} '{}'", SERIES_HEADER[i], &row[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>, SeriesReadError> {
            let t = row[i].trim();
            if t.is_empty() {
                Ok(None)
            } else {
                t.parse()
                    .map(Some)
                    .map_err(|_| fail(format!("bad {} '{}'", SERIES_HEADER[i], t)))
            }
        };
        out.push(CohortRecord {
            start: parse_date(&row[0]).map_err(fail)?,
            end: parse_date(&row[1]).map_err(fail)?,
            ratings: row[2].to_string(),
            seniority: row[3].parse().map_err(|e| fail(format!("{e}")))?,
            maturity_years: int(4)? as u32,
            n_c: int(5)?,
            n_w: int(6)?,
            n_d: int(7)?,
            pd: opt(8)?,
            mean_rr: opt(9)?,
            rr_count: int(10)?,
            status: row[11].parse().map_err(fail)?,
        });
    }
    Ok(out)
}
