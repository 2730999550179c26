//! Readers for the tables `srm fit` accepts.
//!
//! | header                                   | source          |
//! |------------------------------------------|-----------------|
//! | cohort series (`start_date,…,status`)    | `srm cohort`    |
//! | `realization_index,pd_real,rr_real`      | `srm simulate`  |
//! | `pd,rr` or `pd,loss`                     | any             |

use std::fs::File;
use std::path::Path;

use structural_recovery::calibration::PdPoint;
use structural_recovery::cohort::{read_series, SERIES_HEADER};

use crate::error::{CliError, Result};

#[derive(Debug)]
pub struct FitInput {
    pub points: Vec<PdPoint>,
    /// Maturity shared by every row, when the table records it.
    pub maturity_years: Option<f64>,
    pub skipped: usize,
}

fn column(header: &csv::StringRecord, name: &str) -> Option<usize> {
    header.iter().position(|h| h.trim() == name)
}

fn parse_opt(text: &str, what: &str, line: u64) -> Result<Option<f64>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse()
        .map(Some)
        .map_err(|_| CliError::Data(format!("line {line}: bad {what} '{t}'")))
}

pub fn load(path: &Path) -> Result<FitInput> {
    let open = || File::open(path).map_err(|e| CliError::io(path, e));
    let mut rdr = csv::Reader::from_reader(open()?);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .clone();
    let ctx = |e: String| CliError::Data(format!("{}: {e}", path.display()));

    if header.iter().eq(SERIES_HEADER.iter().copied()) {
        let records = read_series(open()?).map_err(|e| ctx(e.to_string()))?;
        let points: Vec<_> = records
            .iter()
            .filter_map(|r| r.pd_rr())
            .map(|(pd, rr)| PdPoint::with_recovery(pd, rr))
            .collect();
        let maturities: std::collections::BTreeSet<u32> =
            records.iter().map(|r| r.maturity_years).collect();
        return Ok(FitInput {
            skipped: records.len() - points.len(),
            points,
            maturity_years: (maturities.len() == 1)
                .then(|| *maturities.iter().next().unwrap() as f64),
        });
    }

    let (pd_col, value_col, is_loss) = match (
        column(&header, "pd_real").or(column(&header, "pd")),
        column(&header, "rr_real").or(column(&header, "rr")),
        column(&header, "loss"),
    ) {
        (Some(p), Some(r), _) => (p, r, false),
        (Some(p), None, Some(l)) => (p, l, true),
        _ => {
            return Err(ctx(format!(
                "unrecognized header {:?}; expected a cohort series, simulate output, or pd,rr / pd,loss columns",
                header.iter().collect::<Vec<_>>()
            )))
        }
    };
    let mut points = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row.map_err(|e| ctx(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        let pd = parse_opt(field(pd_col), "pd", line).map_err(|e| ctx(e.to_string()))?;
        let value = parse_opt(field(value_col), "value", line).map_err(|e| ctx(e.to_string()))?;
        match (pd, value) {
            (Some(pd), Some(v)) if pd > 0.0 => points.push(if is_loss {
                PdPoint::with_loss(pd, v)
            } else {
                PdPoint::with_recovery(pd, v)
            }),
            _ => skipped += 1,
        }
    }
    Ok(FitInput {
        points,
        maturity_years: None,
        skipped,
    })
}
