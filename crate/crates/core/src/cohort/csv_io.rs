//! CSV readers and writers for the issuer, rating and event tables.
//!
//! Readers never stop at the first bad row: every problem is reported as a
//! [`Diagnostic`] carrying file and line.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::records::{Issuer, IssuerEvent, RatingSnapshot};
use crate::format_float;

pub const ISSUERS_HEADER: [&str; 2] = ["issuer_id", "name"];
pub const RATINGS_HEADER: [&str; 4] = ["issuer_id", "date", "rating", "seniority"];
pub const EVENTS_HEADER: [&str; 4] = ["issuer_id", "event_type", "date", "recovery_rate"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Parse,
    Invariant,
    DuplicateKey,
    UnknownIssuer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub file: String,
    /// 1-based line in the source file, when the record came from one.
    pub line: Option<u64>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.file, line, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: expected header {expected:?}, found {found:?}")]
    Header {
        path: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("{} invalid row(s); first: {}", .0.len(), .0[0])]
    Rejected(Vec<Diagnostic>),
}

impl IngestError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            IngestError::Rejected(d) => d,
            _ => &[],
        }
    }

    pub fn has_kind(&self, kind: DiagnosticKind) -> bool {
        self.diagnostics().iter().any(|d| d.kind == kind)
    }
}

/// A record together with the line it was read from.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub line: Option<u64>,
    pub value: T,
}

impl<T> Located<T> {
    pub fn detached(value: T) -> Self {
        Self { line: None, value }
    }
}

pub(crate) fn parse_date(text: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
        .map_err(|e| format!("bad date '{text}': {e}"))
}

fn read_table<R, T>(
    reader: R,
    name: &str,
    header: &[&str],
    mut parse: impl FnMut(&csv::StringRecord) -> Result<T, String>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Located<T>>, IngestError>
where
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|source| IngestError::Csv {
            path: name.to_string(),
            source,
        })?
        .clone();
    if found.is_empty() {
        return Ok(Vec::new());
    }
    if found.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(IngestError::Header {
            path: name.to_string(),
            expected: header.iter().map(|s| s.to_string()).collect(),
            found: found.iter().map(str::to_string).collect(),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|source| IngestError::Csv {
            path: name.to_string(),
            source,
        })?;
        let line = record.position().map(|p| p.line());
        if record.len() != header.len() {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::Parse,
                file: name.to_string(),
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
            continue;
        }
        match parse(&record) {
            Ok(value) => rows.push(Located { line, value }),
            Err(message) => diagnostics.push(Diagnostic {
                kind: DiagnosticKind::Parse,
                file: name.to_string(),
                line,
                message,
            }),
        }
    }
    Ok(rows)
}

pub(crate) fn read_issuers<R: Read>(
    reader: R,
    name: &str,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Located<Issuer>>, IngestError> {
    read_table(
        reader,
        name,
        &ISSUERS_HEADER,
        |r| {
            let issuer_id = r[0].trim();
            if issuer_id.is_empty() {
                return Err("empty issuer_id".into());
            }
            Ok(Issuer {
                issuer_id: issuer_id.to_string(),
                name: r[1].to_string(),
            })
        },
        diagnostics,
    )
}

pub(crate) fn read_ratings<R: Read>(
    reader: R,
    name: &str,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Located<RatingSnapshot>>, IngestError> {
    read_table(
        reader,
        name,
        &RATINGS_HEADER,
        |r| {
            Ok(RatingSnapshot {
                issuer_id: r[0].trim().to_string(),
                date: parse_date(&r[1])?,
                rating: r[2].parse().map_err(|e| format!("{e}"))?,
                seniority: r[3].parse().map_err(|e| format!("{e}"))?,
            })
        },
        diagnostics,
    )
}

pub(crate) fn read_events<R: Read>(
    reader: R,
    name: &str,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Located<IssuerEvent>>, IngestError> {
    read_table(
        reader,
        name,
        &EVENTS_HEADER,
        |r| {
            let rr_text = r[3].trim();
            let recovery_rate = if rr_text.is_empty() {
                None
            } else {
                let v: f64 = rr_text
                    .parse()
                    .map_err(|_| format!("bad recovery_rate '{rr_text}'"))?;
                Some(v)
            };
            let event = IssuerEvent {
                issuer_id: r[0].trim().to_string(),
                event_type: r[1].parse().map_err(|e| format!("{e}"))?,
                date: parse_date(&r[2])?,
                recovery_rate,
            };
            event.check()?;
            Ok(event)
        },
        diagnostics,
    )
}

pub(crate) fn open(path: &Path) -> Result<std::fs::File, IngestError> {
    std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

pub fn write_issuers<W: Write>(w: W, issuers: &[Issuer]) -> csv::Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(ISSUERS_HEADER)?;
    for i in issuers {
        wtr.write_record([i.issuer_id.as_str(), i.name.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_ratings<W: Write>(w: W, ratings: &[RatingSnapshot]) -> csv::Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(RATINGS_HEADER)?;
    for r in ratings {
        wtr.write_record([
            r.issuer_id.as_str(),
            &r.date.format("%Y-%m-%d").to_string(),
            r.rating.as_str(),
            r.seniority.as_str(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_events<W: Write>(w: W, events: &[IssuerEvent]) -> csv::Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(EVENTS_HEADER)?;
    for e in events {
        let rr = e.recovery_rate.map(format_float).unwrap_or_default();
        wtr.write_record([
            e.issuer_id.as_str(),
            e.event_type.as_str(),
            &e.date.format("%Y-%m-%d").to_string(),
            &rr,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
