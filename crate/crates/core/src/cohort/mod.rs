//! Empirical cohort pipeline: record ingest, rolling cohorts with
//! withdrawal-adjusted default rates, recovery aggregation and PD/RR
//! correlation.

mod correlation;
mod csv_io;
mod outcome;
mod records;
mod series_csv;
mod store;

pub use correlation::{pearson, CorrelationError};
pub use csv_io::{
    write_events, write_issuers, write_ratings, Diagnostic, DiagnosticKind, IngestError,
    EVENTS_HEADER, ISSUERS_HEADER, RATINGS_HEADER,
};
pub use outcome::{
    build_cohort, monthly_starts, rolling_series, CohortError, CohortOutcome, CohortSpec,
    SeriesPoint,
};
pub use records::{
    EventType, Issuer, IssuerEvent, Rating, RatingSnapshot, Seniority, UnknownValue,
};
pub use series_csv::{
    read_series, write_series, CohortRecord, CohortStatus, SeriesReadError, SERIES_HEADER,
};
pub use store::RecordStore;

/// Convenience: `ingest` as a free function over the three table paths.
pub fn ingest(
    issuers: &std::path::Path,
    ratings: &std::path::Path,
    events: &std::path::Path,
) -> Result<RecordStore, IngestError> {
    RecordStore::ingest(issuers, ratings, events)
}
