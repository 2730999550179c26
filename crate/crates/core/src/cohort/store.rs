use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDate;

use super::csv_io::{
    open, read_events, read_issuers, read_ratings, Diagnostic, DiagnosticKind, IngestError,
    Located,
};
use super::records::{Issuer, IssuerEvent, Rating, RatingSnapshot, Seniority};

/// Validated, immutable record store indexed for cohort construction.
///
/// Membership is tracked per `(issuer, seniority)` pair ("key"); events are
/// tracked per issuer.
#[derive(Debug, Clone)]
pub struct RecordStore {
    issuers: Vec<Issuer>,
    issuer_index: HashMap<String, usize>,
    keys: Vec<(usize, Seniority)>,
    /// Per key, snapshots sorted by date.
    key_history: Vec<Vec<(NaiveDate, Rating)>>,
    /// All snapshots as `(date, key, rating)`, sorted by date then key.
    timeline: Vec<(NaiveDate, usize, Rating)>,
    /// Per issuer, events in precedence order.
    events: Vec<Vec<IssuerEvent>>,
    n_events: usize,
}

impl RecordStore {
    /// Reads and validates the three CSV tables.
    pub fn ingest(
        issuers_path: &Path,
        ratings_path: &Path,
        events_path: &Path,
    ) -> Result<Self, IngestError> {
        let mut diagnostics = Vec::new();
        let issuers = read_issuers(
            open(issuers_path)?,
            &issuers_path.display().to_string(),
            &mut diagnostics,
        )?;
        let ratings = read_ratings(
            open(ratings_path)?,
            &ratings_path.display().to_string(),
            &mut diagnostics,
        )?;
        let events = read_events(
            open(events_path)?,
            &events_path.display().to_string(),
            &mut diagnostics,
        )?;
        let names = [
            issuers_path.display().to_string(),
            ratings_path.display().to_string(),
            events_path.display().to_string(),
        ];
        Self::assemble(issuers, ratings, events, &names, diagnostics)
    }

    /// Builds a store from in-memory records, applying the same validation
    /// as [`RecordStore::ingest`].
    pub fn from_records(
        issuers: Vec<Issuer>,
        ratings: Vec<RatingSnapshot>,
        events: Vec<IssuerEvent>,
    ) -> Result<Self, IngestError> {
        let mut diagnostics = Vec::new();
        let events: Vec<_> = events
            .into_iter()
            .filter_map(|e| match e.check() {
                Ok(()) => Some(Located::detached(e)),
                Err(message) => {
                    diagnostics.push(Diagnostic {
                        kind: DiagnosticKind::Invariant,
                        file: "events".into(),
                        line: None,
                        message,
                    });
                    None
                }
            })
            .collect();
        Self::assemble(
            issuers.into_iter().map(Located::detached).collect(),
            ratings.into_iter().map(Located::detached).collect(),
            events,
            &["issuers".into(), "ratings".into(), "events".into()],
            diagnostics,
        )
    }

    fn assemble(
        issuers: Vec<Located<Issuer>>,
        ratings: Vec<Located<RatingSnapshot>>,
        events: Vec<Located<IssuerEvent>>,
        names: &[String; 3],
        mut diagnostics: Vec<Diagnostic>,
    ) -> Result<Self, IngestError> {
        let mut diag = |kind, file: &String, line, message| {
            diagnostics.push(Diagnostic {
                kind,
                file: file.clone(),
                line,
                message,
            })
        };

        let mut issuer_index = HashMap::with_capacity(issuers.len());
        let mut issuer_rows = Vec::with_capacity(issuers.len());
        for Located { line, value } in issuers {
            if issuer_index.contains_key(&value.issuer_id) {
                diag(
                    DiagnosticKind::DuplicateKey,
                    &names[0],
                    line,
                    format!("duplicate issuer_id '{}'", value.issuer_id),
                );
                continue;
            }
            issuer_index.insert(value.issuer_id.clone(), issuer_rows.len());
            issuer_rows.push(value);
        }

        let mut key_index: HashMap<(usize, Seniority), usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut key_history: Vec<Vec<(NaiveDate, Rating, Option<u64>)>> = Vec::new();
        for Located { line, value } in ratings {
            let Some(&issuer) = issuer_index.get(&value.issuer_id) else {
                diag(
                    DiagnosticKind::UnknownIssuer,
                    &names[1],
                    line,
                    format!("rating for unknown issuer '{}'", value.issuer_id),
                );
                continue;
            };
            let key = *key_index.entry((issuer, value.seniority)).or_insert_with(|| {
                keys.push((issuer, value.seniority));
                key_history.push(Vec::new());
                keys.len() - 1
            });
            key_history[key].push((value.date, value.rating, line));
        }
        // Keys are ordered by first appearance; re-order by (issuer, seniority)
        // so iteration order does not depend on row order.
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by_key(|&k| keys[k]);
        let keys: Vec<_> = order.iter().map(|&k| keys[k]).collect();
        let mut key_history: Vec<_> = order
            .iter()
            .map(|&k| std::mem::take(&mut key_history[k]))
            .collect();
        for (k, history) in key_history.iter_mut().enumerate() {
            history.sort_by_key(|&(date, _, line)| (date, line));
            for w in history.windows(2) {
                if w[0].0 == w[1].0 {
                    let (issuer, seniority) = keys[k];
                    diag(
                        DiagnosticKind::DuplicateKey,
                        &names[1],
                        w[1].2,
                        format!(
                            "duplicate rating snapshot for ({}, {}, {})",
                            issuer_rows[issuer].issuer_id, w[0].0, seniority
                        ),
                    );
                }
            }
        }

        let mut per_issuer: Vec<Vec<IssuerEvent>> = vec![Vec::new(); issuer_rows.len()];
        let mut n_events = 0;
        for Located { line, value } in events {
            match issuer_index.get(&value.issuer_id) {
                Some(&i) => {
                    per_issuer[i].push(value);
                    n_events += 1;
                }
                None => diag(
                    DiagnosticKind::UnknownIssuer,
                    &names[2],
                    line,
                    format!("event for unknown issuer '{}'", value.issuer_id),
                ),
            }
        }
        for list in &mut per_issuer {
            list.sort_by(|a, b| {
                (a.date, a.event_type.precedence())
                    .cmp(&(b.date, b.event_type.precedence()))
                    .then_with(|| {
                        let ra = a.recovery_rate.unwrap_or(f64::INFINITY);
                        let rb = b.recovery_rate.unwrap_or(f64::INFINITY);
                        ra.total_cmp(&rb)
                    })
            });
        }

        if !diagnostics.is_empty() {
            return Err(IngestError::Rejected(diagnostics));
        }

        let key_history: Vec<Vec<(NaiveDate, Rating)>> = key_history
            .into_iter()
            .map(|h| h.into_iter().map(|(d, r, _)| (d, r)).collect())
            .collect();
        let mut timeline: Vec<(NaiveDate, usize, Rating)> = key_history
            .iter()
            .enumerate()
            .flat_map(|(k, h)| h.iter().map(move |&(d, r)| (d, k, r)))
            .collect();
        timeline.sort_by_key(|&(d, k, _)| (d, k));

        Ok(Self {
            issuers: issuer_rows,
            issuer_index,
            keys,
            key_history,
            timeline,
            events: per_issuer,
            n_events,
        })
    }

    pub fn issuer_count(&self) -> usize {
        self.issuers.len()
    }

    pub fn snapshot_count(&self) -> usize {
        self.timeline.len()
    }

    pub fn event_count(&self) -> usize {
        self.n_events
    }

    pub fn issuer(&self, id: &str) -> Option<&Issuer> {
        self.issuer_index.get(id).map(|&i| &self.issuers[i])
    }

    pub(crate) fn keys(&self) -> &[(usize, Seniority)] {
        &self.keys
    }

    pub(crate) fn timeline(&self) -> &[(NaiveDate, usize, Rating)] {
        &self.timeline
    }

    /// Rating of `key` as of `date`: the latest snapshot on or before it.
    pub(crate) fn rating_as_of(&self, key: usize, date: NaiveDate) -> Option<Rating> {
        let history = &self.key_history[key];
        let idx = history.partition_point(|&(d, _)| d <= date);
        idx.checked_sub(1).map(|i| history[i].1)
    }

    /// First event of `issuer` in `[start, end)` under the precedence order.
    pub(crate) fn first_event(
        &self,
        issuer: usize,
        start: NaiveDate,
        end: NaiveDate,
    ) -> Option<&IssuerEvent> {
        let list = &self.events[issuer];
        let idx = list.partition_point(|e| e.date < start);
        list.get(idx).filter(|e| e.date < end)
    }
}
