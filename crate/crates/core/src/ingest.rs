//! Readers for paper records (CSV and JSON Lines) and aggregation maps
//! (CSV). Every error carries the 1-based line it was detected on.
//!
//! Records CSV:
//!
//! ```text
//! paper_id,entity_id[,weight]
//! p1,a1
//! p1,a2
//! p2,a1
//! ```
//!
//! Rows of one paper must be contiguous. Weights are all-or-nothing per paper
//! and must sum to one.
//!
//! Records JSONL, one object per line:
//!
//! ```text
//! {"paper_id":"p1","contributors":["a1","a2"],"weights":[0.5,0.5]}
//! ```
//!
//! Aggregation map CSV: header `entity_id,group_id`, one row per entity.

use std::collections::HashSet;
use std::io::Read;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{AggregationMap, EntityId, Level, ModelError, PaperRecord, UNIT_SUM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: malformed line: {reason}")]
    MalformedLine { line: u64, reason: String },
    #[error("line {line}: rows for paper {paper_id:?} are not contiguous")]
    NonContiguousPaper { paper_id: String, line: u64 },
    #[error("line {line}: paper {paper_id:?} appears more than once")]
    DuplicatePaperId { paper_id: String, line: u64 },
    #[error("line {line}: paper {paper_id:?} has weights on some rows but not all")]
    PartialWeights { paper_id: String, line: u64 },
    #[error("line {line}: paper {paper_id:?} lists {entity_id:?} more than once")]
    DuplicateContributor {
        paper_id: String,
        entity_id: String,
        line: u64,
    },
    #[error("line {line}: weights of paper {paper_id:?} sum to {sum}, expected 1")]
    WeightSumViolation {
        paper_id: String,
        sum: f64,
        line: u64,
    },
    #[error("line {line}: entity {entity_id:?} is mapped to more than one group")]
    ConflictingMapping { entity_id: String, line: u64 },
    #[error("line {line}: {source}")]
    InvalidRecord { line: u64, source: ModelError },
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn csv_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    IngestError::MalformedRow {
        line,
        reason: err.to_string(),
    }
}

/// Paper being accumulated while scanning contiguous CSV rows.
struct Pending {
    paper_id: String,
    first_line: u64,
    contributors: Vec<EntityId>,
    seen: HashSet<String>,
    weights: Vec<Option<f64>>,
}

impl Pending {
    fn finish(self) -> Result<PaperRecord, IngestError> {
        let weighted = self.weights.iter().filter(|w| w.is_some()).count();
        let credit_override = if weighted == 0 {
            None
        } else if weighted == self.weights.len() {
            let w: Vec<f64> = self.weights.into_iter().flatten().collect();
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > UNIT_SUM_TOLERANCE {
                return Err(IngestError::WeightSumViolation {
                    paper_id: self.paper_id,
                    sum,
                    line: self.first_line,
                });
            }
            Some(w)
        } else {
            return Err(IngestError::PartialWeights {
                paper_id: self.paper_id,
                line: self.first_line,
            });
        };
        let line = self.first_line;
        PaperRecord::new(self.paper_id, self.contributors, credit_override)
            .map_err(|source| IngestError::InvalidRecord { line, source })
    }
}

/// Parses author-level records from CSV.
pub fn parse_records_csv<R: Read>(input: R) -> Result<Vec<PaperRecord>, IngestError> {
    parse_records_csv_at(input, Level::Author)
}

/// Parses records from CSV, tagging every contributor with `level`.
pub fn parse_records_csv_at<R: Read>(
    input: R,
    level: Level,
) -> Result<Vec<PaperRecord>, IngestError> {
    let mut reader = csv_reader(input);
    let mut rows = reader.records();

    let header = match rows.next() {
        Some(h) => h.map_err(csv_error)?,
        None => return Ok(Vec::new()),
    };
    let with_weight = match header.iter().collect::<Vec<_>>().as_slice() {
        ["paper_id", "entity_id"] => false,
        ["paper_id", "entity_id", "weight"] => true,
        _ => {
            return Err(IngestError::MalformedRow {
                line: csv_line(&header),
                reason: "expected header `paper_id,entity_id[,weight]`".into(),
            })
        }
    };
    let width = if with_weight { 3 } else { 2 };

    let mut records = Vec::new();
    let mut finished: HashSet<String> = HashSet::new();
    let mut pending: Option<Pending> = None;

    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = csv_line(&row);
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != width {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("expected {width} fields, found {}", row.len()),
            });
        }
        let (paper_id, entity_id) = (&row[0], &row[1]);
        if paper_id.is_empty() || entity_id.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty identifier".into(),
            });
        }
        let weight = if with_weight && !row[2].is_empty() {
            let w: f64 = row[2].parse().map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("weight {:?} is not a number", &row[2]),
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("weight {w} must be finite and non-negative"),
                });
            }
            Some(w)
        } else {
            None
        };

        if pending.as_ref().map(|p| p.paper_id.as_str()) != Some(paper_id) {
            if finished.contains(paper_id) {
                return Err(IngestError::NonContiguousPaper {
                    paper_id: paper_id.to_string(),
                    line,
                });
            }
            if let Some(done) = pending.take() {
                finished.insert(done.paper_id.clone());
                records.push(done.finish()?);
            }
            pending = Some(Pending {
                paper_id: paper_id.to_string(),
                first_line: line,
                contributors: Vec::new(),
                seen: HashSet::new(),
                weights: Vec::new(),
            });
        }
        let p = pending.as_mut().expect("pending paper set above");
        if !p.seen.insert(entity_id.to_string()) {
            return Err(IngestError::DuplicateContributor {
                paper_id: paper_id.to_string(),
                entity_id: entity_id.to_string(),
                line,
            });
        }
        let entity = EntityId::new(entity_id, level)
            .map_err(|source| IngestError::InvalidRecord { line, source })?;
        p.contributors.push(entity);
        p.weights.push(weight);
    }
    if let Some(done) = pending {
        records.push(done.finish()?);
    }
    Ok(records)
}

#[derive(Deserialize)]
struct JsonRecord {
    paper_id: String,
    contributors: Vec<String>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

/// Parses author-level records from JSON Lines.
pub fn parse_records_jsonl<R: Read>(input: R) -> Result<Vec<PaperRecord>, IngestError> {
    parse_records_jsonl_at(input, Level::Author)
}

pub fn parse_records_jsonl_at<R: Read>(
    mut input: R,
    level: Level,
) -> Result<Vec<PaperRecord>, IngestError> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| IngestError::MalformedLine {
            line: 0,
            reason: e.to_string(),
        })?;

    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord =
            serde_json::from_str(raw).map_err(|e| IngestError::MalformedLine {
                line,
                reason: e.to_string(),
            })?;
        let malformed = |reason: String| IngestError::MalformedLine { line, reason };
        let paper_id = rec.paper_id.trim().to_string();
        if paper_id.is_empty() {
            return Err(malformed("empty paper_id".into()));
        }
        if !ids.insert(paper_id.clone()) {
            return Err(IngestError::DuplicatePaperId { paper_id, line });
        }

        let mut seen = HashSet::new();
        let mut contributors = Vec::with_capacity(rec.contributors.len());
        for c in &rec.contributors {
            let c = c.trim();
            if c.is_empty() {
                return Err(malformed("empty contributor".into()));
            }
            if !seen.insert(c) {
                return Err(IngestError::DuplicateContributor {
                    paper_id,
                    entity_id: c.to_string(),
                    line,
                });
            }
            contributors.push(
                EntityId::new(c, level)
                    .map_err(|source| IngestError::InvalidRecord { line, source })?,
            );
        }
        if let Some(w) = &rec.weights {
            if w.len() != contributors.len() {
                return Err(IngestError::PartialWeights { paper_id, line });
            }
            if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(malformed(format!(
                    "weight {bad} must be finite and non-negative"
                )));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > UNIT_SUM_TOLERANCE {
                return Err(IngestError::WeightSumViolation {
                    paper_id,
                    sum,
                    line,
                });
            }
        }
        records.push(
            PaperRecord::new(paper_id, contributors, rec.weights)
                .map_err(|source| IngestError::InvalidRecord { line, source })?,
        );
    }
    Ok(records)
}

/// Writes records in the CSV layout read by [`parse_records_csv`]. The weight
/// column is emitted when any record carries weights.
pub fn write_records_csv(records: &[PaperRecord]) -> String {
    let with_weight = records.iter().any(|r| r.credit_override().is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = if with_weight {
        &["paper_id", "entity_id", "weight"]
    } else {
        &["paper_id", "entity_id"]
    };
    w.write_record(header).expect("in-memory write");
    for r in records {
        for (x, c) in r.contributors().iter().enumerate() {
            let mut fields = vec![r.paper_id().to_string(), c.id().to_string()];
            if with_weight {
                fields.push(
                    r.credit_override()
                        .map_or(String::new(), |ws| ws[x].to_string()),
                );
            }
            w.write_record(&fields).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

pub fn parse_aggregation_map<R: Read>(
    input: R,
    from_level: Level,
    to_level: Level,
) -> Result<AggregationMap, IngestError> {
    let mut reader = csv_reader(input);
    let mut rows = reader.records();
    let mut map = AggregationMap::new(from_level, to_level);

    let header = match rows.next() {
        Some(h) => h.map_err(csv_error)?,
        None => return Ok(map),
    };
    if header.iter().collect::<Vec<_>>() != ["entity_id", "group_id"] {
        return Err(IngestError::MalformedRow {
            line: csv_line(&header),
            reason: "expected header `entity_id,group_id`".into(),
        });
    }
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = csv_line(&row);
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != 2 || row[0].is_empty() || row[1].is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "expected `entity_id,group_id`".into(),
            });
        }
        for id in [&row[0], &row[1]] {
            EntityId::new(id, from_level)
                .map_err(|source| IngestError::InvalidRecord { line, source })?;
        }
        if map.insert(&row[0], &row[1]).is_some() {
            return Err(IngestError::ConflictingMapping {
                entity_id: row[0].to_string(),
                line,
            });
        }
    }
    Ok(map)
}
