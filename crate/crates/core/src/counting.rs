//! Construction of the incidence matrix `A` under a counting scheme.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::model::{self, CountingScheme, IncidenceMatrix, ModelError, PaperRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("no paper records to count")]
    EmptyRecordList,
    #[error("paper id {0:?} appears more than once")]
    DuplicatePaperId(String),
    #[error("paper {0:?} has no credit weights but fractional-custom counting needs them")]
    MissingOverride(String),
    #[error("invalid credit weights: {0}")]
    InvalidOverride(ModelError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-contributor credit for one paper, in contributor order.
pub fn credit_vector(
    record: &PaperRecord,
    scheme: CountingScheme,
) -> Result<Vec<f64>, CountingError> {
    let k = record.contributors().len();
    match scheme {
        CountingScheme::Full => Ok(vec![1.0; k]),
        CountingScheme::FractionalEqual => Ok(vec![1.0 / k as f64; k]),
        CountingScheme::FractionalCustom => {
            let weights = record
                .credit_override()
                .ok_or_else(|| CountingError::MissingOverride(record.paper_id().to_string()))?;
            model::validate_weights(record.paper_id(), k, weights)
                .map_err(CountingError::InvalidOverride)?;
            Ok(weights.to_vec())
        }
    }
}

/// Builds `A` with rows sorted by `(level, id)` and columns in record order.
pub fn build_incidence(
    records: &[PaperRecord],
    scheme: CountingScheme,
) -> Result<IncidenceMatrix, CountingError> {
    if records.is_empty() {
        return Err(CountingError::EmptyRecordList);
    }
    let mut paper_ids = HashSet::with_capacity(records.len());
    for r in records {
        if !paper_ids.insert(r.paper_id()) {
            return Err(CountingError::DuplicatePaperId(r.paper_id().to_string()));
        }
    }

    let rows: Vec<_> = records
        .iter()
        .flat_map(|r| r.contributors().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut columns = Vec::with_capacity(records.len());
    for record in records {
        let credits = credit_vector(record, scheme)?;
        let column: Vec<(usize, f64)> = record
            .contributors()
            .iter()
            .zip(credits)
            .map(|(entity, credit)| {
                let i = rows
                    .binary_search(entity)
                    .expect("row set covers all contributors");
                (i, credit)
            })
            .collect();
        columns.push(column);
    }
    let cols = records.iter().map(|r| r.paper_id().to_string()).collect();
    Ok(IncidenceMatrix::from_columns(rows, cols, columns, scheme)?)
}

/// Grand total `Σ a_ij`.
pub fn incidence_mass(a: &IncidenceMatrix) -> f64 {
    a.columns()
        .map(|c| c.iter().map(|&(_, v)| v).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EntityId;

    fn sample() -> Vec<PaperRecord> {
        vec![
            PaperRecord::authors("p1", &["a1", "a2", "a3"]).unwrap(),
            PaperRecord::authors("p2", &["a1", "a3"]).unwrap(),
            PaperRecord::authors("p3", &["a2", "a4"]).unwrap(),
        ]
    }

    #[test]
    fn fractional_sample_columns() {
        let a = build_incidence(&sample(), CountingScheme::FractionalEqual).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(
            a.to_dense(),
            vec![
                vec![third, 0.5, 0.0],
                vec![third, 0.0, 0.5],
                vec![third, 0.5, 0.0],
                vec![0.0, 0.0, 0.5],
            ]
        );
        let totals = a.row_sums();
        for (got, want) in totals.iter().zip([0.833, 0.833, 0.833, 0.5]) {
            assert!((got - want).abs() < 1e-3);
        }
    }

    #[test]
    fn full_sample_totals() {
        let a = build_incidence(&sample(), CountingScheme::Full).unwrap();
        assert_eq!(a.row_sums(), vec![2.0, 2.0, 2.0, 1.0]);
        assert_eq!(incidence_mass(&a), 7.0);
    }

    #[test]
    fn single_author_is_unit() {
        let recs = vec![PaperRecord::authors("p1", &["a1"]).unwrap()];
        let a = build_incidence(&recs, CountingScheme::FractionalEqual).unwrap();
        assert_eq!(a.to_dense(), vec![vec![1.0]]);
        assert_eq!(incidence_mass(&a), 1.0);
    }

    #[test]
    fn credit_vectors() {
        let r = PaperRecord::authors("p", &["a", "b", "c"]).unwrap();
        assert_eq!(
            credit_vector(&r, CountingScheme::FractionalEqual).unwrap(),
            vec![1.0 / 3.0; 3]
        );
        assert_eq!(
            credit_vector(&r, CountingScheme::Full).unwrap(),
            vec![1.0; 3]
        );
        let r = PaperRecord::authors("p", &["a", "b", "c", "d"]).unwrap();
        assert_eq!(
            credit_vector(&r, CountingScheme::FractionalEqual).unwrap(),
            vec![0.25; 4]
        );
        let solo =
            PaperRecord::new("p", vec![EntityId::author("a").unwrap()], Some(vec![1.0])).unwrap();
        for s in [
            CountingScheme::FractionalEqual,
            CountingScheme::FractionalCustom,
        ] {
            assert_eq!(credit_vector(&solo, s).unwrap(), vec![1.0]);
        }
    }

    #[test]
    fn custom_requires_override() {
        let err = build_incidence(&sample(), CountingScheme::FractionalCustom).unwrap_err();
        assert_eq!(err, CountingError::MissingOverride("p1".into()));
    }

    #[test]
    fn custom_override_used_verbatim() {
        let r = PaperRecord::new(
            "p",
            vec![
                EntityId::author("b").unwrap(),
                EntityId::author("a").unwrap(),
            ],
            Some(vec![0.7, 0.3]),
        )
        .unwrap();
        let a = build_incidence(&[r], CountingScheme::FractionalCustom).unwrap();
        // rows sorted, so "a" comes first
        assert_eq!(a.to_dense(), vec![vec![0.3], vec![0.7]]);
    }

    #[test]
    fn rejects_empty_and_duplicate_ids() {
        assert_eq!(
            build_incidence(&[], CountingScheme::Full).unwrap_err(),
            CountingError::EmptyRecordList
        );
        let recs = vec![
            PaperRecord::authors("p1", &["a"]).unwrap(),
            PaperRecord::authors("p1", &["b"]).unwrap(),
        ];
        assert_eq!(
            build_incidence(&recs, CountingScheme::Full).unwrap_err(),
            CountingError::DuplicatePaperId("p1".into())
        );
    }

    #[test]
    fn deterministic() {
        let x = build_incidence(&sample(), CountingScheme::FractionalEqual).unwrap();
        let y = build_incidence(&sample(), CountingScheme::FractionalEqual).unwrap();
        assert_eq!(x, y);
    }
}
