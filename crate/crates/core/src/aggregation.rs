//! Regrouping incidence rows from one entity level to a coarser one.
//!
//! Aggregation always happens on `A`, before projection. Regrouping rows only
//! adds entries within a column, so column sums (and with them the
//! conservation rule) carry over to the coarse level.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{AggregationMap, EntityId, IncidenceMatrix, Level, ModelError, NetworkMatrix};
use crate::projection::project;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregationError {
    #[error("entity {0:?} has no group in the aggregation map")]
    UnmappedEntity(String),
    #[error("entity {entity} is at level {found}, map expects {expected}")]
    LevelMismatch {
        entity: String,
        found: Level,
        expected: Level,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn aggregate_incidence(
    a: &IncidenceMatrix,
    map: &AggregationMap,
) -> Result<IncidenceMatrix, AggregationError> {
    let mut targets = Vec::with_capacity(a.entity_count());
    for row in a.rows() {
        if row.level() != map.from_level() {
            return Err(AggregationError::LevelMismatch {
                entity: row.id().to_string(),
                found: row.level(),
                expected: map.from_level(),
            });
        }
        let group = map
            .group_of(row.id())
            .ok_or_else(|| AggregationError::UnmappedEntity(row.id().to_string()))?;
        targets.push(EntityId::new(group, map.to_level())?);
    }

    let mut groups: BTreeMap<&EntityId, usize> = targets.iter().map(|t| (t, 0)).collect();
    for (g, slot) in groups.values_mut().enumerate() {
        *slot = g;
    }
    let row_to_group: Vec<usize> = targets.iter().map(|t| groups[t]).collect();

    let columns = a
        .columns()
        .map(|column| {
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for &(i, v) in column {
                *acc.entry(row_to_group[i]).or_insert(0.0) += v;
            }
            acc.into_iter().collect()
        })
        .collect();

    let rows = groups.into_keys().cloned().collect();
    Ok(IncidenceMatrix::from_columns(
        rows,
        a.cols().to_vec(),
        columns,
        a.scheme(),
    )?)
}

pub fn aggregate_then_project(
    a: &IncidenceMatrix,
    map: &AggregationMap,
) -> Result<NetworkMatrix, AggregationError> {
    Ok(project(&aggregate_incidence(a, map)?))
}
