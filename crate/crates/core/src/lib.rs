//! Bibliometric network matrices under full and fractional counting.
//!
//! Paper records become an entity-by-paper incidence matrix `A`
//! ([`counting`]), optionally regrouped to a coarser level
//! ([`aggregation`]), projected to the entity network `B = A·Aᵀ`
//! ([`projection`]) and written as a weighted graph ([`export`]).
//!
//! When every column of `A` sums to one, the grand total of `B` equals the
//! number of papers. [`projection::audit_conservation`] checks exactly that.

pub mod aggregation;
pub mod cli;
pub mod counting;
pub mod export;
pub mod ingest;
pub mod model;
pub mod projection;

pub use aggregation::{aggregate_incidence, aggregate_then_project, AggregationError};
pub use counting::{build_incidence, credit_vector, incidence_mass, CountingError};
pub use export::{export_edgelist, export_graphml, export_pajek};
pub use ingest::{parse_aggregation_map, parse_records_csv, parse_records_jsonl, IngestError};
pub use model::{
    AggregationMap, ConservationReport, CountingScheme, EntityId, IncidenceMatrix, Level,
    ModelError, NetworkMatrix, PaperRecord,
};
pub use projection::{
    audit_conservation, mass_decomposition, network_mass, project, ProjectionError,
};
