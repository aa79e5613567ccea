//! The network projection `B = A·Aᵀ`, its mass decompositions and the
//! conservation audit.
//!
//! `b_ij = Σ_k a_ik · a_jk`. When every column of `A` sums to one the grand
//! total of `B` is `Σ_k (Σ_i a_ik)² = J`; under full counting each paper
//! contributes the square of its author count instead.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::counting::incidence_mass;
use crate::model::{ConservationReport, IncidenceMatrix, NetworkMatrix, NetworkStorage};

pub mod oracle;

/// Largest entity count projected into dense storage.
pub const DENSE_LIMIT: usize = 10_000;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("network matrix is not symmetric at ({i}, {j}): {ij} vs {ji}")]
    AsymmetricInput {
        i: usize,
        j: usize,
        ij: f64,
        ji: f64,
    },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageChoice {
    /// Dense up to [`DENSE_LIMIT`] entities, sparse above.
    Auto,
    Dense,
    Sparse,
}

/// Computes `B = A·Aᵀ`, keeping the diagonal.
pub fn project(a: &IncidenceMatrix) -> NetworkMatrix {
    project_with(a, StorageChoice::Auto)
}

/// Computes `B = A·Aᵀ` into the requested storage.
///
/// Accumulation runs paper by paper over each column's nonzero pattern, so
/// the cost is `Σ_k nnz_k²`. For a fixed `(i, j)` the terms are always added
/// in column order, which makes dense and sparse results bit-identical.
pub fn project_with(a: &IncidenceMatrix, choice: StorageChoice) -> NetworkMatrix {
    let n = a.entity_count();
    let dense = match choice {
        StorageChoice::Auto => n <= DENSE_LIMIT,
        StorageChoice::Dense => true,
        StorageChoice::Sparse => false,
    };
    let storage = if dense {
        let mut flat = vec![0.0; n * n];
        for column in a.columns() {
            for (x, &(p, ap)) in column.iter().enumerate() {
                for &(q, aq) in &column[x..] {
                    flat[p * n + q] += ap * aq;
                }
            }
        }
        for p in 0..n {
            for q in (p + 1)..n {
                flat[q * n + p] = flat[p * n + q];
            }
        }
        NetworkStorage::Dense(flat)
    } else {
        let mut upper: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for column in a.columns() {
            for (x, &(p, ap)) in column.iter().enumerate() {
                for &(q, aq) in &column[x..] {
                    *upper[p].entry(q).or_insert(0.0) += ap * aq;
                }
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        // lower triangle first so each row ends up sorted by column
        for (p, entries) in upper.iter().enumerate() {
            for (&q, &v) in entries {
                if q > p && v != 0.0 {
                    rows[q].push((p, v));
                }
            }
        }
        for (p, entries) in upper.into_iter().enumerate() {
            rows[p].extend(entries.into_iter().filter(|&(_, v)| v != 0.0));
        }
        NetworkStorage::Sparse(rows)
    };
    NetworkMatrix::from_parts(a.rows().to_vec(), storage, a.paper_count())
}

/// Grand total `Σ_ij b_ij` over all `I²` positions, summed row-major.
pub fn network_mass(b: &NetworkMatrix) -> f64 {
    (0..b.size())
        .map(|i| b.row(i).map(|(_, v)| v).sum::<f64>())
        .sum()
}

/// Splits the network mass into the diagonal part and the strict upper
/// triangle, so that `self + 2·collaboration = network_mass`.
pub fn mass_decomposition(b: &NetworkMatrix) -> Result<(f64, f64), ProjectionError> {
    let mut self_mass = 0.0;
    let mut collaboration = 0.0;
    for i in 0..b.size() {
        for (j, v) in b.row(i) {
            if j == i {
                self_mass += v;
            } else if j > i {
                let ji = b.get(j, i);
                if (v - ji).abs() > SYMMETRY_TOLERANCE {
                    return Err(ProjectionError::AsymmetricInput { i, j, ij: v, ji });
                }
                collaboration += v;
            } else if b.get(j, i) == 0.0 {
                // nonzero below the diagonal with nothing above it
                return Err(ProjectionError::AsymmetricInput {
                    i,
                    j,
                    ij: v,
                    ji: 0.0,
                });
            }
        }
    }
    Ok((self_mass, collaboration))
}

/// Row totals `Σ_j b_ij`.
pub fn row_sums(b: &NetworkMatrix) -> Vec<f64> {
    (0..b.size())
        .map(|i| b.row(i).map(|(_, v)| v).sum())
        .collect()
}

/// Projects `a` and checks the conservation rule at `tolerance`.
pub fn audit_conservation(
    a: &IncidenceMatrix,
    tolerance: f64,
) -> Result<ConservationReport, ProjectionError> {
    let b = project(a);
    audit_projection(a, &b, tolerance)
}

/// Checks the conservation rule for `a` against an already computed (or
/// deliberately altered) network matrix `b`.
pub fn audit_projection(
    a: &IncidenceMatrix,
    b: &NetworkMatrix,
    tolerance: f64,
) -> Result<ConservationReport, ProjectionError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(ProjectionError::InvalidTolerance(tolerance));
    }
    let (self_mass, collaboration_mass) = mass_decomposition(b)?;
    let network_mass = network_mass(b);
    let expected = a.paper_count();
    let column_violations: Vec<(String, f64)> = a
        .cols()
        .iter()
        .zip(a.column_sums())
        .filter(|(_, sum)| (sum - 1.0).abs() > tolerance)
        .map(|(paper, sum)| (paper.clone(), sum))
        .collect();
    let mass_ok = (network_mass - expected as f64).abs() <= tolerance * (expected as f64).max(1.0);
    Ok(ConservationReport {
        scheme: a.scheme(),
        entities: a.entity_count(),
        incidence_mass: incidence_mass(a),
        network_mass,
        self_mass,
        collaboration_mass,
        expected,
        conserved: column_violations.is_empty() && mass_ok,
        column_violations,
        tolerance,
    })
}
