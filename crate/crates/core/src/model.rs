//! Domain types shared by the counting, projection, aggregation and export
//! stages.
//!
//! Everything here is immutable once constructed. Constructors validate the
//! invariants; there are no setters.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Absolute tolerance used for every unit-sum check.
pub const UNIT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("entity identifier is empty")]
    EmptyEntityId,
    #[error("entity identifier {0:?} contains a control character")]
    ControlCharacter(String),
    #[error("paper identifier is empty")]
    EmptyPaperId,
    #[error("paper {0:?} has no contributors")]
    NoContributors(String),
    #[error("paper {paper_id:?} lists contributor {entity_id:?} more than once")]
    DuplicateContributor { paper_id: String, entity_id: String },
    #[error("paper {paper_id:?} has {weights} weights for {contributors} contributors")]
    OverrideLength {
        paper_id: String,
        contributors: usize,
        weights: usize,
    },
    #[error("paper {paper_id:?} has invalid weight {weight}")]
    NegativeWeight { paper_id: String, weight: f64 },
    #[error("weights of paper {paper_id:?} sum to {sum}, expected 1")]
    WeightSum { paper_id: String, sum: f64 },
    #[error("unknown entity level {0:?}")]
    UnknownLevel(String),
    #[error("duplicate row entity {0}")]
    DuplicateRow(EntityId),
    #[error("duplicate column paper {0:?}")]
    DuplicateColumn(String),
    #[error("entry ({row}, {col}) is {value}, entries must be finite and non-negative")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("entry ({row}, {col}) is out of bounds")]
    OutOfBounds { row: usize, col: usize },
    #[error("full counting entry ({row}, {col}) is {value}, expected a positive integer")]
    NonIntegralFullEntry { row: usize, col: usize, value: f64 },
    #[error("column {paper_id:?} sums to {sum} under fractional counting")]
    ColumnSum { paper_id: String, sum: f64 },
    #[error("matrix has {entities} entities but {rows} rows")]
    Shape { entities: usize, rows: usize },
    #[error("b[{i}][{j}] = {ij} differs from b[{j}][{i}] = {ji}")]
    Asymmetric {
        i: usize,
        j: usize,
        ij: f64,
        ji: f64,
    },
    #[error("b[{i}][{j}]^2 exceeds b[{i}][{i}] * b[{j}][{j}]")]
    CauchySchwarz { i: usize, j: usize },
}

/// Granularity of an entity. Ordering follows declaration order and is used
/// when sorting incidence rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Author,
    Institute,
    Country,
    Journal,
    Custom,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::Author,
        Level::Institute,
        Level::Country,
        Level::Journal,
        Level::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Author => "author",
            Level::Institute => "institute",
            Level::Country => "country",
            Level::Journal => "journal",
            Level::Custom => "custom",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownLevel(s.to_string()))
    }
}

/// An entity identified by the `(level, id)` pair. The same string at two
/// levels names two distinct entities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    // field order gives the (level, id) sort
    level: Level,
    id: String,
}

impl EntityId {
    pub fn new(id: impl Into<String>, level: Level) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyEntityId);
        }
        if id.chars().any(char::is_control) {
            return Err(ModelError::ControlCharacter(id));
        }
        Ok(EntityId { level, id })
    }

    pub fn author(id: impl Into<String>) -> Result<Self, ModelError> {
        Self::new(id, Level::Author)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn level(&self) -> Level {
        self.level
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.id)
    }
}

/// One paper and its contributing entities, optionally with explicit credit
/// shares that must sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    paper_id: String,
    contributors: Vec<EntityId>,
    credit_override: Option<Vec<f64>>,
}

impl PaperRecord {
    pub fn new(
        paper_id: impl Into<String>,
        contributors: Vec<EntityId>,
        credit_override: Option<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        let paper_id = paper_id.into();
        if paper_id.is_empty() {
            return Err(ModelError::EmptyPaperId);
        }
        if contributors.is_empty() {
            return Err(ModelError::NoContributors(paper_id));
        }
        let mut seen = HashSet::with_capacity(contributors.len());
        for c in &contributors {
            if !seen.insert(c) {
                return Err(ModelError::DuplicateContributor {
                    paper_id,
                    entity_id: c.id().to_string(),
                });
            }
        }
        if let Some(weights) = &credit_override {
            validate_weights(&paper_id, contributors.len(), weights)?;
        }
        Ok(PaperRecord {
            paper_id,
            contributors,
            credit_override,
        })
    }

    /// Convenience constructor for author-level records without weights.
    pub fn authors<S: AsRef<str>>(paper_id: &str, authors: &[S]) -> Result<Self, ModelError> {
        let contributors = authors
            .iter()
            .map(|a| EntityId::author(a.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(paper_id, contributors, None)
    }

    pub fn paper_id(&self) -> &str {
        &self.paper_id
    }

    pub fn contributors(&self) -> &[EntityId] {
        &self.contributors
    }

    pub fn credit_override(&self) -> Option<&[f64]> {
        self.credit_override.as_deref()
    }
}

pub(crate) fn validate_weights(
    paper_id: &str,
    contributors: usize,
    weights: &[f64],
) -> Result<(), ModelError> {
    if weights.len() != contributors {
        return Err(ModelError::OverrideLength {
            paper_id: paper_id.to_string(),
            contributors,
            weights: weights.len(),
        });
    }
    if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(ModelError::NegativeWeight {
            paper_id: paper_id.to_string(),
            weight: w,
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > UNIT_SUM_TOLERANCE {
        return Err(ModelError::WeightSum {
            paper_id: paper_id.to_string(),
            sum,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingScheme {
    /// Every contributor receives credit 1.
    Full,
    /// Each paper's unit of credit is split equally.
    FractionalEqual,
    /// Each paper's unit of credit is split by its `credit_override`.
    FractionalCustom,
}

impl CountingScheme {
    pub fn is_fractional(self) -> bool {
        !matches!(self, CountingScheme::Full)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CountingScheme::Full => "full",
            CountingScheme::FractionalEqual => "fractional",
            CountingScheme::FractionalCustom => "fractional-custom",
        }
    }
}

impl fmt::Display for CountingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The entity-by-paper matrix `A`, stored column-major and sparse: each
/// column holds its nonzero `(row, value)` pairs in ascending row order.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    rows: Vec<EntityId>,
    cols: Vec<String>,
    columns: Vec<Vec<(usize, f64)>>,
    scheme: CountingScheme,
}

impl IncidenceMatrix {
    /// Builds a matrix from sparse columns, validating every invariant.
    /// Entries within a column may come in any order; explicit zeros are
    /// dropped and repeated rows within a column are rejected.
    pub fn from_columns(
        rows: Vec<EntityId>,
        cols: Vec<String>,
        columns: Vec<Vec<(usize, f64)>>,
        scheme: CountingScheme,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(rows.len());
        for r in &rows {
            if !seen.insert(r) {
                return Err(ModelError::DuplicateRow(r.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(cols.len());
        for c in &cols {
            if !seen.insert(c.as_str()) {
                return Err(ModelError::DuplicateColumn(c.clone()));
            }
        }
        if columns.len() != cols.len() {
            return Err(ModelError::OutOfBounds {
                row: 0,
                col: columns.len().max(cols.len()),
            });
        }

        let mut normalized = Vec::with_capacity(columns.len());
        for (j, mut column) in columns.into_iter().enumerate() {
            column.sort_by_key(|&(i, _)| i);
            for w in column.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(ModelError::DuplicateRow(rows[w[0].0].clone()));
                }
            }
            for &(i, v) in &column {
                if i >= rows.len() {
                    return Err(ModelError::OutOfBounds { row: i, col: j });
                }
                if !v.is_finite() || v < 0.0 {
                    return Err(ModelError::InvalidEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                if scheme == CountingScheme::Full && v != 0.0 && v.fract() != 0.0 {
                    return Err(ModelError::NonIntegralFullEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            column.retain(|&(_, v)| v != 0.0);
            if scheme.is_fractional() {
                let sum: f64 = column.iter().map(|&(_, v)| v).sum();
                if (sum - 1.0).abs() > UNIT_SUM_TOLERANCE {
                    return Err(ModelError::ColumnSum {
                        paper_id: cols[j].clone(),
                        sum,
                    });
                }
            }
            normalized.push(column);
        }

        Ok(IncidenceMatrix {
            rows,
            cols,
            columns: normalized,
            scheme,
        })
    }

    /// Builds a matrix from a dense row-major `I × J` array.
    pub fn from_dense(
        rows: Vec<EntityId>,
        cols: Vec<String>,
        dense: &[Vec<f64>],
        scheme: CountingScheme,
    ) -> Result<Self, ModelError> {
        if dense.len() != rows.len() {
            return Err(ModelError::Shape {
                entities: rows.len(),
                rows: dense.len(),
            });
        }
        let mut columns = vec![Vec::new(); cols.len()];
        for (i, row) in dense.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(ModelError::OutOfBounds {
                    row: i,
                    col: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    columns[j].push((i, v));
                }
            }
        }
        Self::from_columns(rows, cols, columns, scheme)
    }

    pub fn rows(&self) -> &[EntityId] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn scheme(&self) -> CountingScheme {
        self.scheme
    }

    /// Number of entities, `I`.
    pub fn entity_count(&self) -> usize {
        self.rows.len()
    }

    /// Number of papers, `J`.
    pub fn paper_count(&self) -> usize {
        self.cols.len()
    }

    /// Nonzero entries of column `j`, ascending by row.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[(usize, f64)]> {
        self.columns.iter().map(Vec::as_slice)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let column = &self.columns[j];
        column
            .binary_search_by_key(&i, |&(r, _)| r)
            .map(|pos| column[pos].1)
            .unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| c.iter().map(|&(_, v)| v).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.rows.len()];
        for column in &self.columns {
            for &(i, v) in column {
                sums[i] += v;
            }
        }
        sums
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols.len()]; self.rows.len()];
        for (j, column) in self.columns.iter().enumerate() {
            for &(i, v) in column {
                dense[i][j] = v;
            }
        }
        dense
    }

    pub fn row_index(&self, entity: &EntityId) -> Option<usize> {
        self.rows.binary_search(entity).ok().or_else(|| {
            // rows are sorted when built by this crate, but not necessarily
            // when supplied through from_columns
            self.rows.iter().position(|r| r == entity)
        })
    }
}

/// Storage backing a [`NetworkMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkStorage {
    /// Row-major `I × I`.
    Dense(Vec<f64>),
    /// Per-row sorted nonzeros, mirrored so both `(i, j)` and `(j, i)` are
    /// present.
    Sparse(Vec<Vec<(usize, f64)>>),
}

/// The symmetric entity-by-entity matrix `B = A·Aᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMatrix {
    entities: Vec<EntityId>,
    storage: NetworkStorage,
    source_paper_count: usize,
}

impl NetworkMatrix {
    /// Caller guarantees the storage is symmetric and sized to `entities`.
    pub(crate) fn from_parts(
        entities: Vec<EntityId>,
        storage: NetworkStorage,
        source_paper_count: usize,
    ) -> Self {
        NetworkMatrix {
            entities,
            storage,
            source_paper_count,
        }
    }

    /// Builds a dense network matrix, checking symmetry (exact), diagonal
    /// non-negativity and the Cauchy–Schwarz bound.
    pub fn from_dense(
        entities: Vec<EntityId>,
        dense: &[Vec<f64>],
        source_paper_count: usize,
    ) -> Result<Self, ModelError> {
        let n = entities.len();
        if dense.len() != n {
            return Err(ModelError::Shape {
                entities: n,
                rows: dense.len(),
            });
        }
        let mut seen = HashSet::with_capacity(n);
        for e in &entities {
            if !seen.insert(e) {
                return Err(ModelError::DuplicateRow(e.clone()));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in dense.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::OutOfBounds {
                    row: i,
                    col: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::InvalidEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            let d = flat[i * n + i];
            if d < 0.0 {
                return Err(ModelError::InvalidEntry {
                    row: i,
                    col: i,
                    value: d,
                });
            }
            for j in (i + 1)..n {
                let (ij, ji) = (flat[i * n + j], flat[j * n + i]);
                if ij != ji {
                    return Err(ModelError::Asymmetric { i, j, ij, ji });
                }
                if ij * ij > d * flat[j * n + j] + 1e-9 {
                    return Err(ModelError::CauchySchwarz { i, j });
                }
            }
        }
        Ok(NetworkMatrix {
            entities,
            storage: NetworkStorage::Dense(flat),
            source_paper_count,
        })
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn size(&self) -> usize {
        self.entities.len()
    }

    /// `J`, the number of papers the matrix was projected from.
    pub fn source_paper_count(&self) -> usize {
        self.source_paper_count
    }

    pub fn storage(&self) -> &NetworkStorage {
        &self.storage
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, NetworkStorage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let n = self.size();
        assert!(i < n && j < n, "index ({i}, {j}) out of bounds for {n}");
        match &self.storage {
            NetworkStorage::Dense(flat) => flat[i * n + j],
            NetworkStorage::Sparse(rows) => rows[i]
                .binary_search_by_key(&j, |&(c, _)| c)
                .map(|pos| rows[i][pos].1)
                .unwrap_or(0.0),
        }
    }

    /// Nonzero entries of row `i` in ascending column order.
    pub fn row(&self, i: usize) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        let n = self.size();
        match &self.storage {
            NetworkStorage::Dense(flat) => Box::new(
                flat[i * n..(i + 1) * n]
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|&(_, v)| v != 0.0),
            ),
            NetworkStorage::Sparse(rows) => Box::new(rows[i].iter().copied()),
        }
    }

    /// Nonzero entries with `i <= j`, in `(i, j)` order.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size()).flat_map(move |i| {
            self.row(i)
                .filter(move |&(j, _)| j >= i)
                .map(move |(j, v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Copy with every diagonal entry set to zero.
    pub fn without_diagonal(&self) -> Result<NetworkMatrix, ModelError> {
        let mut dense = self.to_dense();
        for (i, row) in dense.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        NetworkMatrix::from_dense(self.entities.clone(), &dense, self.source_paper_count)
    }
}

/// A single-valued map from entities at one level to groups at another.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationMap {
    from_level: Level,
    to_level: Level,
    mapping: std::collections::BTreeMap<String, String>,
}

impl AggregationMap {
    pub fn new(from_level: Level, to_level: Level) -> Self {
        AggregationMap {
            from_level,
            to_level,
            mapping: Default::default(),
        }
    }

    /// Adds `entity -> group`. Returns the previous group if one existed and
    /// differed.
    pub fn insert(
        &mut self,
        entity: impl Into<String>,
        group: impl Into<String>,
    ) -> Option<String> {
        let group = group.into();
        match self.mapping.insert(entity.into(), group.clone()) {
            Some(prev) if prev != group => Some(prev),
            _ => None,
        }
    }

    pub fn from_level(&self) -> Level {
        self.from_level
    }

    pub fn to_level(&self) -> Level {
        self.to_level
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn group_of(&self, entity_id: &str) -> Option<&str> {
        self.mapping.get(entity_id).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.mapping.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `self` followed by `next`. Entities whose group has no image under
    /// `next` are left out of the result.
    pub fn then(&self, next: &AggregationMap) -> AggregationMap {
        let mut composed = AggregationMap::new(self.from_level, next.to_level);
        for (entity, group) in self.iter() {
            if let Some(target) = next.group_of(group) {
                composed.insert(entity, target);
            }
        }
        composed
    }
}

/// Result of checking the conservation rule on an incidence matrix and its
/// projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub scheme: CountingScheme,
    pub entities: usize,
    pub incidence_mass: f64,
    pub network_mass: f64,
    pub self_mass: f64,
    pub collaboration_mass: f64,
    pub expected: usize,
    /// Papers whose column sum deviates from 1 by more than `tolerance`.
    pub column_violations: Vec<(String, f64)>,
    pub conserved: bool,
    pub tolerance: f64,
}

impl ConservationReport {
    /// Surplus of network mass over the paper count.
    pub fn inflation(&self) -> f64 {
        self.network_mass - self.expected as f64
    }

    /// Fixed-order `key=value` block, one pair per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        line("scheme", self.scheme.to_string());
        line("entities", self.entities.to_string());
        line("papers", self.expected.to_string());
        line("incidence_mass", format!("{:.9}", self.incidence_mass));
        line("network_mass", format!("{:.9}", self.network_mass));
        line("self_mass", format!("{:.9}", self.self_mass));
        line(
            "collaboration_mass",
            format!("{:.9}", self.collaboration_mass),
        );
        line("inflation", format!("{:.9}", self.inflation()));
        line("tolerance", format!("{:e}", self.tolerance));
        line(
            "column_violations",
            self.column_violations.len().to_string(),
        );
        for (paper, sum) in &self.column_violations {
            line("violation", format!("{paper},{sum:.9}"));
        }
        line("conserved", self.conserved.to_string());
        out
    }
}
