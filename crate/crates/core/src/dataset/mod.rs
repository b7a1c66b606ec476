//! Typed columnar tables, CSV ingestion, sampling and attribute combinations.

mod combinations;
mod ingest;
mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use combinations::{enumerate_combinations, CombinationMatrix, CombinationSpec, Series};
pub use ingest::{infer_attribute_type, load_csv, load_csv_reader, parse_timestamp, InferredType, IngestConfig};
pub use sample::sample_rows;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("zero data rows")]
    ZeroDataRows,
    #[error("untyped column")]
    UntypedColumn,
    #[error("max_rows must be at least 100, got {0}")]
    SampleTooSmall(usize),
    #[error("signature length must be 1..=4, got {0}")]
    SignatureLength(usize),
}

/// Attribute type of a column: numerical, categorical or temporal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttributeType {
    N,
    C,
    T,
}

impl fmt::Display for AttributeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AttributeType::N => "N",
            AttributeType::C => "C",
            AttributeType::T => "T",
        };
        f.write_str(s)
    }
}

/// Renders a signature as `N×N`, `T×N×C`, ...
pub fn signature_label(signature: &[AttributeType]) -> String {
    signature.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("×")
}

/// Why a column takes no part in attribute combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    /// Categorical with more distinct values than the cardinality cap.
    CardinalityOverflow,
    /// Every cell is missing.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numerical(Vec<Option<f64>>),
    /// Category ids index into `levels`, which is sorted.
    Categorical {
        codes: Vec<Option<u32>>,
        levels: Vec<String>,
    },
    /// Epoch seconds.
    Temporal(Vec<Option<i64>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numerical(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
            ColumnData::Temporal(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Numerical(v) => v[row].is_none(),
            ColumnData::Categorical { codes, .. } => codes[row].is_none(),
            ColumnData::Temporal(v) => v[row].is_none(),
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numerical(v) => ColumnData::Numerical(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical { codes, levels } => ColumnData::Categorical {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                levels: levels.clone(),
            },
            ColumnData::Temporal(v) => ColumnData::Temporal(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub attr_type: AttributeType,
    pub data: ColumnData,
    pub exclusion: Option<Exclusion>,
}

impl Column {
    pub fn numerical(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self {
            name: name.into(),
            attr_type: AttributeType::N,
            data: ColumnData::Numerical(values),
            exclusion: None,
        }
    }

    /// Builds a categorical column from labels; levels are sorted.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: &[Option<S>]) -> Self {
        let mut levels: Vec<String> = values.iter().flatten().map(|s| s.as_ref().to_string()).collect();
        levels.sort();
        levels.dedup();
        let codes = values
            .iter()
            .map(|v| {
                v.as_ref()
                    .map(|s| levels.binary_search_by(|l| l.as_str().cmp(s.as_ref())).unwrap() as u32)
            })
            .collect();
        Self {
            name: name.into(),
            attr_type: AttributeType::C,
            data: ColumnData::Categorical { codes, levels },
            exclusion: None,
        }
    }

    pub fn temporal(name: impl Into<String>, values: Vec<Option<i64>>) -> Self {
        Self {
            name: name.into(),
            attr_type: AttributeType::T,
            data: ColumnData::Temporal(values),
            exclusion: None,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn null_fraction(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        let missing = (0..n).filter(|&r| self.data.is_missing(r)).count();
        missing as f64 / n as f64
    }

    /// Whether this column may appear in attribute combinations.
    pub fn is_usable(&self) -> bool {
        self.exclusion.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub attr_type: AttributeType,
    pub null_fraction: f64,
    /// Category count for categorical columns.
    pub distinct: Option<usize>,
    pub exclusion: Option<Exclusion>,
}

/// Immutable typed table. `row_ids` are the original (pre-sampling) row numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    columns: Vec<Column>,
    row_ids: Vec<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SchemaError {
    #[error("column `{name}` has {len} rows, expected {expected}")]
    LengthMismatch { name: String, len: usize, expected: usize },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("dataset has no rows")]
    NoRows,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self, SchemaError> {
        let rows = columns.first().map_or(0, Column::len);
        Self::with_row_ids(name, columns, (0..rows).collect())
    }

    pub fn with_row_ids(
        name: impl Into<String>,
        columns: Vec<Column>,
        row_ids: Vec<usize>,
    ) -> Result<Self, SchemaError> {
        if row_ids.is_empty() {
            return Err(SchemaError::NoRows);
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if c.len() != row_ids.len() {
                return Err(SchemaError::LengthMismatch {
                    name: c.name.clone(),
                    len: c.len(),
                    expected: row_ids.len(),
                });
            }
            if !seen.insert(c.name.as_str()) {
                return Err(SchemaError::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            columns,
            row_ids,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn row_count(&self) -> usize {
        self.row_ids.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Keeps the given row positions (ascending) and their original ids.
    pub(crate) fn select_rows(&self, positions: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    attr_type: c.attr_type,
                    data: c.data.select(positions),
                    exclusion: c.exclusion,
                })
                .collect(),
            row_ids: positions.iter().map(|&p| self.row_ids[p]).collect(),
        }
    }

    /// Name, type and completeness of every column.
    pub fn schema(&self) -> Vec<ColumnSchema> {
        self.columns
            .iter()
            .map(|c| ColumnSchema {
                name: c.name.clone(),
                attr_type: c.attr_type,
                null_fraction: c.null_fraction(),
                distinct: match &c.data {
                    ColumnData::Categorical { levels, .. } => Some(levels.len()),
                    _ => None,
                },
                exclusion: c.exclusion,
            })
            .collect()
    }

    /// Position of an original row id, if the row is present.
    pub fn position_of(&self, row_id: usize) -> Option<usize> {
        self.row_ids.binary_search(&row_id).ok()
    }
}
