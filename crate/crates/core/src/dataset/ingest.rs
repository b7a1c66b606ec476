use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{AttributeType, Column, ColumnData, Dataset, DatasetError, Exclusion};

/// Share of non-empty cells that must parse for a typed interpretation.
const PARSE_SHARE: f64 = 0.95;
/// The `row_count / 2` cardinality rule never drops the cap below this.
const MIN_CARDINALITY_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestConfig {
    pub cardinality_cap: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self { cardinality_cap: 50 }
    }
}

impl From<&crate::Config> for IngestConfig {
    fn from(cfg: &crate::Config) -> Self {
        Self {
            cardinality_cap: cfg.cardinality_cap,
        }
    }
}

/// Outcome of type inference for one column of raw cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferredType {
    Temporal,
    Numerical,
    Categorical,
    /// Categorical with too many levels; excluded from combinations.
    CategoricalOverflow,
}

impl InferredType {
    pub fn attribute_type(self) -> AttributeType {
        match self {
            InferredType::Temporal => AttributeType::T,
            InferredType::Numerical => AttributeType::N,
            InferredType::Categorical | InferredType::CategoricalOverflow => AttributeType::C,
        }
    }
}

/// Parses the accepted ISO-8601 forms into epoch seconds (UTC).
pub fn parse_timestamp(raw: &str) -> Option<i64> {
    let s = raw.trim();
    let b = s.as_bytes();
    // YYYY-MM-DD prefix is mandatory; chrono alone is more lenient.
    if b.len() < 10 || !b[..4].iter().all(u8::is_ascii_digit) || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    if b.len() == 10 {
        return NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .ok()
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .map(|dt| dt.and_utc().timestamp());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    const NAIVE: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    NAIVE
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
        .map(|dt| dt.and_utc().timestamp())
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_blank(raw: &str) -> bool {
    raw.trim().is_empty()
}

fn effective_cap(cfg: &IngestConfig, row_count: usize) -> usize {
    cfg.cardinality_cap.min((row_count / 2).max(MIN_CARDINALITY_CAP))
}

/// Infers the attribute type of a column from its raw text cells.
///
/// Temporal wins if at least 95% of the non-empty cells are ISO-8601
/// timestamps, then numerical under the same share, otherwise categorical.
pub fn infer_attribute_type<S: AsRef<str>>(values: &[S], cfg: &IngestConfig) -> Result<InferredType, DatasetError> {
    let present: Vec<&str> = values.iter().map(AsRef::as_ref).filter(|v| !is_blank(v)).collect();
    if present.is_empty() {
        return Err(DatasetError::UntypedColumn);
    }
    let needed = PARSE_SHARE * present.len() as f64;
    let temporal = present.iter().filter(|v| parse_timestamp(v).is_some()).count();
    if temporal as f64 >= needed {
        return Ok(InferredType::Temporal);
    }
    let numeric = present.iter().filter(|v| parse_number(v).is_some()).count();
    if numeric as f64 >= needed {
        return Ok(InferredType::Numerical);
    }
    let mut distinct: Vec<&str> = present.iter().map(|v| v.trim()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() <= effective_cap(cfg, values.len()) {
        Ok(InferredType::Categorical)
    } else {
        Ok(InferredType::CategoricalOverflow)
    }
}

pub fn load_csv(path: impl AsRef<Path>, cfg: &IngestConfig) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    load_csv_reader(file, &name, cfg)
}

/// Reads RFC-4180 CSV with a header row. Empty cells are missing values.
pub fn load_csv_reader<R: Read>(reader: R, name: &str, cfg: &IngestConfig) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(DatasetError::EmptyFile);
    }
    let mut seen = std::collections::HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(DatasetError::DuplicateHeader(h.clone()));
        }
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record?;
        for (col, cell) in raw.iter_mut().zip(record.iter()) {
            col.push(cell.to_string());
        }
    }
    let rows = raw[0].len();
    if rows == 0 {
        return Err(DatasetError::ZeroDataRows);
    }

    let columns = headers
        .into_iter()
        .zip(raw)
        .map(|(name, cells)| build_column(name, &cells, cfg))
        .collect();
    Ok(Dataset::new(name, columns).expect("columns share the record count"))
}

fn build_column(name: String, cells: &[String], cfg: &IngestConfig) -> Column {
    let inferred = match infer_attribute_type(cells, cfg) {
        Ok(t) => t,
        Err(_) => {
            return Column {
                name,
                attr_type: AttributeType::C,
                data: ColumnData::Categorical {
                    codes: vec![None; cells.len()],
                    levels: Vec::new(),
                },
                exclusion: Some(Exclusion::Empty),
            }
        }
    };
    match inferred {
        InferredType::Temporal => Column::temporal(name, cells.iter().map(|c| parse_timestamp(c)).collect()),
        InferredType::Numerical => Column::numerical(name, cells.iter().map(|c| parse_number(c)).collect()),
        InferredType::Categorical | InferredType::CategoricalOverflow => {
            let labels: Vec<Option<&str>> = cells.iter().map(|c| (!is_blank(c)).then(|| c.trim())).collect();
            let mut col = Column::categorical(name, &labels);
            if inferred == InferredType::CategoricalOverflow {
                col.exclusion = Some(Exclusion::CardinalityOverflow);
            }
            col
        }
    }
}
