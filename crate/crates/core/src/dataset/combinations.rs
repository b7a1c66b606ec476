use serde::{Deserialize, Serialize};

use super::{AttributeType, ColumnData, Dataset, DatasetError};

/// A concrete choice of columns for an attribute-type signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CombinationSpec {
    pub signature: Vec<AttributeType>,
    pub column_names: Vec<String>,
}

impl CombinationSpec {
    pub fn arity(&self) -> usize {
        self.column_names.len()
    }

    pub fn contains(&self, column: &str) -> bool {
        self.column_names.iter().any(|c| c == column)
    }

    pub fn label(&self) -> String {
        self.column_names.join(" × ")
    }
}

/// One column of a combination matrix; no missing cells.
#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Numerical(Vec<f64>),
    Categorical {
        codes: Vec<u32>,
        levels: Vec<String>,
    },
    /// Epoch seconds.
    Temporal(Vec<f64>),
}

impl Series {
    pub fn len(&self) -> usize {
        match self {
            Series::Numerical(v) | Series::Temporal(v) => v.len(),
            Series::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numbers(&self) -> Option<&[f64]> {
        match self {
            Series::Numerical(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_times(&self) -> Option<&[f64]> {
        match self {
            Series::Temporal(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_codes(&self) -> Option<(&[u32], &[String])> {
        match self {
            Series::Categorical { codes, levels } => Some((codes, levels)),
            _ => None,
        }
    }
}

/// Rows of a combination where every member column is present.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    pub spec: CombinationSpec,
    /// One series per signature slot, all of equal length.
    pub series: Vec<Series>,
    /// Original row ids of the kept rows, strictly increasing.
    pub row_ids: Vec<usize>,
}

impl CombinationMatrix {
    pub fn row_count(&self) -> usize {
        self.row_ids.len()
    }

    pub fn numbers(&self, slot: usize) -> &[f64] {
        self.series[slot].as_numbers().expect("signature slot is numerical")
    }

    pub fn times(&self, slot: usize) -> &[f64] {
        self.series[slot].as_times().expect("signature slot is temporal")
    }

    pub fn codes(&self, slot: usize) -> (&[u32], &[String]) {
        self.series[slot].as_codes().expect("signature slot is categorical")
    }

    /// Row-major view of all numerical slots.
    pub fn numeric_rows(&self) -> Vec<Vec<f64>> {
        let cols: Vec<&[f64]> = self.series.iter().filter_map(Series::as_numbers).collect();
        (0..self.row_count())
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect()
    }

    /// Builds the matrix for `columns` (dataset positions) without checks on arity.
    pub fn from_dataset(ds: &Dataset, signature: &[AttributeType], columns: &[usize]) -> Self {
        let cols: Vec<_> = columns.iter().map(|&i| &ds.columns()[i]).collect();
        let kept: Vec<usize> = (0..ds.row_count())
            .filter(|&r| cols.iter().all(|c| !c.data.is_missing(r)))
            .collect();
        let series = cols
            .iter()
            .map(|c| match &c.data {
                ColumnData::Numerical(v) => Series::Numerical(kept.iter().map(|&r| v[r].unwrap()).collect()),
                ColumnData::Temporal(v) => Series::Temporal(kept.iter().map(|&r| v[r].unwrap() as f64).collect()),
                ColumnData::Categorical { codes, levels } => Series::Categorical {
                    codes: kept.iter().map(|&r| codes[r].unwrap()).collect(),
                    levels: levels.clone(),
                },
            })
            .collect();
        CombinationMatrix {
            spec: CombinationSpec {
                signature: signature.to_vec(),
                column_names: cols.iter().map(|c| c.name.clone()).collect(),
            },
            series,
            row_ids: kept.iter().map(|&r| ds.row_ids()[r]).collect(),
        }
    }
}

/// Column-index tuples for a signature in lexicographic order.
///
/// Slots sharing an attribute type take strictly increasing column indices,
/// so symmetric signatures never yield the same column set twice.
fn index_tuples(ds: &Dataset, signature: &[AttributeType], cap: usize) -> Vec<Vec<usize>> {
    fn recurse(
        ds: &Dataset,
        signature: &[AttributeType],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let slot = current.len();
        if slot == signature.len() {
            out.push(current.clone());
            return;
        }
        let ty = signature[slot];
        let floor = signature[..slot]
            .iter()
            .zip(current.iter())
            .filter(|(t, _)| **t == ty)
            .map(|(_, &i)| i + 1)
            .max()
            .unwrap_or(0);
        for (i, col) in ds.columns().iter().enumerate().skip(floor) {
            if col.attr_type == ty && col.is_usable() {
                current.push(i);
                recurse(ds, signature, current, out, cap);
                current.pop();
                if out.len() >= cap {
                    return;
                }
            }
        }
    }
    let mut out = Vec::new();
    recurse(ds, signature, &mut Vec::new(), &mut out, cap);
    out
}

/// All column combinations matching `signature`, truncated to the first `cap`
/// in lexicographic column-index order. Each combination keeps only rows where
/// every member cell is present; combinations left with fewer than `min_rows`
/// rows are dropped.
pub fn enumerate_combinations(
    ds: &Dataset,
    signature: &[AttributeType],
    cap: usize,
    min_rows: usize,
) -> Result<Vec<CombinationMatrix>, DatasetError> {
    if signature.is_empty() || signature.len() > 4 {
        return Err(DatasetError::SignatureLength(signature.len()));
    }
    Ok(index_tuples(ds, signature, cap)
        .into_iter()
        .map(|cols| CombinationMatrix::from_dataset(ds, signature, &cols))
        .filter(|m| m.row_count() >= min_rows)
        .collect())
}
