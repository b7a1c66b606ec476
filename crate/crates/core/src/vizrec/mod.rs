//! Chart recommendation: a rule-based weight table picks chart types for a
//! candidate's signature, annotations mark what the detectors found, and the
//! rows needed to draw the chart are attached inline.

mod sentence;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::{signature_label, AttributeType, ColumnData, CombinationSpec, Dataset};
use crate::methods::MethodDetail;
use crate::ranking::InsightCandidate;

pub use sentence::{insight_sentence, title};

/// Upper bound on rows embedded in a chart.
pub const MAX_INLINE_ROWS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Scatter,
    Line,
    Bar,
    GroupedBar,
    Histogram,
    Box,
    Heatmap,
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X,
    Y,
    Color,
    Size,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    PointHighlight,
    TrendLine,
    Band,
    CellHighlight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnnotationTarget {
    Rows {
        row_ids: Vec<usize>,
    },
    /// `y = a·x + b`, with time in epoch seconds.
    Line {
        a: f64,
        b: f64,
    },
    Range {
        channel: Channel,
        lower: f64,
        upper: f64,
    },
    Cells {
        cells: Vec<[String; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSpec {
    pub kind: AnnotationKind,
    pub target: AnnotationTarget,
    pub label: String,
}

/// Rows embedded for client-side rendering, in row-id order. Temporal values
/// are RFC 3339 strings, categorical values their labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InlineData {
    pub columns: Vec<String>,
    pub row_ids: Vec<usize>,
    pub rows: Vec<Vec<Value>>,
    /// Complete rows available before downsampling.
    pub total_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_type: ChartType,
    pub encodings: BTreeMap<Channel, String>,
    /// How marks aggregate rows (`count`, `mean`, `binned_count`), if at all.
    pub aggregate: Option<String>,
    pub weight: f64,
    pub inline_data: InlineData,
    pub annotations: Vec<AnnotationSpec>,
    pub title: String,
    pub insight_sentence: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VizError {
    #[error("no chart rule for signature {0}")]
    NoChartRule(String),
}

type Rule = (ChartType, &'static [(Channel, usize)], Option<&'static str>, f64);

fn rules(signature: &[AttributeType]) -> Option<&'static [Rule]> {
    use AttributeType::{C, N, T};
    use Channel::*;
    use ChartType::*;
    let table: &'static [Rule] = match signature {
        [N] => &[(Histogram, &[(X, 0)], Some("count"), 1.0), (Box, &[(X, 0)], None, 0.8)],
        [N, N] => &[
            (Scatter, &[(X, 0), (Y, 1)], None, 1.0),
            (Heatmap, &[(X, 0), (Y, 1)], Some("binned_count"), 0.6),
        ],
        [T, N] => &[
            (Line, &[(X, 0), (Y, 1)], None, 1.0),
            (Scatter, &[(X, 0), (Y, 1)], None, 0.5),
        ],
        [T, N, C] => &[(Line, &[(X, 0), (Y, 1), (Color, 2)], None, 1.0)],
        [C, C] => &[
            (Heatmap, &[(X, 0), (Y, 1)], Some("count"), 1.0),
            (GroupedBar, &[(X, 0), (Color, 1)], Some("count"), 0.7),
        ],
        [C, N] => &[
            (Box, &[(X, 0), (Y, 1)], None, 1.0),
            (Bar, &[(X, 0), (Y, 1)], Some("mean"), 0.8),
            (Strip, &[(X, 0), (Y, 1)], None, 0.5),
        ],
        [N, N, N] => &[(Scatter, &[(X, 0), (Y, 1), (Size, 2)], None, 1.0)],
        [T, N, N] => &[
            (Line, &[(X, 0), (Y, 2), (Color, 1)], None, 1.0),
            (Scatter, &[(X, 1), (Y, 2), (Color, 0)], None, 0.5),
        ],
        _ => return None,
    };
    Some(table)
}

/// Candidate charts for a combination, best first. Weights are distinct per
/// signature so the rank-1 chart is unambiguous.
pub fn infer_charts(combination: &CombinationSpec) -> Result<Vec<ChartSpec>, VizError> {
    let table =
        rules(&combination.signature).ok_or_else(|| VizError::NoChartRule(signature_label(&combination.signature)))?;
    let mut charts: Vec<ChartSpec> = table
        .iter()
        .map(|(chart_type, enc, aggregate, weight)| ChartSpec {
            chart_type: *chart_type,
            encodings: enc
                .iter()
                .map(|(ch, slot)| (*ch, combination.column_names[*slot].clone()))
                .collect(),
            aggregate: aggregate.map(str::to_string),
            weight: *weight,
            inline_data: InlineData::default(),
            annotations: Vec::new(),
            title: String::new(),
            insight_sentence: String::new(),
        })
        .collect();
    // stable: equal weights keep table order
    charts.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(charts)
}

const POINT_TYPES: &[&str] = &[
    "single_variable_outliers",
    "two_variable_outliers",
    "multivariate_outliers",
    "time_series_outliers",
    "peaks",
];

fn detail<'a>(cand: &'a InsightCandidate, method: &str) -> Option<&'a MethodDetail> {
    cand.methods
        .iter()
        .find(|m| m.method_id == method)
        .and_then(|m| m.detail.as_ref())
}

/// Adds annotations, title and insight sentence to a chart of `cand`.
///
/// Outlier and peak insights highlight up to `max_marks` rows with the best
/// average rank among rows some method flagged; trends get their fitted
/// line; single-variable outliers get the Tukey fences as a band; categorical
/// outliers highlight their flagged cells.
pub fn annotate(cand: &InsightCandidate, mut spec: ChartSpec, max_marks: usize) -> ChartSpec {
    let cat_outliers = cand.combination.signature.iter().all(|t| *t == AttributeType::C);
    if POINT_TYPES.contains(&cand.insight_type_id.as_str()) && !cat_outliers {
        if let Some(agg) = &cand.point_ranks {
            let flagged = agg.rows.iter().filter(|r| r.score > 0.0).take(max_marks);
            for (i, r) in flagged.enumerate() {
                spec.annotations.push(AnnotationSpec {
                    kind: AnnotationKind::PointHighlight,
                    target: AnnotationTarget::Rows {
                        row_ids: vec![r.row_id],
                    },
                    label: format!(
                        "#{} row {} (avg rank {:.1}, score {:.2})",
                        i + 1,
                        r.row_id,
                        r.avg_rank,
                        r.score
                    ),
                });
            }
        }
    }
    if let Some(MethodDetail::Fences { lower, upper }) = detail(cand, "iqr") {
        spec.annotations.push(AnnotationSpec {
            kind: AnnotationKind::Band,
            target: AnnotationTarget::Range {
                channel: Channel::X,
                lower: *lower,
                upper: *upper,
            },
            label: "Tukey fences".to_string(),
        });
    }
    if cand.insight_type_id == "trend" {
        if let Some(MethodDetail::Trend(fit)) = detail(cand, "trend_ols") {
            spec.annotations.push(AnnotationSpec {
                kind: AnnotationKind::TrendLine,
                target: AnnotationTarget::Line {
                    a: fit.slope,
                    b: fit.intercept,
                },
                label: format!("OLS fit, R² = {:.2}", fit.r_squared),
            });
        }
    }
    if let Some(MethodDetail::Cells { cells }) = detail(cand, "chisq_residual") {
        if !cells.is_empty() {
            spec.annotations.push(AnnotationSpec {
                kind: AnnotationKind::CellHighlight,
                target: AnnotationTarget::Cells {
                    cells: cells.iter().map(|c| [c.x.clone(), c.y.clone()]).collect(),
                },
                label: format!("{} cell(s) with |adjusted residual| > 2", cells.len()),
            });
        }
    }
    spec.title = title(cand);
    spec.insight_sentence = insight_sentence(cand);
    spec
}

fn cell_value(data: &ColumnData, pos: usize) -> Value {
    match data {
        ColumnData::Numerical(v) => v[pos].map_or(Value::Null, |x| serde_json::json!(x)),
        ColumnData::Categorical { codes, levels } => {
            codes[pos].map_or(Value::Null, |c| Value::String(levels[c as usize].clone()))
        }
        ColumnData::Temporal(v) => v[pos].map_or(Value::Null, |t| {
            chrono::DateTime::from_timestamp(t, 0)
                .map(|d| Value::String(d.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)))
                .unwrap_or_else(|| serde_json::json!(t))
        }),
    }
}

/// Embeds the rows of `combination` that have no missing member cell. Above
/// [`MAX_INLINE_ROWS`] rows, highlighted rows are kept and the rest is a
/// seeded uniform sample.
pub fn attach_data(mut spec: ChartSpec, ds: &Dataset, combination: &CombinationSpec, seed: u64) -> ChartSpec {
    let cols: Vec<&crate::dataset::Column> = combination.column_names.iter().filter_map(|n| ds.column(n)).collect();
    let complete: Vec<usize> = (0..ds.row_count())
        .filter(|&p| cols.iter().all(|c| !c.data.is_missing(p)))
        .collect();
    let total = complete.len();
    let positions = if total <= MAX_INLINE_ROWS {
        complete
    } else {
        let marked: std::collections::BTreeSet<usize> = spec
            .annotations
            .iter()
            .filter_map(|a| match &a.target {
                AnnotationTarget::Rows { row_ids } => Some(row_ids.iter().filter_map(|&id| ds.position_of(id))),
                _ => None,
            })
            .flatten()
            .collect();
        let rest: Vec<usize> = complete.iter().copied().filter(|p| !marked.contains(p)).collect();
        let room = MAX_INLINE_ROWS.saturating_sub(marked.len()).min(rest.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep: Vec<usize> = rand::seq::index::sample(&mut rng, rest.len(), room)
            .into_iter()
            .map(|i| rest[i])
            .chain(marked)
            .collect();
        keep.sort_unstable();
        keep
    };
    spec.inline_data = InlineData {
        columns: combination.column_names.clone(),
        row_ids: positions.iter().map(|&p| ds.row_ids()[p]).collect(),
        rows: positions
            .iter()
            .map(|&p| cols.iter().map(|c| cell_value(&c.data, p)).collect())
            .collect(),
        total_rows: total,
    };
    spec
}

#[cfg(test)]
mod tests;
