//! The serialized recommendations document.

use serde::{Deserialize, Serialize};

use super::Analysis;
use crate::dataset::AttributeType;
use crate::methods::{MethodDetail, OutputShape};
use crate::ranking::{InsightCandidate, InsightTypeRow, PointRankAggregate};
use crate::stats::derive_seed;
use crate::vizrec::{annotate, attach_data, infer_charts, AnnotationSpec, ChartSpec, ChartType};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendations {
    pub dataset: String,
    pub config_fingerprint: String,
    pub top_r: usize,
    pub top_k: usize,
    /// Attributes every returned insight involves.
    pub filter: Vec<String>,
    /// True when no insight type has a candidate.
    pub empty: bool,
    /// Ordered by `psi`, highest first.
    pub rows: Vec<RowView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowView {
    pub insight_type: String,
    pub display_name: String,
    pub psi: f64,
    pub candidate_pool_size: usize,
    pub insights: Vec<InsightView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationView {
    pub signature: Vec<AttributeType>,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodView {
    pub method_id: String,
    pub output_shape: OutputShape,
    pub score_count: usize,
    pub normalized_mean: f64,
    pub detail: Option<MethodDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartChoice {
    pub chart_type: ChartType,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightView {
    /// 1-based position within the row.
    pub rank: usize,
    pub combination: CombinationView,
    pub phi: f64,
    pub penalized_phi: f64,
    /// Group-normalized score used for the within-type order.
    pub score: f64,
    pub methods: Vec<MethodView>,
    /// Rank-1 chart with annotations and inline data.
    pub chart: ChartSpec,
    /// All applicable chart types, best first.
    pub chart_ranking: Vec<ChartChoice>,
    pub annotations: Vec<AnnotationSpec>,
    pub point_ranks: Option<PointRankAggregate>,
}

pub(super) fn insight_view(analysis: &Analysis, c: &InsightCandidate, rank: usize) -> InsightView {
    let config = &analysis.config;
    let charts = infer_charts(&c.combination).expect("catalog signatures have chart rules");
    let chart_ranking = charts
        .iter()
        .map(|s| ChartChoice {
            chart_type: s.chart_type,
            weight: s.weight,
        })
        .collect();
    let label = c.combination.label();
    let seed = derive_seed(config.seed, &["chart", &c.insight_type_id, &label]);
    let best = charts.into_iter().next().expect("non-empty chart list");
    let chart = attach_data(
        annotate(c, best, config.max_marks),
        &analysis.dataset,
        &c.combination,
        seed,
    );
    InsightView {
        rank,
        combination: CombinationView {
            signature: c.combination.signature.clone(),
            columns: c.combination.column_names.clone(),
        },
        phi: c.phi,
        penalized_phi: c.penalized_phi,
        score: c.group_normalized_score,
        methods: c
            .methods
            .iter()
            .map(|m| MethodView {
                method_id: m.method_id.clone(),
                output_shape: m.output_shape,
                score_count: m.score_count,
                normalized_mean: m.normalized_mean,
                detail: m.detail.clone(),
            })
            .collect(),
        annotations: chart.annotations.clone(),
        chart,
        chart_ranking,
        point_ranks: c.point_ranks.clone(),
    }
}

pub(super) fn render(
    analysis: &Analysis,
    filter: &[String],
    top_r: usize,
    top_k: usize,
    rows: Vec<InsightTypeRow>,
) -> Recommendations {
    let rows: Vec<RowView> = rows
        .into_iter()
        .map(|row| RowView {
            insights: row
                .ranked_candidates
                .iter()
                .enumerate()
                .map(|(i, c)| insight_view(analysis, c, i + 1))
                .collect(),
            insight_type: row.insight_type_id,
            display_name: row.display_name,
            psi: row.psi,
            candidate_pool_size: row.candidate_pool_size,
        })
        .collect();
    Recommendations {
        dataset: analysis.dataset.name.clone(),
        config_fingerprint: analysis.fingerprint.clone(),
        top_r,
        top_k,
        filter: filter.to_vec(),
        empty: rows.is_empty(),
        rows,
    }
}

impl Recommendations {
    /// Pretty JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recommendations serialize")
    }

    /// Every Ψ is at least the next row's.
    pub fn is_psi_ordered(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].psi >= w[1].psi)
    }
}
