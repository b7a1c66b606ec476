//! Insight scoring and ranking.
//!
//! Method outputs are min-max normalized per method and averaged into φ,
//! penalized by arity, min-max normalized again within each
//! (insight type, signature) group for the within-type ranking, and averaged
//! into Ψ for the ranking of insight types.

mod order;
mod points;
mod score;

use serde::{Deserialize, Serialize};

use crate::dataset::CombinationSpec;
use crate::methods::MethodOutput;

pub use order::{group_minmax, kendall_tau, rank_insight_types, rank_insights, rank_order, score_insight_type};
pub use points::{average_point_ranks, competition_ranks, PointRankAggregate, RowRank};
pub use score::{
    aggregate_phi, complexity_penalty, normalize_method_output, phi_from_means, summarize, MethodSummary,
    ScoreAccumulator,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RankingError {
    #[error("method `{method}` returned scalar {value} outside [0, 1]")]
    ScalarOutOfRange { method: String, value: f64 },
    #[error("non-finite score")]
    NonFinite,
    #[error("method `{0}` output is not normalized to [0, 1]")]
    NotNormalized(String),
    #[error("rankings have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 ranked items, got {0}")]
    TooShort(usize),
    #[error("rankings must not contain ties")]
    Ties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightCandidate {
    pub insight_type_id: String,
    pub combination: CombinationSpec,
    pub methods: Vec<MethodSummary>,
    pub phi: f64,
    pub penalized_phi: f64,
    /// Set by [`group_minmax`]; 0 until then.
    pub group_normalized_score: f64,
    pub point_ranks: Option<PointRankAggregate>,
}

impl InsightCandidate {
    /// Scores raw method outputs in one pass per method. `keep_ranks`
    /// truncates the point-rank aggregate to its best rows.
    pub fn from_outputs(
        insight_type_id: &str,
        combination: CombinationSpec,
        outputs: &[MethodOutput],
        row_ids: &[usize],
        lambda: f64,
        keep_ranks: Option<usize>,
    ) -> Result<Self, RankingError> {
        let methods = outputs.iter().map(summarize).collect::<Result<Vec<_>, _>>()?;
        let means: Vec<f64> = methods.iter().map(|m| m.normalized_mean).collect();
        let phi = phi_from_means(&means);
        let mut point_ranks = average_point_ranks(outputs, row_ids);
        if let (Some(agg), Some(k)) = (point_ranks.as_mut(), keep_ranks) {
            agg.truncate(k);
        }
        Ok(Self {
            insight_type_id: insight_type_id.to_string(),
            penalized_phi: complexity_penalty(phi, combination.arity(), lambda),
            combination,
            methods,
            phi,
            group_normalized_score: 0.0,
            point_ranks,
        })
    }

    /// A candidate with a given φ and no method detail.
    pub fn from_phi(insight_type_id: &str, combination: CombinationSpec, phi: f64, lambda: f64) -> Self {
        Self {
            insight_type_id: insight_type_id.to_string(),
            penalized_phi: complexity_penalty(phi, combination.arity(), lambda),
            combination,
            methods: Vec::new(),
            phi,
            group_normalized_score: 0.0,
            point_ranks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightTypeRow {
    pub insight_type_id: String,
    pub display_name: String,
    /// Ψ over the whole pool.
    pub psi: f64,
    /// `|Q_I|`.
    pub candidate_pool_size: usize,
    /// Best first, truncated to `top_k`.
    pub ranked_candidates: Vec<InsightCandidate>,
}

/// Scores, normalizes and ranks one insight type's pool. Returns `None` for
/// an empty pool.
pub fn build_insight_type_row(
    insight_type_id: &str,
    display_name: &str,
    mut pool: Vec<InsightCandidate>,
    top_k: usize,
) -> Option<InsightTypeRow> {
    let psi = score_insight_type(&pool)?;
    let size = pool.len();
    group_minmax(&mut pool);
    let mut ranked = rank_insights(pool);
    ranked.truncate(top_k);
    Some(InsightTypeRow {
        insight_type_id: insight_type_id.to_string(),
        display_name: display_name.to_string(),
        psi,
        candidate_pool_size: size,
        ranked_candidates: ranked,
    })
}

#[cfg(test)]
mod tests;
