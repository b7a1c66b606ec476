//! Group normalization, within-type ranking, insight-type ranking and
//! Kendall's τ.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{InsightCandidate, InsightTypeRow, RankingError};
use crate::dataset::{signature_label, AttributeType};
use crate::methods::catalog;

/// Min-max of `penalized_phi` within each (insight type, signature) group.
/// A singleton or constant group scores 1 for every member, so each group
/// keeps a top representative.
pub fn group_minmax(cands: &mut [InsightCandidate]) {
    let mut groups: BTreeMap<(&str, Vec<AttributeType>), (f64, f64)> = BTreeMap::new();
    for c in cands.iter() {
        let e = groups
            .entry((c.insight_type_id.as_str(), c.combination.signature.clone()))
            .or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(c.penalized_phi);
        e.1 = e.1.max(c.penalized_phi);
    }
    let bounds: BTreeMap<(String, Vec<AttributeType>), (f64, f64)> =
        groups.into_iter().map(|((t, s), b)| ((t.to_string(), s), b)).collect();
    for c in cands.iter_mut() {
        let (lo, hi) = bounds[&(c.insight_type_id.clone(), c.combination.signature.clone())];
        c.group_normalized_score = if hi > lo {
            ((c.penalized_phi - lo) / (hi - lo)).clamp(0.0, 1.0)
        } else {
            1.0
        };
    }
}

/// Position of a signature in the insight type's catalog entry; unknown
/// signatures sort after known ones.
fn signature_rank(type_id: &str, signature: &[AttributeType]) -> (usize, String) {
    let idx = catalog::insight_type(type_id)
        .and_then(|t| t.signature_index(signature))
        .unwrap_or(usize::MAX);
    (idx, signature_label(signature))
}

fn by_score_desc(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

/// Indices of `cands` in within-type rank order: `group_normalized_score`
/// descending; within a score tie, signatures take turns in catalog order,
/// and each signature's members go in lexicographic column-name order.
pub fn rank_order(cands: &[InsightCandidate]) -> Vec<usize> {
    let sig: Vec<(usize, String)> = cands
        .iter()
        .map(|c| signature_rank(&c.insight_type_id, &c.combination.signature))
        .collect();
    let mut idx: Vec<usize> = (0..cands.len()).collect();
    idx.sort_by(|&a, &b| {
        by_score_desc(cands[a].group_normalized_score, cands[b].group_normalized_score)
            .then_with(|| sig[a].cmp(&sig[b]))
            .then_with(|| {
                cands[a]
                    .combination
                    .column_names
                    .cmp(&cands[b].combination.column_names)
            })
    });
    // turn within each (score, signature) run
    let mut turn = vec![0usize; cands.len()];
    for w in 1..idx.len() {
        let (p, c) = (idx[w - 1], idx[w]);
        if cands[p].group_normalized_score == cands[c].group_normalized_score && sig[p] == sig[c] {
            turn[c] = turn[p] + 1;
        }
    }
    idx.sort_by(|&a, &b| {
        by_score_desc(cands[a].group_normalized_score, cands[b].group_normalized_score)
            .then(turn[a].cmp(&turn[b]))
            .then_with(|| sig[a].cmp(&sig[b]))
    });
    idx
}

/// Candidates of one insight type in rank order.
pub fn rank_insights(cands: Vec<InsightCandidate>) -> Vec<InsightCandidate> {
    let order = rank_order(&cands);
    let mut slots: Vec<Option<InsightCandidate>> = cands.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|i| slots[i].take().expect("each index once"))
        .collect()
}

/// `Ψ`: mean `penalized_phi` over the pool, or `None` for an empty pool.
pub fn score_insight_type(pool: &[InsightCandidate]) -> Option<f64> {
    if pool.is_empty() {
        return None;
    }
    Some(pool.iter().map(|c| c.penalized_phi).sum::<f64>() / pool.len() as f64)
}

fn catalog_index(type_id: &str) -> usize {
    catalog::catalog()
        .iter()
        .position(|t| t.id == type_id)
        .unwrap_or(usize::MAX)
}

/// Rows by `psi` descending, ties in catalog order.
pub fn rank_insight_types(mut rows: Vec<InsightTypeRow>) -> Vec<InsightTypeRow> {
    rows.sort_by(|a, b| {
        by_score_desc(a.psi, b.psi)
            .then_with(|| catalog_index(&a.insight_type_id).cmp(&catalog_index(&b.insight_type_id)))
            .then_with(|| a.insight_type_id.cmp(&b.insight_type_id))
    });
    rows
}

/// Kendall's τ_a between two tie-free rankings of the same items:
/// `(concordant − discordant) / (n(n−1)/2)`.
pub fn kendall_tau(rank_a: &[usize], rank_b: &[usize]) -> Result<f64, RankingError> {
    if rank_a.len() != rank_b.len() {
        return Err(RankingError::LengthMismatch {
            left: rank_a.len(),
            right: rank_b.len(),
        });
    }
    let n = rank_a.len();
    if n < 2 {
        return Err(RankingError::TooShort(n));
    }
    let mut balance: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let a = rank_a[i].cmp(&rank_a[j]);
            let b = rank_b[i].cmp(&rank_b[j]);
            if a == Ordering::Equal || b == Ordering::Equal {
                return Err(RankingError::Ties);
            }
            balance += if a == b { 1 } else { -1 };
        }
    }
    Ok(balance as f64 / (n * (n - 1) / 2) as f64)
}
