//! Per-point rank aggregation across the point-level methods of an insight.

use serde::{Deserialize, Serialize};

use crate::methods::{MethodOutput, Scores};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRank {
    /// Original dataset row id.
    pub row_id: usize,
    /// `R_j`, in `[1, n]`.
    pub avg_rank: f64,
    /// Mean normalized score over the contributing methods (absent rows count 0).
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRankAggregate {
    /// Ordered by `avg_rank` ascending, then row id. May be truncated with
    /// [`PointRankAggregate::truncate`].
    pub rows: Vec<RowRank>,
    pub contributing_method_ids: Vec<String>,
    /// Rows in the combination.
    pub row_count: usize,
}

impl PointRankAggregate {
    pub fn truncate(&mut self, keep: usize) {
        self.rows.truncate(keep);
    }

    /// The `m` rows with the best average rank.
    pub fn top(&self, m: usize) -> &[RowRank] {
        &self.rows[..m.min(self.rows.len())]
    }
}

/// Competition ranks ("1224"): one plus the number of strictly larger scores.
pub fn competition_ranks(scores: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    scores.iter().map(|s| 1 + sorted.partition_point(|x| x > s)).collect()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    v.iter()
        .map(|s| if hi > lo { (s - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

/// `R_j`: the mean over point-level methods of each row's rank, scores
/// descending. A row missing from a subset output of size `n_i` gets rank
/// `n_i + 1` for that method. Scalar outputs are ignored; with no point-level
/// output the aggregate is `None`.
///
/// `row_ids[pos]` maps combination row positions to dataset row ids.
pub fn average_point_ranks(outputs: &[MethodOutput], row_ids: &[usize]) -> Option<PointRankAggregate> {
    let n = row_ids.len();
    let mut rank_sum = vec![0.0; n];
    let mut score_sum = vec![0.0; n];
    let mut methods = Vec::new();
    for out in outputs {
        match &out.scores {
            Scores::Scalar(_) => continue,
            Scores::PerPoint(v) => {
                for ((r, s), (rank, norm)) in rank_sum
                    .iter_mut()
                    .zip(score_sum.iter_mut())
                    .zip(competition_ranks(v).into_iter().zip(normalized(v)))
                {
                    *r += rank as f64;
                    *s += norm;
                }
            }
            Scores::Subset(v) => {
                let raw: Vec<f64> = v.iter().map(|(_, s)| *s).collect();
                let mut rank = vec![(v.len() + 1) as f64; n];
                for ((&(pos, _), k), norm) in v.iter().zip(competition_ranks(&raw)).zip(normalized(&raw)) {
                    rank[pos] = k as f64;
                    score_sum[pos] += norm;
                }
                for (r, k) in rank_sum.iter_mut().zip(rank) {
                    *r += k;
                }
            }
        }
        methods.push(out.method_id.clone());
    }
    if methods.is_empty() {
        return None;
    }
    let m = methods.len() as f64;
    let mut rows: Vec<RowRank> = (0..n)
        .map(|pos| RowRank {
            row_id: row_ids[pos],
            avg_rank: rank_sum[pos] / m,
            score: score_sum[pos] / m,
        })
        .collect();
    rows.sort_by(|a, b| a.avg_rank.total_cmp(&b.avg_rank).then(a.row_id.cmp(&b.row_id)));
    Some(PointRankAggregate {
        rows,
        contributing_method_ids: methods,
        row_count: n,
    })
}
