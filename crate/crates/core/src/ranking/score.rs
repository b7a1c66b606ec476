//! Per-method normalization and the aggregate insight score φ.

use serde::{Deserialize, Serialize};

use super::RankingError;
use crate::methods::{MethodDetail, MethodOutput, OutputShape, Scores};

/// Min-max normalization of one method's own scores. Scalars pass through
/// unchanged and must already lie in `[0, 1]`.
pub fn normalize_method_output(out: &MethodOutput) -> Result<MethodOutput, RankingError> {
    let scores = match &out.scores {
        Scores::Scalar(s) => Scores::Scalar(check_scalar(&out.method_id, *s)?),
        Scores::PerPoint(v) => Scores::PerPoint(minmax(v)?),
        Scores::Subset(v) => {
            let raw: Vec<f64> = v.iter().map(|(_, s)| *s).collect();
            Scores::Subset(v.iter().map(|(r, _)| *r).zip(minmax(&raw)?).collect())
        }
    };
    Ok(MethodOutput { scores, ..out.clone() })
}

fn check_scalar(method: &str, s: f64) -> Result<f64, RankingError> {
    if (0.0..=1.0).contains(&s) {
        Ok(s)
    } else {
        Err(RankingError::ScalarOutOfRange {
            method: method.to_string(),
            value: s,
        })
    }
}

fn minmax(v: &[f64]) -> Result<Vec<f64>, RankingError> {
    let mut acc = ScoreAccumulator::default();
    for &s in v {
        acc.push(s)?;
    }
    let range = acc.max - acc.min;
    Ok(v.iter()
        .map(|s| if range > 0.0 { (s - acc.min) / range } else { 0.0 })
        .collect())
}

/// Single-pass state for one (candidate, method): enough to recover the mean
/// of the min-max normalized scores without storing them, since the mean of
/// `(s − min)/(max − min)` is `(mean − min)/(max − min)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreAccumulator {
    sum: f64,
    count: usize,
    min: f64,
    max: f64,
}

impl Default for ScoreAccumulator {
    fn default() -> Self {
        Self {
            sum: 0.0,
            count: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl ScoreAccumulator {
    pub fn push(&mut self, s: f64) -> Result<(), RankingError> {
        if !s.is_finite() {
            return Err(RankingError::NonFinite);
        }
        self.sum += s;
        self.count += 1;
        self.min = self.min.min(s);
        self.max = self.max.max(s);
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Mean of the normalized scores. An empty accumulator (an empty subset)
    /// contributes 0; a constant one maps every score to 0.
    pub fn normalized_mean(&self) -> f64 {
        if self.count == 0 || self.max <= self.min {
            return 0.0;
        }
        let mean = self.sum / self.count as f64;
        ((mean - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
    }
}

/// What the candidate pool keeps of one method output after scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method_id: String,
    pub output_shape: OutputShape,
    /// `n_i`, the number of scores the method returned.
    pub score_count: usize,
    /// `(1/n_i) Σ_j g(s)_j`.
    pub normalized_mean: f64,
    pub detail: Option<MethodDetail>,
}

pub fn summarize(out: &MethodOutput) -> Result<MethodSummary, RankingError> {
    let (count, mean) = match &out.scores {
        Scores::Scalar(s) => (1, check_scalar(&out.method_id, *s)?),
        Scores::PerPoint(v) => accumulate(v.iter().copied())?,
        Scores::Subset(v) => accumulate(v.iter().map(|(_, s)| *s))?,
    };
    Ok(MethodSummary {
        method_id: out.method_id.clone(),
        output_shape: out.scores.shape(),
        score_count: count,
        normalized_mean: mean,
        detail: out.detail.clone(),
    })
}

fn accumulate(scores: impl Iterator<Item = f64>) -> Result<(usize, f64), RankingError> {
    let mut acc = ScoreAccumulator::default();
    for s in scores {
        acc.push(s)?;
    }
    Ok((acc.count(), acc.normalized_mean()))
}

/// `φ = (1/|F|) Σ_i (1/n_i) Σ_j g(f_i)_j` over already normalized outputs.
/// An empty subset contributes 0.
pub fn aggregate_phi(normalized: &[MethodOutput]) -> Result<f64, RankingError> {
    let mut means = Vec::with_capacity(normalized.len());
    for o in normalized {
        let v = o.scores.values();
        if v.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(RankingError::NotNormalized(o.method_id.clone()));
        }
        means.push(if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        });
    }
    Ok(phi_from_means(&means))
}

/// φ from the per-method normalized means.
pub fn phi_from_means(means: &[f64]) -> f64 {
    if means.is_empty() {
        return 0.0;
    }
    (means.iter().sum::<f64>() / means.len() as f64).clamp(0.0, 1.0)
}

/// `φ·λ^(a−2)` for arity `a > 2`; unchanged otherwise.
pub fn complexity_penalty(phi: f64, arity: usize, lambda: f64) -> f64 {
    if arity <= 2 {
        phi
    } else {
        phi * lambda.powi(arity as i32 - 2)
    }
}
