//! Fixed insight-sentence templates, one per insight type.

use crate::methods::{catalog, MethodDetail};
use crate::ranking::InsightCandidate;

fn statistic(cand: &InsightCandidate, method: &str) -> Option<f64> {
    cand.methods
        .iter()
        .find(|m| m.method_id == method)
        .and_then(|m| match &m.detail {
            Some(MethodDetail::Statistic { value, .. }) => Some(*value),
            _ => None,
        })
}

fn detail<'a>(cand: &'a InsightCandidate, method: &str) -> Option<&'a MethodDetail> {
    cand.methods
        .iter()
        .find(|m| m.method_id == method)
        .and_then(|m| m.detail.as_ref())
}

fn count(cand: &InsightCandidate, method: &str) -> usize {
    cand.methods
        .iter()
        .find(|m| m.method_id == method)
        .map_or(0, |m| m.score_count)
}

pub fn title(cand: &InsightCandidate) -> String {
    let name = catalog::insight_type(&cand.insight_type_id).map_or(cand.insight_type_id.as_str(), |t| t.display_name);
    format!("{name}: {}", cand.combination.label())
}

fn top_row(cand: &InsightCandidate) -> Option<(usize, f64, usize)> {
    let agg = cand.point_ranks.as_ref()?;
    let r = agg.rows.first().filter(|r| r.score > 0.0)?;
    Some((r.row_id, r.avg_rank, agg.contributing_method_ids.len()))
}

fn outlier_sentence(cand: &InsightCandidate, what: &str) -> String {
    let cols = cand.combination.label();
    match top_row(cand) {
        Some((row, rank, methods)) => format!(
            "Row {row} is the strongest {what} in {cols} (average rank {rank:.1} across {methods} method{}).",
            if methods == 1 { "" } else { "s" }
        ),
        None => format!("No {what} stands out in {cols}."),
    }
}

pub fn insight_sentence(cand: &InsightCandidate) -> String {
    let cols = &cand.combination.column_names;
    let col = |i: usize| cols.get(i).map_or("?", String::as_str);
    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"));
    match cand.insight_type_id.as_str() {
        "single_variable_outliers" | "multivariate_outliers" => outlier_sentence(cand, "outlier"),
        "time_series_outliers" => outlier_sentence(cand, "deviation from the rolling median"),
        "two_variable_outliers" => match detail(cand, "chisq_residual") {
            Some(MethodDetail::Cells { cells }) => match cells
                .iter()
                .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()))
            {
                Some(c) => format!(
                    "{} of {} × {} deviate from independence; ({}, {}) has {:.0} rows where {:.1} are expected.",
                    plural(cells.len(), "category pair"),
                    col(0),
                    col(1),
                    c.x,
                    c.y,
                    c.observed,
                    c.expected
                ),
                None => format!(
                    "No category pair of {} × {} deviates from independence.",
                    col(0),
                    col(1)
                ),
            },
            _ => outlier_sentence(cand, "outlier"),
        },
        "peaks" => format!(
            "{} in {} over {}.",
            plural(count(cand, "peaks"), "significant peak"),
            col(1),
            col(0)
        ),
        "trend" => {
            let direction = match detail(cand, "trend_ols") {
                Some(MethodDetail::Trend(fit)) if fit.slope < 0.0 => "downward",
                _ => "upward",
            };
            let r2 = match detail(cand, "trend_ols") {
                Some(MethodDetail::Trend(fit)) => Some(fit.r_squared),
                _ => None,
            };
            format!(
                "{} trends {direction} over {} (R² = {}, Mann–Kendall |τ| = {}).",
                col(1),
                col(0),
                fmt(r2),
                fmt(statistic(cand, "mann_kendall"))
            )
        }
        "seasonality" => match detail(cand, "seasonality") {
            Some(MethodDetail::Seasonality(s)) if s.lag > 0 => format!(
                "{} repeats every {} observations (autocorrelation {:.2}).",
                col(1),
                s.lag,
                s.score
            ),
            _ => format!("{} shows no repeating pattern.", col(1)),
        },
        "linear_correlation" => {
            let r = statistic(cand, "pearson");
            let sign = match r {
                Some(v) if v < 0.0 => "negative",
                _ => "positive",
            };
            format!(
                "Pearson |r| = {} between {} and {} ({sign}).",
                fmt(r.map(f64::abs)),
                col(0),
                col(1)
            )
        }
        "nonlinear_correlation" => format!(
            "Spearman |ρ| = {} and normalized mutual information = {} between {} and {}.",
            fmt(statistic(cand, "spearman").map(f64::abs)),
            fmt(statistic(cand, "mutual_information")),
            col(0),
            col(1)
        ),
        "categorical_association" => format!(
            "Cramér's V = {} between {} and {}.",
            fmt(statistic(cand, "cramers_v")),
            col(0),
            col(1)
        ),
        "group_difference" => format!(
            "{} differs across the groups of {} (Kruskal–Wallis 1 − p = {}).",
            col(1),
            col(0),
            fmt(statistic(cand, "group_difference"))
        ),
        "skew" => format!(
            "{} is skewed (|skewness| = {}).",
            col(0),
            fmt(statistic(cand, "skewness"))
        ),
        "heavy_tails" => format!(
            "{} has heavy tails (excess kurtosis = {}).",
            col(0),
            fmt(statistic(cand, "heavy_tail"))
        ),
        "time_series_causality" => match detail(cand, "granger") {
            Some(MethodDetail::Granger {
                p_forward,
                p_backward,
                forward_is_stronger,
            }) => {
                let (cause, effect, p) = if *forward_is_stronger {
                    (col(1), col(2), p_forward)
                } else {
                    (col(2), col(1), p_backward)
                };
                format!("Past values of {cause} help predict {effect} (Granger p = {p:.3}).")
            }
            _ => format!("No lead-lag relation between {} and {}.", col(1), col(2)),
        },
        other => format!("{other} insight on {}.", cand.combination.label()),
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}
