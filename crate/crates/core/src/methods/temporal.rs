//! Time-series detectors over `T×N`, `T×N×C` and `T×N×N` combinations.
//!
//! Every detector orders rows by timestamp first (stable on ties), so the
//! input may come in any row order.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::MethodError;
use crate::stats;

/// Consistency constant turning a MAD into a normal-scale sigma.
const MAD_SCALE: f64 = 1.4826;
/// Same role for the mean absolute deviation, used when the MAD is zero.
const MEAN_AD_SCALE: f64 = 1.253_314;

fn time_order(times: &[f64]) -> Vec<usize> {
    stats::argsort(times)
}

fn gather(values: &[f64], order: &[usize]) -> Vec<f64> {
    order.iter().map(|&i| values[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub r_squared: f64,
    /// Value units per second.
    pub slope: f64,
    /// Value at epoch 0.
    pub intercept: f64,
}

/// Ordinary least squares of value on time; the score is R².
pub fn trend_score(times: &[f64], values: &[f64]) -> Result<TrendFit, MethodError> {
    let fit = stats::fit_line(times, values).ok_or(MethodError::ZeroVariance)?;
    Ok(TrendFit {
        r_squared: fit.r_squared,
        slope: fit.slope,
        intercept: fit.intercept,
    })
}

/// `|S| / (n(n−1)/2)` of the Mann–Kendall statistic on time-ordered values.
pub fn mann_kendall_score(times: &[f64], values: &[f64]) -> Result<f64, MethodError> {
    let n = values.len();
    if n < 2 {
        return Err(MethodError::TooFewRows { needed: 2, got: n });
    }
    let v = gather(values, &time_order(times));
    let mut s: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            s += match v[j].partial_cmp(&v[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((s as f64 / pairs).abs())
}

/// Robust residual scores against a centred rolling median, in units of the
/// rolling MAD. Series ends are padded by point reflection so a straight line
/// has zero residual everywhere. When the MAD is zero the mean absolute
/// deviation stands in; when both are zero the point scores 0.
///
/// With `groups`, each category is treated as its own series.
pub fn rolling_residual_outlier_scores(
    times: &[f64],
    values: &[f64],
    groups: Option<&[u32]>,
    window: usize,
) -> Vec<f64> {
    let mut scores = vec![0.0; values.len()];
    let mut members: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for pos in 0..values.len() {
        let g = groups.map_or(0, |g| g[pos]);
        members.entry(g).or_default().push(pos);
    }
    for rows in members.values() {
        let local_times: Vec<f64> = rows.iter().map(|&r| times[r]).collect();
        let order: Vec<usize> = time_order(&local_times).into_iter().map(|i| rows[i]).collect();
        let series = gather(values, &order);
        for (pos, s) in order.iter().zip(rolling_scores(&series, window)) {
            scores[*pos] = s;
        }
    }
    scores
}

fn rolling_scores(v: &[f64], window: usize) -> Vec<f64> {
    let n = v.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut w = window.max(3) | 1;
    if w > n {
        w = if n % 2 == 1 { n } else { n - 1 };
    }
    let h = w / 2;
    let padded: Vec<f64> = (0..n + 2 * h)
        .map(|k| {
            let i = k as isize - h as isize;
            if i < 0 {
                2.0 * v[0] - v[(-i) as usize]
            } else if i as usize >= n {
                let mirror = 2 * (n - 1) - i as usize;
                2.0 * v[n - 1] - v[mirror]
            } else {
                v[i as usize]
            }
        })
        .collect();
    let tol = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0) * 1e-12;
    (0..n)
        .map(|i| {
            let win = &padded[i..i + w];
            let med = stats::median(win);
            let residual = v[i] - med;
            if residual.abs() <= tol {
                return 0.0;
            }
            let dev: Vec<f64> = win.iter().map(|x| (x - med).abs()).collect();
            let mad = stats::median(&dev);
            let scale = if mad > tol {
                MAD_SCALE * mad
            } else {
                MEAN_AD_SCALE * stats::mean(&dev)
            };
            if scale > tol {
                residual.abs() / scale
            } else {
                0.0
            }
        })
        .collect()
}

/// Spike significance of local maxima: for each point, the mean rise over
/// the `w` neighbours on each side (averaged over both sides), standardized
/// across the series. Strict local maxima above `threshold` standard
/// deviations are returned as `(row position, z)`, by position.
pub fn peak_scores(times: &[f64], values: &[f64], w: usize, threshold: f64) -> Vec<(usize, f64)> {
    let order = time_order(times);
    let v = gather(values, &order);
    let n = v.len();
    if n < 3 || w == 0 {
        return Vec::new();
    }
    let rise: Vec<f64> = (0..n)
        .map(|i| {
            let left: Vec<f64> = (1..=w).filter(|&k| k <= i).map(|k| v[i] - v[i - k]).collect();
            let right: Vec<f64> = (1..=w).filter(|&k| i + k < n).map(|k| v[i] - v[i + k]).collect();
            match (left.is_empty(), right.is_empty()) {
                (false, false) => (stats::mean(&left) + stats::mean(&right)) / 2.0,
                (true, false) => stats::mean(&right),
                (false, true) => stats::mean(&left),
                (true, true) => 0.0,
            }
        })
        .collect();
    if stats::is_degenerate(&rise) {
        return Vec::new();
    }
    let m = stats::mean(&rise);
    let s = stats::std_dev(&rise);
    let mut out: Vec<(usize, f64)> = (1..n - 1)
        .filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1])
        .map(|i| (order[i], (rise[i] - m) / s))
        .filter(|&(_, z)| z > threshold)
        .collect();
    out.sort_by_key(|&(pos, _)| pos);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seasonality {
    pub score: f64,
    pub lag: usize,
}

pub const MIN_SEASONAL_ROWS: usize = 24;

/// Largest autocorrelation over lags `2..=n/3` after removing a linear
/// trend, clamped to `[0, 1]`.
pub fn seasonality_score(times: &[f64], values: &[f64]) -> Result<Seasonality, MethodError> {
    let n = values.len();
    if n < MIN_SEASONAL_ROWS {
        return Err(MethodError::SeriesTooShort {
            needed: MIN_SEASONAL_ROWS,
            got: n,
        });
    }
    let order = time_order(times);
    let t = gather(times, &order);
    let v = gather(values, &order);
    let resid: Vec<f64> = match stats::fit_line(&t, &v) {
        Some(fit) => t
            .iter()
            .zip(&v)
            .map(|(ti, vi)| vi - (fit.slope * ti + fit.intercept))
            .collect(),
        None => {
            let m = stats::mean(&v);
            v.iter().map(|x| x - m).collect()
        }
    };
    let m = stats::mean(&resid);
    let centred: Vec<f64> = resid.iter().map(|r| r - m).collect();
    let denom: f64 = centred.iter().map(|r| r * r).sum();
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    if denom <= (scale * 1e-9).powi(2) * n as f64 {
        return Ok(Seasonality { score: 0.0, lag: 0 });
    }
    let mut best = Seasonality { score: 0.0, lag: 0 };
    for lag in 2..=n / 3 {
        let acf: f64 = (0..n - lag).map(|i| centred[i] * centred[i + lag]).sum::<f64>() / denom;
        if acf > best.score {
            best = Seasonality { score: acf, lag };
        }
    }
    best.score = best.score.clamp(0.0, 1.0);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Granger {
    /// `1 − p` after a Šidák adjustment of the smaller directional p-value.
    pub score: f64,
    /// p-value of "first series Granger-causes second".
    pub p_forward: f64,
    /// p-value of "second series Granger-causes first".
    pub p_backward: f64,
}

impl Granger {
    pub fn forward_is_stronger(&self) -> bool {
        self.p_forward <= self.p_backward
    }
}

fn rss(design: &DMatrix<f64>, target: &DVector<f64>) -> f64 {
    let svd = design.clone().svd(true, true);
    let beta = svd
        .solve(target, 1e-12)
        .expect("both singular-vector sets were computed");
    (target - design * beta).norm_squared()
}

fn granger_p_value(cause: &[f64], effect: &[f64], lag: usize) -> f64 {
    let n = effect.len();
    let rows = n - lag;
    let restricted = DMatrix::from_fn(rows, lag + 1, |r, c| if c == 0 { 1.0 } else { effect[r + lag - c] });
    let full = DMatrix::from_fn(rows, 2 * lag + 1, |r, c| match c {
        0 => 1.0,
        c if c <= lag => effect[r + lag - c],
        c => cause[r + lag - (c - lag)],
    });
    let target = DVector::from_fn(rows, |r, _| effect[r + lag]);
    let rss_r = rss(&restricted, &target);
    let rss_u = rss(&full, &target);
    let df2 = (rows - 2 * lag - 1) as f64;
    let tiny = 1e-12 * target.norm_squared().max(1e-300);
    if rss_u <= tiny {
        return if rss_r <= tiny { 1.0 } else { 0.0 };
    }
    let f = ((rss_r - rss_u).max(0.0) / lag as f64) / (rss_u / df2);
    let dist = FisherSnedecor::new(lag as f64, df2).expect("positive degrees of freedom");
    (1.0 - dist.cdf(f)).clamp(0.0, 1.0)
}

/// Granger F-tests in both directions with `lag` lags.
///
/// The score uses the smaller p-value, Šidák-adjusted for the two tests, so
/// that it is uniformly distributed on `[0, 1]` for independent series.
pub fn granger_causality_score(times: &[f64], a: &[f64], b: &[f64], lag: usize) -> Result<Granger, MethodError> {
    let needed = 4 * lag + 4;
    if a.len() < needed {
        return Err(MethodError::SeriesTooShort { needed, got: a.len() });
    }
    if stats::is_degenerate(a) || stats::is_degenerate(b) {
        return Err(MethodError::ZeroVariance);
    }
    let order = time_order(times);
    let std = stats::standardize_columns(&[&gather(a, &order), &gather(b, &order)]);
    let p_forward = granger_p_value(&std[0], &std[1], lag);
    let p_backward = granger_p_value(&std[1], &std[0], lag);
    let p_min = p_forward.min(p_backward);
    Ok(Granger {
        score: ((1.0 - p_min) * (1.0 - p_min)).clamp(0.0, 1.0),
        p_forward,
        p_backward,
    })
}
