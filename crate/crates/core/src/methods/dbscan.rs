//! DBSCAN-based outlier scores.
//!
//! Only the core / border / noise classification matters for scoring, so no
//! cluster labels are built: a point is core when at least `min_pts` points
//! (itself included) lie within `eps`, and noise when it is not core and no
//! core point lies within `eps`.

use rayon::prelude::*;

use crate::stats;

/// Distance from each point to its `(min_pts − 1)`-th nearest other point.
fn core_distances(points: &[Vec<f64>], min_pts: usize) -> Vec<f64> {
    let k = (min_pts.max(2) - 1).min(points.len() - 1);
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d: Vec<f64> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| stats::sq_dist(p, q))
                .collect();
            let (_, kth, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
            kth.sqrt()
        })
        .collect()
}

/// Knee of the sorted k-distance curve: the point furthest below the chord
/// joining its first and last values.
pub fn knee_eps(k_distances: &[f64]) -> f64 {
    let sorted = stats::sorted(k_distances);
    let n = sorted.len();
    if n < 3 {
        return sorted[n - 1];
    }
    let (first, last) = (sorted[0], sorted[n - 1]);
    if last - first <= 0.0 {
        return last;
    }
    let mut best = (0.0, n - 1);
    for (i, &d) in sorted.iter().enumerate() {
        let chord = first + (last - first) * i as f64 / (n - 1) as f64;
        let gap = chord - d;
        if gap > best.0 {
            best = (gap, i);
        }
    }
    sorted[best.1]
}

/// Noise points score `distance to nearest core point / eps` (at least 1);
/// core and border points score 0. Columns are z-scored first. With
/// `eps = None` the radius comes from the k-distance knee. If no point is
/// core the k-nearest-neighbour distance is returned instead.
pub fn dbscan_outlier_scores(cols: &[&[f64]], eps: Option<f64>, min_pts: usize) -> Vec<f64> {
    let points = stats::to_rows(&stats::standardize_columns(cols));
    if points.len() < 2 {
        return vec![0.0; points.len()];
    }
    let kdist = core_distances(&points, min_pts);
    let eps = eps.unwrap_or_else(|| knee_eps(&kdist));
    let core: Vec<usize> = (0..points.len()).filter(|&i| kdist[i] <= eps).collect();
    if core.is_empty() {
        return kdist;
    }
    let radius = eps.max(1e-12);
    points
        .par_iter()
        .map(|p| {
            let nearest = core
                .iter()
                .map(|&c| stats::sq_dist(p, &points[c]))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            if nearest <= eps {
                0.0
            } else {
                nearest / radius
            }
        })
        .collect()
}
