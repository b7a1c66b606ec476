//! Multivariate outlier scores on standardized numerical columns.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MethodError;
use crate::stats;

/// Squared Mahalanobis distance to the mean.
///
/// Columns are standardized first, so the covariance is the correlation
/// matrix and the ridge `1e−6·trace/d` does not depend on column units.
pub fn mahalanobis_scores(cols: &[&[f64]]) -> Vec<f64> {
    let z = stats::standardize_columns(cols);
    let d = z.len();
    let n = z[0].len();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let c = z[i].iter().zip(&z[j]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    let ridge = 1e-6 * cov.trace() / d as f64;
    let ridge = if ridge > 0.0 { ridge } else { 1e-6 };
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    let chol = cov.cholesky().expect("ridge makes the covariance positive definite");
    (0..n)
        .map(|r| {
            let x = DVector::from_fn(d, |i, _| z[i][r]);
            let solved = chol.solve(&x);
            x.dot(&solved).max(0.0)
        })
        .collect()
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| stats::sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total <= 0.0 {
            rng.random_range(0..points.len())
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, w) in nearest.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        let c = points[next].clone();
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(stats::sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Euclidean distance to the assigned centroid after k-means (k-means++
/// seeding, Lloyd iterations) on standardized columns.
///
/// Members of tiny clusters (fewer than 2 rows or 2% of the data) are scored
/// against the nearest centroid of a larger cluster instead, otherwise an
/// isolated point that captures its own centroid would score 0.
pub fn kmeans_distance_scores(cols: &[&[f64]], k: usize, max_iter: usize, seed: u64) -> Result<Vec<f64>, MethodError> {
    let n = cols[0].len();
    if k >= n {
        return Err(MethodError::InvalidInput(format!(
            "k = {k} must be smaller than the row count {n}"
        )));
    }
    let points = stats::to_rows(&stats::standardize_columns(cols));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_pp_init(&points, k, &mut rng);
    let d = points[0].len();
    let mut assign = vec![0usize; n];
    for iter in 0..max_iter.max(1) {
        let mut changed = false;
        for (a, p) in assign.iter_mut().zip(&points) {
            let best = (0..k)
                .min_by(|&x, &y| stats::sq_dist(p, &centroids[x]).total_cmp(&stats::sq_dist(p, &centroids[y])))
                .unwrap();
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        if !changed && iter > 0 {
            break;
        }
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (a, p) in assign.iter().zip(&points) {
            counts[*a] += 1;
            for (s, v) in sums[*a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            // empty clusters keep their previous centroid
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let mut sizes = vec![0usize; k];
    for &a in &assign {
        sizes[a] += 1;
    }
    let min_size = 2.max((0.02 * n as f64).ceil() as usize);
    let large: Vec<usize> = (0..k).filter(|&c| sizes[c] >= min_size).collect();
    Ok(points
        .iter()
        .zip(&assign)
        .map(|(p, &a)| {
            if sizes[a] >= min_size || large.is_empty() {
                stats::sq_dist(p, &centroids[a]).sqrt()
            } else {
                large
                    .iter()
                    .map(|&c| stats::sq_dist(p, &centroids[c]))
                    .fold(f64::INFINITY, f64::min)
                    .sqrt()
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
    Polynomial { gamma: f64, degree: i32, coef0: f64 },
}

impl Kernel {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => (-gamma * stats::sq_dist(a, b)).exp(),
            Kernel::Polynomial { gamma, degree, coef0 } => (gamma * dot(a, b) + coef0).powi(degree),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared distance between each point's feature map and the kernel mean
/// embedding of the data:
/// `k(x,x) − (2/m)·Σ k(x,r_j) + (1/m²)·ΣΣ k(r_i,r_j)`.
///
/// The embedding is taken over all rows, or over a seeded sample of
/// `reference_size` rows when the data is larger.
pub fn kernel_mean_distance_scores(cols: &[&[f64]], kernel: Kernel, reference_size: usize, seed: u64) -> Vec<f64> {
    let points = stats::to_rows(&stats::standardize_columns(cols));
    let n = points.len();
    let reference: Vec<&Vec<f64>> = if n <= reference_size {
        points.iter().collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, n, reference_size).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| &points[i]).collect()
    };
    let m = reference.len() as f64;
    let mut self_term = 0.0;
    for a in &reference {
        for b in &reference {
            self_term += kernel.eval(a, b);
        }
    }
    self_term /= m * m;
    points
        .iter()
        .map(|p| {
            let cross: f64 = reference.iter().map(|r| kernel.eval(p, r)).sum::<f64>() / m;
            (kernel.eval(p, p) - 2.0 * cross + self_term).max(0.0)
        })
        .collect()
}
