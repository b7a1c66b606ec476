//! Pairwise association detectors over numerical and categorical columns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::MethodError;
use crate::stats;

/// `|r|` of the Pearson product-moment correlation.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64, MethodError> {
    pearson_signed(x, y).map(f64::abs)
}

pub(crate) fn pearson_signed(x: &[f64], y: &[f64]) -> Result<f64, MethodError> {
    stats::correlation(x, y).ok_or(MethodError::ZeroVariance)
}

/// `|ρ|` of Spearman's rank correlation (ties get average ranks).
pub fn spearman_correlation(x: &[f64], y: &[f64]) -> Result<f64, MethodError> {
    spearman_signed(x, y).map(f64::abs)
}

pub(crate) fn spearman_signed(x: &[f64], y: &[f64]) -> Result<f64, MethodError> {
    if stats::is_degenerate(x) || stats::is_degenerate(y) {
        return Err(MethodError::ZeroVariance);
    }
    let rx = stats::average_ranks(x);
    let ry = stats::average_ranks(y);
    stats::correlation(&rx, &ry).ok_or(MethodError::ZeroVariance)
}

/// One side of a mutual-information estimate.
#[derive(Debug, Clone, Copy)]
pub enum Axis<'a> {
    /// Discretized into equal-width bins.
    Numerical(&'a [f64]),
    Categorical(&'a [u32]),
}

impl Axis<'_> {
    fn labels(&self, bins: usize) -> Vec<u32> {
        match *self {
            Axis::Categorical(codes) => codes.to_vec(),
            Axis::Numerical(xs) => {
                let (lo, hi) = stats::min_max(xs);
                if stats::is_degenerate(xs) {
                    return vec![0; xs.len()];
                }
                let width = (hi - lo) / bins as f64;
                xs.iter()
                    .map(|&x| (((x - lo) / width).floor() as usize).min(bins - 1) as u32)
                    .collect()
            }
        }
    }
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Plug-in mutual information normalized by `min(H(X), H(Y))`.
/// Returns 0 when either marginal entropy is 0.
pub fn mutual_information(x: Axis<'_>, y: Axis<'_>, bins: usize) -> f64 {
    let lx = x.labels(bins);
    let ly = y.labels(bins);
    let n = lx.len() as f64;
    let mut joint: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut mx: BTreeMap<u32, usize> = BTreeMap::new();
    let mut my: BTreeMap<u32, usize> = BTreeMap::new();
    for (&a, &b) in lx.iter().zip(&ly) {
        *joint.entry((a, b)).or_default() += 1;
        *mx.entry(a).or_default() += 1;
        *my.entry(b).or_default() += 1;
    }
    let hx = entropy(mx.values().copied(), n);
    let hy = entropy(my.values().copied(), n);
    let denom = hx.min(hy);
    if denom <= 1e-15 {
        return 0.0;
    }
    let hxy = entropy(joint.values().copied(), n);
    ((hx + hy - hxy) / denom).clamp(0.0, 1.0)
}

/// Dense contingency table over the levels actually observed.
struct Contingency {
    counts: Vec<Vec<f64>>,
    row_levels: Vec<u32>,
    col_levels: Vec<u32>,
    row_index: Vec<usize>,
    col_index: Vec<usize>,
    n: f64,
}

impl Contingency {
    fn new(x: &[u32], y: &[u32]) -> Self {
        fn dense(codes: &[u32]) -> (Vec<u32>, Vec<usize>) {
            let mut levels = codes.to_vec();
            levels.sort_unstable();
            levels.dedup();
            let idx = codes.iter().map(|c| levels.binary_search(c).unwrap()).collect();
            (levels, idx)
        }
        let (row_levels, row_index) = dense(x);
        let (col_levels, col_index) = dense(y);
        let mut counts = vec![vec![0.0; col_levels.len()]; row_levels.len()];
        for (&r, &c) in row_index.iter().zip(&col_index) {
            counts[r][c] += 1.0;
        }
        Self {
            counts,
            row_levels,
            col_levels,
            row_index,
            col_index,
            n: x.len() as f64,
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<f64> {
        (0..self.col_levels.len())
            .map(|c| self.counts.iter().map(|r| r[c]).sum())
            .collect()
    }

    fn chi_square(&self) -> f64 {
        let rs = self.row_sums();
        let cs = self.col_sums();
        let mut chi2 = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &o) in row.iter().enumerate() {
                let e = rs[i] * cs[j] / self.n;
                if e > 0.0 {
                    chi2 += (o - e) * (o - e) / e;
                }
            }
        }
        chi2
    }
}

/// Bias-corrected Cramér's V (Bergsma's correction).
pub fn cramers_v(x: &[u32], y: &[u32]) -> Result<f64, MethodError> {
    let table = Contingency::new(x, y);
    let r = table.row_levels.len() as f64;
    let k = table.col_levels.len() as f64;
    if r < 2.0 || k < 2.0 {
        return Err(MethodError::Degenerate("degenerate contingency"));
    }
    let n = table.n;
    let phi2 = table.chi_square() / n;
    let phi2_corr = (phi2 - (k - 1.0) * (r - 1.0) / (n - 1.0)).max(0.0);
    let r_corr = r - (r - 1.0).powi(2) / (n - 1.0);
    let k_corr = k - (k - 1.0).powi(2) / (n - 1.0);
    let denom = (k_corr - 1.0).min(r_corr - 1.0);
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((phi2_corr / denom).sqrt().clamp(0.0, 1.0))
}

/// A contingency cell whose adjusted residual exceeded the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedCell {
    /// Category id in the first column.
    pub x_code: u32,
    /// Category id in the second column.
    pub y_code: u32,
    pub observed: f64,
    pub expected: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualOutliers {
    /// `(row position, |residual|)` for rows in flagged cells, by position.
    pub rows: Vec<(usize, f64)>,
    pub cells: Vec<FlaggedCell>,
}

/// Adjusted standardized Pearson residuals of the contingency table.
/// Cells with `|residual| > threshold` are flagged and mapped back to rows;
/// cells with zero expected count are skipped.
pub fn chisq_residual_outlier_scores(x: &[u32], y: &[u32], threshold: f64) -> ResidualOutliers {
    let table = Contingency::new(x, y);
    let n = table.n;
    let rs = table.row_sums();
    let cs = table.col_sums();
    let mut residual = vec![vec![None; cs.len()]; rs.len()];
    let mut cells = Vec::new();
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = rs[i] * cs[j] / n;
            let v = e * (1.0 - rs[i] / n) * (1.0 - cs[j] / n);
            if e <= 0.0 || v <= 0.0 {
                continue;
            }
            let z = (o - e) / v.sqrt();
            if z.abs() > threshold {
                residual[i][j] = Some(z.abs());
                cells.push(FlaggedCell {
                    x_code: table.row_levels[i],
                    y_code: table.col_levels[j],
                    observed: o,
                    expected: e,
                    residual: z,
                });
            }
        }
    }
    let rows = table
        .row_index
        .iter()
        .zip(&table.col_index)
        .enumerate()
        .filter_map(|(pos, (&i, &j))| residual[i][j].map(|s| (pos, s)))
        .collect();
    ResidualOutliers { rows, cells }
}

/// `1 − p` of the Kruskal–Wallis H test (chi-square approximation) for a
/// numerical column split by a categorical one. Groups with fewer than two
/// rows are ignored.
pub fn group_difference_score(groups: &[u32], values: &[f64]) -> Result<f64, MethodError> {
    let mut by_group: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (pos, &g) in groups.iter().enumerate() {
        by_group.entry(g).or_default().push(pos);
    }
    by_group.retain(|_, rows| rows.len() >= 2);
    if by_group.len() < 2 {
        return Err(MethodError::TooFewGroups);
    }
    let kept: Vec<usize> = by_group.values().flatten().copied().collect();
    let kept_values: Vec<f64> = kept.iter().map(|&p| values[p]).collect();
    let ranks = stats::average_ranks(&kept_values);
    let rank_of: BTreeMap<usize, f64> = kept.iter().copied().zip(ranks.iter().copied()).collect();

    let n = kept.len() as f64;
    let mut h = 0.0;
    for rows in by_group.values() {
        let sum: f64 = rows.iter().map(|p| rank_of[p]).sum();
        h += sum * sum / rows.len() as f64;
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    // tie correction
    let sorted = stats::sorted(&kept_values);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(0.0);
    }
    let h = (h / correction).max(0.0);
    let df = (by_group.len() - 1) as f64;
    let chi = ChiSquared::new(df).expect("df >= 1");
    Ok(chi.cdf(h).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn pearson_cases() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((pearson_correlation(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..1000).map(|_| nd.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..1000).map(|_| nd.sample(&mut rng)).collect();
        assert!(pearson_correlation(&a, &b).unwrap() < 0.1);
        assert!(matches!(
            pearson_correlation(&x, &[1.0; 20]),
            Err(MethodError::ZeroVariance)
        ));
    }

    #[test]
    fn spearman_cases() {
        let x: Vec<f64> = (-10..10).map(f64::from).collect();
        let cube: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert!((spearman_correlation(&x, &cube).unwrap() - 1.0).abs() < 1e-12);
        let sym: Vec<f64> = (-3..=3).map(f64::from).collect();
        let sq: Vec<f64> = sym.iter().map(|v| v * v).collect();
        assert!(spearman_correlation(&sym, &sq).unwrap().abs() < 1e-12);
        let rev: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((spearman_correlation(&x, &rev).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_cases() {
        let a: Vec<u32> = (0..100).map(|i| i % 4).collect();
        let mi = mutual_information(Axis::Categorical(&a), Axis::Categorical(&a), 10);
        assert!((mi - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..4)).collect();
        let v: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..4)).collect();
        assert!(mutual_information(Axis::Categorical(&u), Axis::Categorical(&v), 10) < 0.05);

        // Y is a deterministic function of X's bin
        let x: Vec<f64> = (0..200).map(|i| i as f64 / 2.0).collect();
        let y: Vec<u32> = x.iter().map(|v| ((v / 10.0).floor() as u32) % 3).collect();
        let mi = mutual_information(Axis::Numerical(&x), Axis::Categorical(&y), 10);
        assert!((mi - 1.0).abs() < 1e-12, "{mi}");

        assert_eq!(
            mutual_information(Axis::Numerical(&[1.0; 10]), Axis::Categorical(&a[..10]), 10),
            0.0
        );
    }

    #[test]
    fn cramers_v_cases() {
        let a: Vec<u32> = (0..90).map(|i| i % 3).collect();
        assert!((cramers_v(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..4)).collect();
        let v: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..4)).collect();
        assert!(cramers_v(&u, &v).unwrap() < 0.05);
        assert!(matches!(cramers_v(&[0; 10], &a[..10]), Err(MethodError::Degenerate(_))));
    }

    fn table(counts: [[usize; 3]; 3]) -> (Vec<u32>, Vec<u32>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    x.push(i as u32);
                    y.push(j as u32);
                }
            }
        }
        (x, y)
    }

    #[test]
    fn residuals_independent_table_is_empty() {
        let (x, y) = table([[10, 20, 30], [20, 40, 60], [5, 10, 15]]);
        let out = chisq_residual_outlier_scores(&x, &y, 2.0);
        assert!(out.rows.is_empty() && out.cells.is_empty());
    }

    #[test]
    fn residuals_inflated_cell_returned() {
        let (x, y) = table([[40, 10, 10], [10, 10, 10], [10, 10, 10]]);
        let out = chisq_residual_outlier_scores(&x, &y, 2.0);
        let inflated: Vec<usize> = (0..40).collect();
        for p in &inflated {
            assert!(out.rows.iter().any(|(r, _)| r == p));
        }
        let top = out.rows.iter().map(|r| r.1).fold(0.0, f64::max);
        assert_eq!(out.rows[0].1, top);
        let cell = out.cells.iter().find(|c| c.x_code == 0 && c.y_code == 0).unwrap();
        assert!(cell.residual > 2.0);
    }

    #[test]
    fn group_difference_cases() {
        let groups: Vec<u32> = (0..20).map(|i| (i >= 10) as u32).collect();
        let disjoint: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(group_difference_score(&groups, &disjoint).unwrap() > 0.99);

        let same: Vec<f64> = (0..20).map(|i| (i % 10) as f64).collect();
        assert!(group_difference_score(&groups, &same).unwrap() < 1e-9);

        // third group has a single row and is ignored; one group left
        let g = [0, 0, 0, 1];
        assert!(matches!(
            group_difference_score(&g, &[1.0, 2.0, 3.0, 4.0]),
            Err(MethodError::TooFewGroups)
        ));
    }
}
