//! Single-column detectors: Tukey fences, z-scores, skewness and tail weight.

use super::MethodError;
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct FenceScores {
    pub scores: Vec<f64>,
    pub lower_fence: f64,
    pub upper_fence: f64,
}

/// Distance beyond the Tukey fences `[Q1 − k·IQR, Q3 + k·IQR]`, in IQR units.
/// Points inside the fences score 0; a zero IQR scores everything 0.
pub fn iqr_outlier_scores(xs: &[f64], fence: f64) -> FenceScores {
    let sorted = stats::sorted(xs);
    let q1 = stats::quantile_sorted(&sorted, 0.25);
    let q3 = stats::quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lower_fence = q1 - fence * iqr;
    let upper_fence = q3 + fence * iqr;
    let scores = if iqr <= 0.0 {
        vec![0.0; xs.len()]
    } else {
        xs.iter()
            .map(|&x| {
                let beyond = (lower_fence - x).max(x - upper_fence).max(0.0);
                beyond / iqr
            })
            .collect()
    };
    FenceScores {
        scores,
        lower_fence,
        upper_fence,
    }
}

/// `|x − mean| / std`; a constant column scores 0 everywhere.
pub fn zscore_outlier_scores(xs: &[f64]) -> Vec<f64> {
    if stats::is_degenerate(xs) {
        return vec![0.0; xs.len()];
    }
    let m = stats::mean(xs);
    let s = stats::std_dev(xs);
    xs.iter().map(|x| (x - m).abs() / s).collect()
}

fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let m = stats::mean(xs);
    let n = xs.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

const MIN_MOMENT_ROWS: usize = 8;

fn check_moment_input(xs: &[f64]) -> Result<(), MethodError> {
    if xs.len() < MIN_MOMENT_ROWS {
        return Err(MethodError::TooFewRows {
            needed: MIN_MOMENT_ROWS,
            got: xs.len(),
        });
    }
    if stats::is_degenerate(xs) {
        return Err(MethodError::ZeroVariance);
    }
    Ok(())
}

/// Absolute adjusted Fisher–Pearson sample skewness `|G1|`.
pub fn skewness_score(xs: &[f64]) -> Result<f64, MethodError> {
    check_moment_input(xs)?;
    let (m2, m3, _) = central_moments(xs);
    let n = xs.len() as f64;
    let g1 = m3 / m2.powf(1.5);
    Ok((g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)).abs())
}

/// Positive part of the (population) excess kurtosis `m4/m2² − 3`.
pub fn heavy_tail_score(xs: &[f64]) -> Result<f64, MethodError> {
    check_moment_input(xs)?;
    let (m2, _, m4) = central_moments(xs);
    Ok((m4 / (m2 * m2) - 3.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp, Normal, StudentT};

    fn draw<D: Distribution<f64>>(d: D, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    #[test]
    fn iqr_flags_the_far_point() {
        // Q1 = 2, Q3 = 4, IQR = 2, upper fence = 7: (100 − 7) / 2
        let out = iqr_outlier_scores(&[1.0, 2.0, 3.0, 4.0, 100.0], 1.5);
        assert_eq!(out.scores, vec![0.0, 0.0, 0.0, 0.0, 46.5]);
        assert_eq!(out.upper_fence, 7.0);
        assert_eq!(out.lower_fence, -1.0);
    }

    #[test]
    fn iqr_constant_and_symmetric() {
        assert!(iqr_outlier_scores(&[5.0; 8], 1.5).scores.iter().all(|&s| s == 0.0));
        let sym = [-3.0, -2.0, -1.0, 0.0, 0.0, 1.0, 2.0, 3.0];
        assert!(iqr_outlier_scores(&sym, 1.5).scores.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn zscore_cases() {
        let s = zscore_outlier_scores(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0]);
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(s[7], max);
        // mean 1.25, population sd sqrt(10.9375)
        assert!((s[7] - 8.75 / 10.9375f64.sqrt()).abs() < 1e-12);
        assert!(zscore_outlier_scores(&[3.0; 8]).iter().all(|&v| v == 0.0));
        let normal = draw(Normal::new(0.0, 1.0).unwrap(), 1000, 42);
        let max = zscore_outlier_scores(&normal).into_iter().fold(0.0, f64::max);
        assert!(max > 2.5, "{max}");
    }

    #[test]
    fn skewness_cases() {
        let sym = [-2.0, -1.0, 0.0, 1.0, 2.0, -2.0, -1.0, 0.0, 1.0, 2.0];
        assert!(skewness_score(&sym).unwrap().abs() < 1e-12);
        let exp = draw(Exp::new(1.0).unwrap(), 5000, 42);
        let g1 = skewness_score(&exp).unwrap();
        assert!((g1 - 2.0).abs() < 0.3, "{g1}");
        assert!(matches!(
            skewness_score(&[1.0, 2.0, 3.0]),
            Err(MethodError::TooFewRows { .. })
        ));
    }

    #[test]
    fn heavy_tail_cases() {
        let normal = draw(Normal::new(0.0, 1.0).unwrap(), 5000, 42);
        assert!(heavy_tail_score(&normal).unwrap() < 0.3);
        // two-point distribution: excess kurtosis exactly -2, clipped to 0
        let two_point: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        assert_eq!(heavy_tail_score(&two_point).unwrap(), 0.0);
        let t5 = draw(StudentT::new(5.0).unwrap(), 5000, 42);
        assert!(heavy_tail_score(&t5).unwrap() > 1.0);
    }
}
