//! Insight discovery methods and the catalog that binds them to insight types.
//!
//! Each detector is a pure function of a [`CombinationMatrix`], its resolved
//! [`Hyperparameters`] and a seed. [`MethodKind::run`] adapts the typed
//! detector functions to the uniform [`MethodOutput`] consumed by ranking.

mod association;
pub mod catalog;
mod dbscan;
mod isolation_forest;
mod multivariate;
pub mod params;
mod temporal;
mod univariate;

use serde::{Deserialize, Serialize};

pub use association::{
    chisq_residual_outlier_scores, cramers_v, group_difference_score, mutual_information, pearson_correlation,
    spearman_correlation, Axis, FlaggedCell, ResidualOutliers,
};
pub use catalog::{catalog, insight_type, Binding, InsightType, MethodSpec, Registry};
pub use dbscan::{dbscan_outlier_scores, knee_eps};
pub use isolation_forest::{average_path_length, isolation_forest_scores};
pub use multivariate::{kernel_mean_distance_scores, kmeans_distance_scores, mahalanobis_scores, Kernel};
pub use params::{Hyperparameters, ParamSpec, ParamValue};
pub use temporal::{
    granger_causality_score, mann_kendall_score, peak_scores, rolling_residual_outlier_scores, seasonality_score,
    trend_score, Granger, Seasonality, TrendFit, MIN_SEASONAL_ROWS,
};
pub use univariate::{heavy_tail_score, iqr_outlier_scores, skewness_score, zscore_outlier_scores, FenceScores};

use crate::config::{ConfigError, MethodOverrides};
use crate::dataset::{AttributeType, CombinationMatrix};

/// Precondition failures. A candidate whose method fails is not scored.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MethodError {
    #[error("zero variance")]
    ZeroVariance,
    #[error("too few rows: need {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("{0}")]
    Degenerate(&'static str),
    #[error("fewer than two groups with at least two rows")]
    TooFewGroups,
    #[error("series too short: need {needed} rows, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("method `{method}` does not accept signature {signature}")]
    UnsupportedSignature { method: &'static str, signature: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodClass {
    Statistical,
    InfoTheoretic,
    Supervised,
    Unsupervised,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputShape {
    PerPoint,
    Subset,
    Scalar,
}

/// Raw method scores. Subset entries are `(row position, score)`, where the
/// position indexes the combination's rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scores {
    PerPoint(Vec<f64>),
    Subset(Vec<(usize, f64)>),
    Scalar(f64),
}

impl Scores {
    pub fn shape(&self) -> OutputShape {
        match self {
            Scores::PerPoint(_) => OutputShape::PerPoint,
            Scores::Subset(_) => OutputShape::Subset,
            Scores::Scalar(_) => OutputShape::Scalar,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Scores::PerPoint(v) => v.clone(),
            Scores::Subset(v) => v.iter().map(|(_, s)| *s).collect(),
            Scores::Scalar(s) => vec![*s],
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Method-specific facts kept for chart annotation and insight sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodDetail {
    Statistic {
        name: String,
        value: f64,
    },
    Trend(TrendFit),
    Fences {
        lower: f64,
        upper: f64,
    },
    Seasonality(Seasonality),
    Granger {
        p_forward: f64,
        p_backward: f64,
        forward_is_stronger: bool,
    },
    Cells {
        cells: Vec<CellDetail>,
    },
}

/// A flagged contingency cell with category labels resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDetail {
    pub x: String,
    pub y: String,
    pub observed: f64,
    pub expected: f64,
    /// Adjusted standardized residual (signed).
    pub residual: f64,
}

impl MethodDetail {
    fn statistic(name: &str, value: f64) -> Self {
        MethodDetail::Statistic {
            name: name.to_string(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutput {
    pub method_id: String,
    pub scores: Scores,
    /// Always true: every method transforms its statistic so that larger
    /// means more insightful.
    pub higher_is_more_insightful: bool,
    pub detail: Option<MethodDetail>,
}

macro_rules! method_kinds {
    ($($variant:ident => $id:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum MethodKind { $($variant),* }

        impl MethodKind {
            pub const ALL: &'static [MethodKind] = &[$(MethodKind::$variant),*];

            pub fn id(self) -> &'static str {
                match self { $(MethodKind::$variant => $id),* }
            }

            pub fn from_id(id: &str) -> Option<Self> {
                match id { $($id => Some(MethodKind::$variant),)* _ => None }
            }
        }
    };
}

method_kinds! {
    Iqr => "iqr",
    Zscore => "zscore",
    Dbscan => "dbscan",
    IsolationForest => "isolation_forest",
    Mahalanobis => "mahalanobis",
    KmeansDistance => "kmeans_distance",
    KernelMeanDistance => "kernel_mean_distance",
    Pearson => "pearson",
    Spearman => "spearman",
    MutualInformation => "mutual_information",
    Skewness => "skewness",
    HeavyTail => "heavy_tail",
    TrendOls => "trend_ols",
    MannKendall => "mann_kendall",
    RollingResidual => "rolling_residual",
    Peaks => "peaks",
    Seasonality => "seasonality",
    Granger => "granger",
    CramersV => "cramers_v",
    ChisqResidual => "chisq_residual",
    GroupDifference => "group_difference",
}

const NO_PARAMS: &[ParamSpec] = &[];

impl Serialize for MethodKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

/// Maps an unbounded non-negative statistic onto `[0, 1)`.
fn squash(s: f64) -> f64 {
    s / (1.0 + s)
}

impl MethodKind {
    pub fn class(self) -> MethodClass {
        use MethodKind::*;
        match self {
            Iqr | Zscore | Mahalanobis | Pearson | Spearman | Skewness | HeavyTail | MannKendall | RollingResidual
            | Peaks | Seasonality | CramersV | ChisqResidual | GroupDifference => MethodClass::Statistical,
            MutualInformation => MethodClass::InfoTheoretic,
            TrendOls | Granger => MethodClass::Supervised,
            Dbscan | IsolationForest | KmeansDistance | KernelMeanDistance => MethodClass::Unsupervised,
        }
    }

    pub fn output_shape(self) -> OutputShape {
        use MethodKind::*;
        match self {
            Iqr | Zscore | Dbscan | IsolationForest | Mahalanobis | KmeansDistance | KernelMeanDistance
            | RollingResidual => OutputShape::PerPoint,
            Peaks | ChisqResidual => OutputShape::Subset,
            Pearson | Spearman | MutualInformation | Skewness | HeavyTail | TrendOls | MannKendall | Seasonality
            | Granger | CramersV | GroupDifference => OutputShape::Scalar,
        }
    }

    pub fn param_schema(self) -> &'static [ParamSpec] {
        use MethodKind::*;
        const IQR: &[ParamSpec] = &[ParamSpec::float("fence", 0.0, 1.5)];
        const DBSCAN: &[ParamSpec] = &[
            ParamSpec::float_or_auto("eps", 0.0),
            ParamSpec::int("min_pts", 2, 1000, 5),
        ];
        const IFOREST: &[ParamSpec] = &[
            ParamSpec::int("n_trees", 2, 10_000, 100),
            ParamSpec::int("subsample", 2, 1_000_000, 256),
        ];
        const KMEANS: &[ParamSpec] = &[
            ParamSpec::int("k", 1, 1000, 3),
            ParamSpec::int("max_iter", 1, 10_000, 50),
        ];
        const KERNEL: &[ParamSpec] = &[
            ParamSpec::choice("kernel", &["linear", "rbf", "polynomial"], "rbf"),
            ParamSpec::float_or_auto("gamma", 0.0),
            ParamSpec::int("degree", 1, 10, 3),
            ParamSpec::float("coef0", f64::NEG_INFINITY, 1.0),
            ParamSpec::int("reference_size", 10, 1_000_000, 1000),
        ];
        const MI: &[ParamSpec] = &[ParamSpec::int("bins", 2, 1000, 10)];
        const ROLLING: &[ParamSpec] = &[ParamSpec::int("window", 3, 1001, 7)];
        const PEAKS: &[ParamSpec] = &[
            ParamSpec::int("window", 1, 1000, 3),
            ParamSpec::float("threshold", f64::NEG_INFINITY, 1.0),
        ];
        const GRANGER: &[ParamSpec] = &[ParamSpec::int("lag", 1, 50, 2)];
        const CHISQ: &[ParamSpec] = &[ParamSpec::float("threshold", 0.0, 2.0)];
        match self {
            Iqr => IQR,
            Dbscan => DBSCAN,
            IsolationForest => IFOREST,
            KmeansDistance => KMEANS,
            KernelMeanDistance => KERNEL,
            MutualInformation => MI,
            RollingResidual => ROLLING,
            Peaks => PEAKS,
            Granger => GRANGER,
            ChisqResidual => CHISQ,
            _ => NO_PARAMS,
        }
    }

    fn kernel(params: &Hyperparameters, dims: usize) -> Kernel {
        let gamma = params.number("gamma").unwrap_or(1.0 / dims as f64);
        match params.text("kernel") {
            "linear" => Kernel::Linear,
            "polynomial" => Kernel::Polynomial {
                gamma,
                degree: params.usize("degree") as i32,
                coef0: params.float("coef0"),
            },
            _ => Kernel::Rbf { gamma },
        }
    }

    /// Runs the detector on one combination.
    pub fn run(self, m: &CombinationMatrix, params: &Hyperparameters, seed: u64) -> Result<MethodOutput, MethodError> {
        use AttributeType::{C, N, T};
        use MethodKind::*;
        let sig = m.spec.signature.as_slice();
        let unsupported = || MethodError::UnsupportedSignature {
            method: self.id(),
            signature: crate::dataset::signature_label(sig),
        };
        let numeric_cols = || -> Result<Vec<&[f64]>, MethodError> {
            if sig.iter().all(|t| *t == N) {
                Ok((0..sig.len()).map(|s| m.numbers(s)).collect())
            } else {
                Err(unsupported())
            }
        };
        let expect = |want: &[AttributeType]| if sig == want { Ok(()) } else { Err(unsupported()) };
        let (scores, detail) = match self {
            Iqr => {
                expect(&[N])?;
                let f = iqr_outlier_scores(m.numbers(0), params.float("fence"));
                let detail = MethodDetail::Fences {
                    lower: f.lower_fence,
                    upper: f.upper_fence,
                };
                (Scores::PerPoint(f.scores), Some(detail))
            }
            Zscore => {
                expect(&[N])?;
                (Scores::PerPoint(zscore_outlier_scores(m.numbers(0))), None)
            }
            Dbscan => {
                let cols = numeric_cols()?;
                let s = dbscan_outlier_scores(&cols, params.number("eps"), params.usize("min_pts"));
                (Scores::PerPoint(s), None)
            }
            IsolationForest => {
                let cols = numeric_cols()?;
                let s = isolation_forest_scores(&cols, params.usize("n_trees"), params.usize("subsample"), seed);
                (Scores::PerPoint(s), None)
            }
            Mahalanobis => (Scores::PerPoint(mahalanobis_scores(&numeric_cols()?)), None),
            KmeansDistance => {
                let cols = numeric_cols()?;
                let s = kmeans_distance_scores(&cols, params.usize("k"), params.usize("max_iter"), seed)?;
                (Scores::PerPoint(s), None)
            }
            KernelMeanDistance => {
                let cols = numeric_cols()?;
                let kernel = Self::kernel(params, cols.len());
                let s = kernel_mean_distance_scores(&cols, kernel, params.usize("reference_size"), seed);
                (Scores::PerPoint(s), None)
            }
            Pearson => {
                expect(&[N, N])?;
                let r = association::pearson_signed(m.numbers(0), m.numbers(1))?;
                (Scores::Scalar(r.abs().min(1.0)), Some(MethodDetail::statistic("r", r)))
            }
            Spearman => {
                expect(&[N, N])?;
                let rho = association::spearman_signed(m.numbers(0), m.numbers(1))?;
                (
                    Scores::Scalar(rho.abs().min(1.0)),
                    Some(MethodDetail::statistic("rho", rho)),
                )
            }
            MutualInformation => {
                let axis = |slot: usize| match sig[slot] {
                    N => Axis::Numerical(m.numbers(slot)),
                    _ => Axis::Categorical(m.codes(slot).0),
                };
                if sig.len() != 2 || sig.contains(&T) {
                    return Err(unsupported());
                }
                let mi = mutual_information(axis(0), axis(1), params.usize("bins"));
                (Scores::Scalar(mi), Some(MethodDetail::statistic("normalized_mi", mi)))
            }
            Skewness => {
                expect(&[N])?;
                let g1 = skewness_score(m.numbers(0))?;
                (
                    Scores::Scalar(squash(g1)),
                    Some(MethodDetail::statistic("abs_skewness", g1)),
                )
            }
            HeavyTail => {
                expect(&[N])?;
                let k = heavy_tail_score(m.numbers(0))?;
                (
                    Scores::Scalar(squash(k)),
                    Some(MethodDetail::statistic("excess_kurtosis", k)),
                )
            }
            TrendOls => {
                expect(&[T, N])?;
                let fit = trend_score(m.times(0), m.numbers(1))?;
                (
                    Scores::Scalar(fit.r_squared.clamp(0.0, 1.0)),
                    Some(MethodDetail::Trend(fit)),
                )
            }
            MannKendall => {
                expect(&[T, N])?;
                let tau = mann_kendall_score(m.times(0), m.numbers(1))?;
                (
                    Scores::Scalar(tau),
                    Some(MethodDetail::statistic("mann_kendall_tau", tau)),
                )
            }
            RollingResidual => {
                let groups = match sig {
                    [T, N] => None,
                    [T, N, C] => Some(m.codes(2).0),
                    _ => return Err(unsupported()),
                };
                let s = rolling_residual_outlier_scores(m.times(0), m.numbers(1), groups, params.usize("window"));
                (Scores::PerPoint(s), None)
            }
            Peaks => {
                expect(&[T, N])?;
                let s = peak_scores(
                    m.times(0),
                    m.numbers(1),
                    params.usize("window"),
                    params.float("threshold"),
                );
                (Scores::Subset(s), None)
            }
            Seasonality => {
                expect(&[T, N])?;
                let s = seasonality_score(m.times(0), m.numbers(1))?;
                (Scores::Scalar(s.score), Some(MethodDetail::Seasonality(s)))
            }
            Granger => {
                expect(&[T, N, N])?;
                let g = granger_causality_score(m.times(0), m.numbers(1), m.numbers(2), params.usize("lag"))?;
                let detail = MethodDetail::Granger {
                    p_forward: g.p_forward,
                    p_backward: g.p_backward,
                    forward_is_stronger: g.forward_is_stronger(),
                };
                (Scores::Scalar(g.score), Some(detail))
            }
            CramersV => {
                expect(&[C, C])?;
                let v = cramers_v(m.codes(0).0, m.codes(1).0)?;
                (Scores::Scalar(v), Some(MethodDetail::statistic("cramers_v", v)))
            }
            ChisqResidual => {
                expect(&[C, C])?;
                let ((xc, xl), (yc, yl)) = (m.codes(0), m.codes(1));
                let out = chisq_residual_outlier_scores(xc, yc, params.float("threshold"));
                let cells = out
                    .cells
                    .iter()
                    .map(|c| CellDetail {
                        x: xl[c.x_code as usize].clone(),
                        y: yl[c.y_code as usize].clone(),
                        observed: c.observed,
                        expected: c.expected,
                        residual: c.residual,
                    })
                    .collect();
                (Scores::Subset(out.rows), Some(MethodDetail::Cells { cells }))
            }
            GroupDifference => {
                expect(&[C, N])?;
                let s = group_difference_score(m.codes(0).0, m.numbers(1))?;
                (
                    Scores::Scalar(s),
                    Some(MethodDetail::statistic("kruskal_wallis_1mp", s)),
                )
            }
        };
        if !scores.all_finite() {
            return Err(MethodError::InvalidInput(format!(
                "{} produced non-finite scores",
                self.id()
            )));
        }
        Ok(MethodOutput {
            method_id: self.id().to_string(),
            scores,
            higher_is_more_insightful: true,
            detail,
        })
    }
}

/// Checks the `methods` section of a config: every key must name a known
/// method and every value must satisfy that method's schema.
pub fn validate_overrides(overrides: &MethodOverrides) -> Result<(), ConfigError> {
    Registry::new(overrides).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, Dataset};

    fn matrix(columns: Vec<Column>, signature: &[AttributeType]) -> CombinationMatrix {
        let n = columns.len();
        let ds = Dataset::new("t", columns).unwrap();
        CombinationMatrix::from_dataset(&ds, signature, &(0..n).collect::<Vec<_>>())
    }

    fn defaults(kind: MethodKind) -> Hyperparameters {
        Hyperparameters::resolve(kind.param_schema(), None).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for &k in MethodKind::ALL {
            assert_eq!(MethodKind::from_id(k.id()), Some(k));
        }
        assert_eq!(MethodKind::ALL.len(), 21);
        assert_eq!(MethodKind::from_id("lof"), None);
    }

    #[test]
    fn per_point_length_matches_rows() {
        let x: Vec<Option<f64>> = (0..20).map(|i| Some((i * 7 % 11) as f64)).collect();
        let y: Vec<Option<f64>> = (0..20).map(|i| Some((i * 3 % 5) as f64)).collect();
        let m = matrix(
            vec![Column::numerical("x", x), Column::numerical("y", y)],
            &[AttributeType::N, AttributeType::N],
        );
        for kind in [MethodKind::Dbscan, MethodKind::IsolationForest, MethodKind::Mahalanobis] {
            let out = kind.run(&m, &defaults(kind), 1).unwrap();
            assert_eq!(out.scores.values().len(), 20);
            assert!(out.higher_is_more_insightful);
        }
    }

    #[test]
    fn signature_mismatch_is_rejected() {
        let x: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        let m = matrix(vec![Column::numerical("x", x)], &[AttributeType::N]);
        let err = MethodKind::Pearson
            .run(&m, &defaults(MethodKind::Pearson), 0)
            .unwrap_err();
        assert!(matches!(err, MethodError::UnsupportedSignature { .. }));
    }

    #[test]
    fn pearson_output_on_perfect_line() {
        let x: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        let y: Vec<Option<f64>> = (0..10).map(|i| Some(2.0 * i as f64)).collect();
        let m = matrix(
            vec![Column::numerical("x", x), Column::numerical("y", y)],
            &[AttributeType::N, AttributeType::N],
        );
        let out = MethodKind::Pearson.run(&m, &defaults(MethodKind::Pearson), 0).unwrap();
        assert!(matches!(out.scores, Scores::Scalar(s) if (s - 1.0).abs() < 1e-12));
    }
}
