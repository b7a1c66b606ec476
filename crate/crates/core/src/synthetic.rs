//! Seeded synthetic datasets with planted signals, for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::dataset::{Column, Dataset};

const DAY: i64 = 86_400;
/// 2020-01-01T00:00:00Z.
const START: i64 = 1_577_836_800;

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn numerical(name: &str, v: Vec<f64>) -> Column {
    Column::numerical(name, v.into_iter().map(Some).collect())
}

fn daily(name: &str, n: usize) -> Column {
    Column::temporal(name, (0..n as i64).map(|i| Some(START + i * DAY)).collect())
}

fn distinct_rows(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    rows.truncate(k);
    rows.sort_unstable();
    rows
}

/// Independent standard normals `x`, `y`; `planted` rows are moved to distance 8σ from the centre in random directions.
pub struct PlantedOutliers {
    pub dataset: Dataset,
    pub planted: Vec<usize>,
}

pub fn planted_bivariate_outliers(n: usize, seed: u64) -> PlantedOutliers {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = normals(&mut rng, n);
    let mut y = normals(&mut rng, n);
    let planted = distinct_rows(&mut rng, n, 5);
    for &r in &planted {
        let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        x[r] = 8.0 * angle.cos();
        y[r] = 8.0 * angle.sin();
    }
    let dataset =
        Dataset::new("planted_outliers", vec![numerical("x", x), numerical("y", y)]).expect("equal-length columns");
    PlantedOutliers { dataset, planted }
}

/// Five independent normals `a`..`e`, except `pair` which correlate at `r`.
pub struct PlantedCorrelation {
    pub dataset: Dataset,
    pub pair: (String, String),
}

pub fn planted_correlation(n: usize, r: f64, seed: u64) -> PlantedCorrelation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..5).map(|_| normals(&mut rng, n)).collect();
    let noise = normals(&mut rng, n);
    cols[3] = cols[1]
        .iter()
        .zip(&noise)
        .map(|(b, e)| r * b + (1.0 - r * r).sqrt() * e)
        .collect();
    let names = ["a", "b", "c", "d", "e"];
    let dataset = Dataset::new(
        "planted_correlation",
        names.iter().zip(cols).map(|(n, v)| numerical(n, v)).collect(),
    )
    .expect("equal-length columns");
    PlantedCorrelation {
        dataset,
        pair: ("b".into(), "d".into()),
    }
}

/// Daily `date` and `value` = linear trend + unit noise with one spike of
/// `spike_sigma`.
pub struct TrendSpike {
    pub dataset: Dataset,
    pub spike_row: usize,
}

pub fn trend_with_spike(n: usize, spike_sigma: f64, seed: u64) -> TrendSpike {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = normals(&mut rng, n);
    let spike_row = rng.random_range(n / 4..3 * n / 4);
    let slope = 6.0 / n as f64;
    let value: Vec<f64> = (0..n)
        .map(|i| {
            let base = 10.0 + slope * i as f64 + noise[i];
            if i == spike_row {
                base + spike_sigma
            } else {
                base
            }
        })
        .collect();
    let dataset =
        Dataset::new("trend_spike", vec![daily("date", n), numerical("value", value)]).expect("equal-length columns");
    TrendSpike { dataset, spike_row }
}

/// Contaminated, skewed and heavy-tailed columns with no shared structure.
pub fn outlier_heavy(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid");
    let mut cols = Vec::new();
    for name in ["m1", "m2", "m3", "m4"] {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let base: f64 = normal.sample(&mut rng);
                if rng.random_bool(0.02) {
                    base * 12.0
                } else {
                    base
                }
            })
            .collect();
        cols.push(numerical(name, v));
    }
    let lognormal: Vec<f64> = (0..n).map(|_| (1.2 * normal.sample(&mut rng)).exp()).collect();
    cols.push(numerical("spend", lognormal));
    Dataset::new("outlier_heavy", cols).expect("equal-length columns")
}

/// Gaussian columns driven by two shared latent factors, with monotone
/// nonlinear transforms of some of them.
pub fn correlation_heavy(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1 = normals(&mut rng, n);
    let f2 = normals(&mut rng, n);
    let mut col = |w1: f64, w2: f64, noise: f64| -> Vec<f64> {
        let e = normals(&mut rng, n);
        (0..n).map(|i| w1 * f1[i] + w2 * f2[i] + noise * e[i]).collect()
    };
    let c1 = col(1.0, 0.0, 0.2);
    let c2 = col(0.9, 0.1, 0.2);
    let c3 = col(0.0, 1.0, 0.2);
    let c4 = col(0.1, 0.9, 0.2);
    let c5: Vec<f64> = col(0.7, 0.7, 0.2).iter().map(|v| (v / 3.0).tanh()).collect();
    Dataset::new(
        "correlation_heavy",
        vec![
            numerical("c1", c1),
            numerical("c2", c2),
            numerical("c3", c3),
            numerical("c4", c4),
            numerical("c5", c5),
        ],
    )
    .expect("equal-length columns")
}

/// A mixed-type table resembling daily weather observations: `date`, four
/// numerical measurements, and categorical `weather` and `season`.
pub fn weather(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut temp = Vec::with_capacity(n);
    let mut wind = Vec::with_capacity(n);
    let mut precip = Vec::with_capacity(n);
    let mut humidity = Vec::with_capacity(n);
    let mut weather = Vec::with_capacity(n);
    let mut season = Vec::with_capacity(n);
    for i in 0..n {
        let phase = std::f64::consts::TAU * (i % 365) as f64 / 365.0;
        let t = 12.0 - 10.0 * phase.cos() + 2.0 * rng.sample::<f64, _>(StandardNormal);
        let rain = rng.random_bool(0.3);
        let p = if rain {
            (rng.sample::<f64, _>(StandardNormal)).exp() * 4.0
        } else {
            0.0
        };
        temp.push(t);
        precip.push(p);
        wind.push((3.0 + 1.5 * rng.sample::<f64, _>(StandardNormal)).abs() + if rain { 1.5 } else { 0.0 });
        humidity.push(60.0 + if rain { 20.0 } else { 0.0 } + 5.0 * rng.sample::<f64, _>(StandardNormal));
        weather.push(Some(if rain {
            "rain"
        } else if t < 2.0 {
            "snow"
        } else if rng.random_bool(0.5) {
            "sun"
        } else {
            "fog"
        }));
        season.push(Some(["winter", "spring", "summer", "autumn"][(i % 365) * 4 / 365]));
    }
    Dataset::new(
        "weather",
        vec![
            daily("date", n),
            numerical("temp", temp),
            numerical("precipitation", precip),
            numerical("wind", wind),
            numerical("humidity", humidity),
            Column::categorical("weather", &weather),
            Column::categorical("season", &season),
        ],
    )
    .expect("equal-length columns")
}

/// Renders a dataset as CSV text (temporal columns as ISO dates).
pub fn to_csv(ds: &Dataset) -> String {
    use crate::dataset::ColumnData;
    let mut out = ds
        .columns()
        .iter()
        .map(|c| c.name.as_str())
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for r in 0..ds.row_count() {
        let cells: Vec<String> = ds
            .columns()
            .iter()
            .map(|c| match &c.data {
                ColumnData::Numerical(v) => v[r].map_or(String::new(), |x| format!("{x}")),
                ColumnData::Categorical { codes, levels } => {
                    codes[r].map_or(String::new(), |k| levels[k as usize].clone())
                }
                ColumnData::Temporal(v) => v[r].map_or(String::new(), |t| {
                    chrono::DateTime::from_timestamp(t, 0)
                        .map(|d| d.format("%Y-%m-%d").to_string())
                        .unwrap_or_default()
                }),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
