use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError};

/// Uniform reservoir sample of `max_rows` rows, kept in input order.
///
/// Datasets at or below the limit are returned unchanged. The selection
/// depends only on `seed` and the input row order.
pub fn sample_rows(ds: &Dataset, max_rows: usize, seed: u64) -> Result<Dataset, DatasetError> {
    if max_rows < 100 {
        return Err(DatasetError::SampleTooSmall(max_rows));
    }
    let n = ds.row_count();
    if n <= max_rows {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<usize> = (0..max_rows).collect();
    for i in max_rows..n {
        let j = rng.random_range(0..=i);
        if j < max_rows {
            reservoir[j] = i;
        }
    }
    reservoir.sort_unstable();
    Ok(ds.select_rows(&reservoir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;

    fn numbered(n: usize) -> Dataset {
        Dataset::new(
            "n",
            vec![Column::numerical("v", (0..n).map(|i| Some(i as f64)).collect())],
        )
        .unwrap()
    }

    #[test]
    fn identity_below_limit() {
        let ds = numbered(50);
        assert_eq!(sample_rows(&ds, 10_000, 1).unwrap(), ds);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let ds = numbered(100_000);
        let a = sample_rows(&ds, 10_000, 42).unwrap();
        let b = sample_rows(&ds, 10_000, 42).unwrap();
        let c = sample_rows(&ds, 10_000, 43).unwrap();
        assert_eq!(a.row_count(), 10_000);
        assert_eq!(a, b);
        assert_ne!(a.row_ids(), c.row_ids());
        assert!(a.row_ids().windows(2).all(|w| w[0] < w[1]));
        // values follow their original row ids
        if let crate::dataset::ColumnData::Numerical(v) = &a.columns()[0].data {
            for (id, val) in a.row_ids().iter().zip(v) {
                assert_eq!(val.unwrap(), *id as f64);
            }
        }
    }

    #[test]
    fn rejects_tiny_limit() {
        assert!(sample_rows(&numbered(10), 99, 0).is_err());
    }

    #[test]
    fn sample_is_roughly_uniform() {
        let ds = numbered(20_000);
        let s = sample_rows(&ds, 2_000, 9).unwrap();
        let first_half = s.row_ids().iter().filter(|&&r| r < 10_000).count();
        assert!((900..1100).contains(&first_half), "{first_half}");
    }
}
