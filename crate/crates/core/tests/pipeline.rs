use std::collections::BTreeSet;

use insightrank_core::dataset::{enumerate_combinations, AttributeType, Column};
use insightrank_core::{analyze, load_csv, synthetic, Config, Dataset, IngestConfig};
use proptest::prelude::*;

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    let col = (0..3u8, prop::collection::vec(prop::option::weighted(0.9, 0..4u8), 30));
    prop::collection::vec(col, 1..6).prop_map(|cols| {
        let columns = cols
            .into_iter()
            .enumerate()
            .map(|(i, (kind, cells))| match kind {
                0 => Column::numerical(format!("n{i}"), cells.iter().map(|c| c.map(f64::from)).collect()),
                1 => {
                    let v: Vec<Option<String>> = cells.iter().map(|c| c.map(|k| format!("k{k}"))).collect();
                    Column::categorical(format!("c{i}"), &v)
                }
                _ => Column::temporal(
                    format!("t{i}"),
                    cells.iter().map(|c| c.map(|k| i64::from(k) * 3600)).collect(),
                ),
            })
            .collect();
        Dataset::new("arb", columns).unwrap()
    })
}

fn arb_signature() -> impl Strategy<Value = Vec<AttributeType>> {
    prop::collection::vec(
        prop_oneof![Just(AttributeType::N), Just(AttributeType::C), Just(AttributeType::T)],
        1..4,
    )
}

proptest! {
    #[test]
    fn combinations_respect_signature_and_caps(
        ds in arb_dataset(),
        sig in arb_signature(),
        cap in 1..20usize,
        min_rows in 1..25usize,
    ) {
        let combos = enumerate_combinations(&ds, &sig, cap, min_rows).unwrap();
        prop_assert!(combos.len() <= cap);
        let mut seen = BTreeSet::new();
        for m in &combos {
            prop_assert_eq!(&m.spec.signature, &sig);
            let names: BTreeSet<&String> = m.spec.column_names.iter().collect();
            prop_assert_eq!(names.len(), sig.len(), "a column appears twice");
            prop_assert!(seen.insert(m.spec.column_names.clone()));
            for (name, ty) in m.spec.column_names.iter().zip(&sig) {
                prop_assert_eq!(ds.column(name).unwrap().attr_type, *ty);
            }
            prop_assert!(m.row_count() >= min_rows);
            prop_assert!(m.row_ids.windows(2).all(|w| w[0] < w[1]));
            for s in &m.series {
                prop_assert_eq!(s.len(), m.row_count());
            }
            // kept rows are exactly those with every member present
            let expected: Vec<usize> = (0..ds.row_count())
                .filter(|&r| m.spec.column_names.iter().all(|c| !ds.column(c).unwrap().data.is_missing(r)))
                .map(|r| ds.row_ids()[r])
                .collect();
            prop_assert_eq!(&m.row_ids, &expected);
        }
    }
}

#[test]
fn filtered_candidates_are_a_subset_of_the_full_pool() {
    let ds = synthetic::weather(300, 8);
    let a = analyze(
        &ds,
        &Config {
            max_rows: 300,
            ..Config::default()
        },
    )
    .unwrap();
    let full = a.recommendations(&[], 14, 1000).unwrap();
    let all: BTreeSet<(String, Vec<String>)> = full
        .rows
        .iter()
        .flat_map(|r| {
            r.insights
                .iter()
                .map(move |i| (r.insight_type.clone(), i.combination.columns.clone()))
        })
        .collect();
    for col in ds.columns() {
        let rec = a.recommendations(std::slice::from_ref(&col.name), 14, 1000).unwrap();
        assert!(rec.is_psi_ordered());
        for row in &rec.rows {
            for ins in &row.insights {
                assert!(all.contains(&(row.insight_type.clone(), ins.combination.columns.clone())));
                assert!(ins.combination.columns.contains(&col.name));
            }
        }
    }
}

#[test]
fn csv_file_to_recommendations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weather.csv");
    std::fs::write(&path, synthetic::to_csv(&synthetic::weather(250, 1))).unwrap();
    let cfg = Config::default();
    let ds = load_csv(&path, &IngestConfig::from(&cfg)).unwrap();
    assert_eq!(ds.name, "weather");
    let rec = analyze(&ds, &cfg).unwrap().default_recommendations();
    assert!(!rec.empty);
    assert!(rec.rows.len() <= cfg.top_r);
    assert!(rec
        .rows
        .iter()
        .all(|r| r.insights.len() <= cfg.top_k && r.insights[0].rank == 1));
    for ins in rec.rows.iter().flat_map(|r| &r.insights) {
        assert!((0.0..=1.0).contains(&ins.phi));
        assert!(ins.penalized_phi <= ins.phi);
        assert!((0.0..=1.0).contains(&ins.score));
        assert!(ins.chart.inline_data.rows.len() <= 2000);
    }
}
