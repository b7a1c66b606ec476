use super::*;
use crate::dataset::AttributeType::{C, N, T};
use crate::dataset::Column;
use crate::methods::OutputShape;
use crate::methods::{catalog, Hyperparameters, MethodKind, TrendFit};
use crate::ranking::{InsightCandidate, MethodSummary, PointRankAggregate, RowRank};

fn spec(sig: &[AttributeType], cols: &[&str]) -> CombinationSpec {
    CombinationSpec {
        signature: sig.to_vec(),
        column_names: cols.iter().map(|s| s.to_string()).collect(),
    }
}

fn summary(id: &str, detail: Option<MethodDetail>) -> MethodSummary {
    MethodSummary {
        method_id: id.into(),
        output_shape: OutputShape::Scalar,
        score_count: 1,
        normalized_mean: 0.5,
        detail,
    }
}

#[test]
fn every_catalog_signature_has_a_unique_rank_one_chart() {
    for t in catalog() {
        for b in t.bindings {
            let cols: Vec<String> = (0..b.signature.len()).map(|i| format!("c{i}")).collect();
            let combo = CombinationSpec {
                signature: b.signature.to_vec(),
                column_names: cols,
            };
            let charts = infer_charts(&combo).unwrap();
            assert!(!charts.is_empty());
            assert!(charts.iter().skip(1).all(|c| c.weight < charts[0].weight));
            for c in &charts {
                assert!(c.encodings.contains_key(&Channel::X));
                assert!(c.encodings.values().all(|v| combo.column_names.contains(v)));
            }
        }
    }
}

#[test]
fn weight_table_lookups() {
    let nn = infer_charts(&spec(&[N, N], &["a", "b"])).unwrap();
    assert_eq!(nn[0].chart_type, ChartType::Scatter);
    let tn = infer_charts(&spec(&[T, N], &["t", "v"])).unwrap();
    assert_eq!(tn[0].chart_type, ChartType::Line);
    let cn: Vec<ChartType> = infer_charts(&spec(&[C, N], &["g", "v"]))
        .unwrap()
        .iter()
        .map(|c| c.chart_type)
        .collect();
    assert_eq!(cn, [ChartType::Box, ChartType::Bar, ChartType::Strip]);
    assert!(matches!(
        infer_charts(&spec(&[C, C, C], &["a", "b", "c"])),
        Err(VizError::NoChartRule(_))
    ));
}

#[test]
fn outlier_marks_follow_average_rank() {
    let mut cand = InsightCandidate::from_phi("two_variable_outliers", spec(&[N, N], &["a", "b"]), 0.5, 0.9);
    cand.point_ranks = Some(PointRankAggregate {
        rows: vec![
            RowRank {
                row_id: 0,
                avg_rank: 1.5,
                score: 0.9,
            },
            RowRank {
                row_id: 1,
                avg_rank: 1.5,
                score: 0.8,
            },
            RowRank {
                row_id: 2,
                avg_rank: 3.0,
                score: 0.1,
            },
        ],
        contributing_method_ids: vec!["dbscan".into(), "isolation_forest".into()],
        row_count: 3,
    });
    let chart = infer_charts(&cand.combination).unwrap().remove(0);
    let chart = annotate(&cand, chart, 2);
    let marked: Vec<usize> = chart
        .annotations
        .iter()
        .filter(|a| a.kind == AnnotationKind::PointHighlight)
        .flat_map(|a| match &a.target {
            AnnotationTarget::Rows { row_ids } => row_ids.clone(),
            _ => vec![],
        })
        .collect();
    assert_eq!(marked, [0, 1]);
    assert!(chart.insight_sentence.starts_with("Row 0 is the strongest outlier"));
}

#[test]
fn time_series_outlier_chart_is_an_annotated_line() {
    let mut cand = InsightCandidate::from_phi("time_series_outliers", spec(&[T, N], &["t", "v"]), 0.5, 0.9);
    cand.point_ranks = Some(PointRankAggregate {
        rows: vec![RowRank {
            row_id: 4,
            avg_rank: 1.0,
            score: 1.0,
        }],
        contributing_method_ids: vec!["rolling_residual".into()],
        row_count: 10,
    });
    let chart = annotate(&cand, infer_charts(&cand.combination).unwrap().remove(0), 5);
    assert_eq!(chart.chart_type, ChartType::Line);
    assert_eq!(chart.annotations[0].kind, AnnotationKind::PointHighlight);
}

#[test]
fn trend_line_passes_coefficients_through() {
    let mut cand = InsightCandidate::from_phi("trend", spec(&[T, N], &["t", "v"]), 0.9, 0.9);
    let fit = TrendFit {
        r_squared: 0.9,
        slope: 2.0,
        intercept: 1.0,
    };
    cand.methods = vec![summary("trend_ols", Some(MethodDetail::Trend(fit)))];
    let chart = annotate(&cand, infer_charts(&cand.combination).unwrap().remove(0), 5);
    assert_eq!(chart.annotations.len(), 1);
    assert_eq!(chart.annotations[0].kind, AnnotationKind::TrendLine);
    assert_eq!(chart.annotations[0].target, AnnotationTarget::Line { a: 2.0, b: 1.0 });
    let json = serde_json::to_value(&chart.annotations[0]).unwrap();
    assert_eq!(json["target"], serde_json::json!({"a": 2.0, "b": 1.0}));
}

#[test]
fn scalar_insight_gets_sentence_but_no_marks() {
    let x: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
    let y: Vec<Option<f64>> = (0..10).map(|i| Some(2.0 * i as f64)).collect();
    let ds = Dataset::new("d", vec![Column::numerical("x", x), Column::numerical("y", y)]).unwrap();
    let combo = spec(&[N, N], &["x", "y"]);
    let m = crate::dataset::CombinationMatrix::from_dataset(&ds, &[N, N], &[0, 1]);
    let params = Hyperparameters::resolve(MethodKind::Pearson.param_schema(), None).unwrap();
    let out = MethodKind::Pearson.run(&m, &params, 0).unwrap();
    let cand =
        InsightCandidate::from_outputs("linear_correlation", combo.clone(), &[out], &m.row_ids, 0.9, None).unwrap();
    let chart = annotate(&cand, infer_charts(&combo).unwrap().remove(0), 5);
    assert!(chart.annotations.is_empty());
    assert!(
        chart.insight_sentence.starts_with("Pearson |r| = 1.00"),
        "{}",
        chart.insight_sentence
    );
}

#[test]
fn inline_data_is_capped_and_keeps_marked_rows() {
    let n = 5000;
    let x: Vec<Option<f64>> = (0..n).map(|i| Some(i as f64)).collect();
    let mut y: Vec<Option<f64>> = (0..n).map(|i| Some((i % 17) as f64)).collect();
    y[10] = None;
    let ds = Dataset::new("d", vec![Column::numerical("x", x), Column::numerical("y", y)]).unwrap();
    let combo = spec(&[N, N], &["x", "y"]);
    let mut chart = infer_charts(&combo).unwrap().remove(0);
    let marked = [3, 4999, 2500];
    chart.annotations = marked
        .iter()
        .map(|&r| AnnotationSpec {
            kind: AnnotationKind::PointHighlight,
            target: AnnotationTarget::Rows { row_ids: vec![r] },
            label: String::new(),
        })
        .collect();
    let a = attach_data(chart.clone(), &ds, &combo, 9);
    assert_eq!(a.inline_data.rows.len(), MAX_INLINE_ROWS);
    assert_eq!(a.inline_data.total_rows, n - 1);
    assert!(marked.iter().all(|r| a.inline_data.row_ids.contains(r)));
    assert!(!a.inline_data.row_ids.contains(&10));
    assert!(a.inline_data.row_ids.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(a, attach_data(chart, &ds, &combo, 9));
}

#[test]
fn inline_values_render_by_type() {
    let ds = Dataset::new(
        "d",
        vec![
            Column::temporal("t", vec![Some(0), Some(86_400)]),
            Column::categorical("g", &[Some("a"), Some("b")]),
        ],
    )
    .unwrap();
    let combo = spec(&[T, C], &["t", "g"]);
    let chart = ChartSpec {
        chart_type: ChartType::Line,
        encodings: BTreeMap::new(),
        aggregate: None,
        weight: 1.0,
        inline_data: InlineData::default(),
        annotations: vec![],
        title: String::new(),
        insight_sentence: String::new(),
    };
    let a = attach_data(chart, &ds, &combo, 0);
    assert_eq!(
        a.inline_data.rows[1],
        vec![Value::from("1970-01-02T00:00:00Z"), Value::from("b")]
    );
}
