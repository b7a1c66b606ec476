use proptest::prelude::*;

use super::*;
use crate::dataset::AttributeType::{self, C, N, T};
use crate::methods::catalog::insight_type;
use crate::methods::Scores;

fn output(scores: Scores) -> MethodOutput {
    MethodOutput {
        method_id: "m".into(),
        scores,
        higher_is_more_insightful: true,
        detail: None,
    }
}

fn arb_scores(n: usize) -> impl Strategy<Value = Scores> {
    prop_oneof![
        prop::collection::vec(-50.0..50.0f64, n).prop_map(Scores::PerPoint),
        prop::collection::btree_map(0..n, -5.0..5.0f64, 0..n).prop_map(|m| Scores::Subset(m.into_iter().collect())),
        (0.0..=1.0f64).prop_map(Scores::Scalar),
    ]
}

fn arb_outputs() -> impl Strategy<Value = Vec<MethodOutput>> {
    (2..30usize).prop_flat_map(|n| prop::collection::vec(arb_scores(n).prop_map(output), 1..5))
}

/// Direct evaluation of φ from raw outputs: normalize into a fresh vector,
/// then average per method and across methods.
fn phi_oracle(outputs: &[MethodOutput]) -> f64 {
    let mut total = 0.0;
    for o in outputs {
        let raw: Vec<f64> = match &o.scores {
            Scores::PerPoint(v) => v.clone(),
            Scores::Subset(v) => v.iter().map(|p| p.1).collect(),
            Scores::Scalar(s) => {
                total += s;
                continue;
            }
        };
        if raw.is_empty() {
            continue;
        }
        let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let g: Vec<f64> = raw
            .iter()
            .map(|s| if hi == lo { 0.0 } else { (s - lo) / (hi - lo) })
            .collect();
        total += g.iter().sum::<f64>() / g.len() as f64;
    }
    total / outputs.len() as f64
}

proptest! {
    #[test]
    fn phi_matches_direct_evaluation(outputs in arb_outputs(), lambda in 0.01..=1.0f64, arity in 1..5usize) {
        let normalized: Vec<_> = outputs.iter().map(|o| normalize_method_output(o).unwrap()).collect();
        let two_pass = aggregate_phi(&normalized).unwrap();
        let means: Vec<f64> = outputs.iter().map(|o| summarize(o).unwrap().normalized_mean).collect();
        let streaming = phi_from_means(&means);
        let oracle = phi_oracle(&outputs);
        prop_assert!((two_pass - oracle).abs() < 1e-12);
        prop_assert!((streaming - oracle).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&streaming));
        let p = complexity_penalty(streaming, arity, lambda);
        prop_assert!((0.0..=1.0).contains(&p) && p <= streaming);
    }

    #[test]
    fn uniform_counts_recover_the_flat_mean(
        g in (1..20usize, 1..5usize).prop_flat_map(|(n, f)| prop::collection::vec(prop::collection::vec(0.0..=1.0f64, n), f))
    ) {
        let outputs: Vec<_> = g.iter().map(|v| output(Scores::PerPoint(v.clone()))).collect();
        let z = (g.len() * g[0].len()) as f64;
        let flat = g.iter().flatten().sum::<f64>() / z;
        prop_assert!((aggregate_phi(&outputs).unwrap() - flat).abs() < 1e-12);
    }

    #[test]
    fn phi_is_monotone(
        g in (1..10usize, 1..4usize).prop_flat_map(|(n, f)| prop::collection::vec(prop::collection::vec(0.0..=1.0f64, n), f)),
        which in any::<prop::sample::Index>(),
        bump in 0.0..=1.0f64,
    ) {
        let outputs: Vec<_> = g.iter().map(|v| output(Scores::PerPoint(v.clone()))).collect();
        let before = aggregate_phi(&outputs).unwrap();
        let mut h = g.clone();
        let i = which.index(h.len() * h[0].len());
        let cell = &mut h[i / g[0].len()][i % g[0].len()];
        *cell = (*cell + bump).min(1.0);
        let after = aggregate_phi(&h.iter().map(|v| output(Scores::PerPoint(v.clone()))).collect::<Vec<_>>()).unwrap();
        prop_assert!(after >= before - 1e-15);
    }

    #[test]
    fn mean_rank_is_midpoint(perms in (2..40usize, 1..5usize).prop_flat_map(|(n, f)| {
        prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), f)
    })) {
        let n = perms[0].len();
        let outputs: Vec<_> = perms
            .iter()
            .map(|p| output(Scores::PerPoint(p.iter().map(|&v| v as f64).collect())))
            .collect();
        let ids: Vec<usize> = (0..n).collect();
        let agg = average_point_ranks(&outputs, &ids).unwrap();
        let mean = agg.rows.iter().map(|r| r.avg_rank).sum::<f64>() / n as f64;
        prop_assert!((mean - (n as f64 + 1.0) / 2.0).abs() < 1e-9);
        prop_assert!(agg.rows.iter().all(|r| r.avg_rank >= 1.0 && r.avg_rank <= n as f64));
    }
}

const TYPES: &[&str] = &["two_variable_outliers", "time_series_outliers", "trend"];

fn signature_of(type_id: &str, which: usize) -> Vec<AttributeType> {
    let t = insight_type(type_id).unwrap();
    t.bindings[which % t.bindings.len()].signature.to_vec()
}

/// Random pool for one insight type: distinct combinations per signature and
/// scores drawn from a coarse grid (many ties) or continuously.
fn arb_pool() -> impl Strategy<Value = Vec<InsightCandidate>> {
    let cand = (0..4usize, 0..6usize, 0..6usize, 0..5usize, 0.0..1.0f64, any::<bool>());
    (0..TYPES.len(), prop::collection::vec(cand, 1..25)).prop_map(|(t, raw)| {
        let type_id = TYPES[t];
        let mut seen = std::collections::BTreeSet::new();
        let mut pool = Vec::new();
        for (sig, a, b, grid, cont, coarse) in raw {
            let signature = signature_of(type_id, sig);
            let cols: Vec<String> = signature
                .iter()
                .enumerate()
                .map(|(slot, ty)| format!("{ty}{}", [a, b, a + b][slot]))
                .collect();
            if !seen.insert((signature.clone(), cols.clone())) {
                continue;
            }
            let phi = if coarse { grid as f64 / 4.0 } else { cont };
            let spec = CombinationSpec {
                signature,
                column_names: cols,
            };
            pool.push(InsightCandidate::from_phi(type_id, spec, phi, 0.9));
        }
        pool
    })
}

/// Constructive oracle: take the best remaining score, split its tie class by
/// signature (catalog order), sort each list by column names and deal them
/// out round-robin.
fn rank_oracle(pool: &[InsightCandidate]) -> Vec<(Vec<AttributeType>, Vec<String>)> {
    let mut left: Vec<&InsightCandidate> = pool.iter().collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let best = left
            .iter()
            .map(|c| c.group_normalized_score)
            .fold(f64::NEG_INFINITY, f64::max);
        let (tie, rest): (Vec<_>, Vec<_>) = left.into_iter().partition(|c| c.group_normalized_score == best);
        left = rest;
        let t = insight_type(&tie[0].insight_type_id).unwrap();
        let mut lists: Vec<Vec<&InsightCandidate>> = t
            .bindings
            .iter()
            .map(|b| {
                tie.iter()
                    .copied()
                    .filter(|c| c.combination.signature == b.signature)
                    .collect()
            })
            .collect();
        for l in lists.iter_mut() {
            l.sort_by(|x, y| x.combination.column_names.cmp(&y.combination.column_names));
        }
        let rounds = lists.iter().map(Vec::len).max().unwrap_or(0);
        for r in 0..rounds {
            for l in &lists {
                if let Some(c) = l.get(r) {
                    out.push((c.combination.signature.clone(), c.combination.column_names.clone()));
                }
            }
        }
    }
    out
}

fn keys(ranked: &[InsightCandidate]) -> Vec<(Vec<AttributeType>, Vec<String>)> {
    ranked
        .iter()
        .map(|c| (c.combination.signature.clone(), c.combination.column_names.clone()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn within_type_ranking_matches_oracle(pool in arb_pool(), seed in any::<u64>()) {
        let mut pool = pool;
        group_minmax(&mut pool);
        let expected = rank_oracle(&pool);
        prop_assert_eq!(keys(&rank_insights(pool.clone())), expected.clone());
        // input order never matters
        let mut shuffled = pool;
        let len = shuffled.len();
        for i in 0..len {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % len);
        }
        prop_assert_eq!(keys(&rank_insights(shuffled)), expected);
    }

    #[test]
    fn diversity_guarantee(pool in arb_pool()) {
        let mut pool = pool;
        // continuous scores only, so each signature has a unique maximum
        for (i, c) in pool.iter_mut().enumerate() {
            c.penalized_phi = ((i as f64 * 0.618_033_988_75) % 1.0) * 0.9 + 0.05;
        }
        group_minmax(&mut pool);
        let sigs: std::collections::BTreeSet<_> = pool.iter().map(|c| c.combination.signature.clone()).collect();
        for s in &sigs {
            let ones = pool.iter().filter(|c| &c.combination.signature == s && c.group_normalized_score == 1.0).count();
            prop_assert_eq!(ones, 1);
        }
        let ranked = rank_insights(pool);
        let head: std::collections::BTreeSet<_> = ranked[..sigs.len()].iter().map(|c| c.combination.signature.clone()).collect();
        prop_assert_eq!(head.len(), sigs.len());
        prop_assert!(ranked.iter().all(|c| (0.0..=1.0).contains(&c.group_normalized_score)));
    }

    #[test]
    fn type_ranking_matches_oracle(psis in prop::collection::vec(prop_oneof![0.0..1.0f64, (0..3u8).prop_map(|k| k as f64 / 2.0)], 14)) {
        let cat = crate::methods::catalog();
        let rows: Vec<InsightTypeRow> = cat
            .iter()
            .zip(&psis)
            .rev()
            .map(|(t, &psi)| InsightTypeRow {
                insight_type_id: t.id.into(),
                display_name: t.display_name.into(),
                psi,
                candidate_pool_size: 1,
                ranked_candidates: vec![],
            })
            .collect();
        let ranked = rank_insight_types(rows);
        // brute force: selection of the max psi, earliest catalog index on ties
        let mut remaining: Vec<usize> = (0..cat.len()).collect();
        let mut expected = Vec::new();
        while !remaining.is_empty() {
            let mut best = 0;
            for k in 1..remaining.len() {
                if psis[remaining[k]] > psis[remaining[best]] {
                    best = k;
                }
            }
            expected.push(cat[remaining.remove(best)].id.to_string());
        }
        let got: Vec<String> = ranked.iter().map(|r| r.insight_type_id.clone()).collect();
        prop_assert_eq!(got, expected);
        for w in ranked.windows(2) {
            prop_assert!(w[0].psi >= w[1].psi);
        }
    }
}

#[test]
fn build_row_truncates_and_keeps_pool_size() {
    let pool: Vec<_> = (0..8)
        .map(|i| {
            let spec = CombinationSpec {
                signature: vec![N, N],
                column_names: vec![format!("a{i}"), format!("b{i}")],
            };
            InsightCandidate::from_phi("linear_correlation", spec, i as f64 / 10.0, 0.9)
        })
        .collect();
    let row = build_insight_type_row("linear_correlation", "Linear correlation", pool, 3).unwrap();
    assert_eq!(row.candidate_pool_size, 8);
    assert_eq!(row.ranked_candidates.len(), 3);
    assert!((row.psi - 0.35).abs() < 1e-12);
    assert_eq!(row.ranked_candidates[0].combination.column_names, ["a7", "b7"]);
    assert!(build_insight_type_row("skew", "Skew", vec![], 3).is_none());
}

#[test]
fn arity_penalty_applies_to_candidates() {
    let spec = CombinationSpec {
        signature: vec![T, N, C],
        column_names: vec!["t".into(), "v".into(), "g".into()],
    };
    let c = InsightCandidate::from_phi("time_series_outliers", spec, 0.5, 0.9);
    assert!((c.penalized_phi - 0.45).abs() < 1e-12);
}
