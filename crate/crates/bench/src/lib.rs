//! Shared inputs for the criterion benches.

use insightrank_core::dataset::CombinationSpec;
use insightrank_core::methods::catalog;
use insightrank_core::ranking::InsightCandidate;
use insightrank_core::{synthetic, Dataset};

/// Mixed-type table with `n` rows.
pub fn mixed_dataset(n: usize) -> Dataset {
    synthetic::weather(n, 42)
}

/// `n` scored candidates for the insight type at catalog index `type_idx`,
/// spread over its signatures, with scores from a cheap LCG.
pub fn candidate_pool(type_idx: usize, n: usize) -> Vec<InsightCandidate> {
    let t = &catalog()[type_idx];
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    (0..n)
        .map(|i| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            let phi = (state >> 11) as f64 / (1u64 << 53) as f64;
            let sig = t.bindings[i % t.bindings.len()].signature;
            let spec = CombinationSpec {
                signature: sig.to_vec(),
                column_names: sig.iter().enumerate().map(|(s, _)| format!("c{i}_{s}")).collect(),
            };
            InsightCandidate::from_phi(t.id, spec, phi, 0.9)
        })
        .collect()
}
