//! Isolation forest anomaly scores.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Average path length of an unsuccessful binary-search-tree lookup over `n`
/// points, used to normalize path lengths.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let n = n as f64;
            2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
        }
    }
}

enum Node {
    Leaf {
        size: usize,
    },
    Split {
        attr: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn grow(points: &[Vec<f64>], sample: Vec<usize>, height_limit: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = Tree { nodes: Vec::new() };
        tree.build(points, sample, 0, height_limit, rng);
        tree
    }

    fn build(
        &mut self,
        points: &[Vec<f64>],
        rows: Vec<usize>,
        depth: usize,
        height_limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: rows.len() });
        if depth >= height_limit || rows.len() <= 1 {
            return id;
        }
        let d = points[rows[0]].len();
        let ranges: Vec<(usize, f64, f64)> = (0..d)
            .filter_map(|a| {
                let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    (lo.min(points[r][a]), hi.max(points[r][a]))
                });
                (hi > lo).then_some((a, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (attr, lo, hi) = ranges[rng.random_range(0..ranges.len())];
        let value = rng.random_range(lo..hi);
        let (l, r): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| points[i][attr] < value);
        let left = self.build(points, l, depth + 1, height_limit, rng);
        let right = self.build(points, r, depth + 1, height_limit, rng);
        self.nodes[id] = Node::Split {
            attr,
            value,
            left,
            right,
        };
        id
    }

    fn path_length(&self, x: &[f64]) -> f64 {
        let mut node = 0;
        let mut depth = 0.0;
        loop {
            match self.nodes[node] {
                Node::Leaf { size } => return depth + average_path_length(size),
                Node::Split {
                    attr,
                    value,
                    left,
                    right,
                } => {
                    node = if x[attr] < value { left } else { right };
                    depth += 1.0;
                }
            }
        }
    }
}

/// Anomaly score `2^(−E[h(x)] / c(ψ))` in `(0, 1)` from an isolation forest
/// of `n_trees` trees, each grown on `subsample` rows drawn without
/// replacement. Tree `t` uses its own stream of the seeded generator, so the
/// result does not depend on thread scheduling.
pub fn isolation_forest_scores(cols: &[&[f64]], n_trees: usize, subsample: usize, seed: u64) -> Vec<f64> {
    let n = cols[0].len();
    let points: Vec<Vec<f64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let psi = subsample.min(n).max(2).min(n);
    let height_limit = (psi as f64).log2().ceil() as usize;
    let per_tree: Vec<Vec<f64>> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let sample = rand::seq::index::sample(&mut rng, n, psi).into_vec();
            let tree = Tree::grow(&points, sample, height_limit, &mut rng);
            points.iter().map(|p| tree.path_length(p)).collect()
        })
        .collect();
    let c = average_path_length(psi).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|i| {
            let mean = per_tree.iter().map(|t| t[i]).sum::<f64>() / n_trees as f64;
            2f64.powf(-mean / c)
        })
        .collect()
}
