//! End-to-end pipeline: sample, enumerate combinations, run every method,
//! score candidates, and serve ranked recommendations from the cached pool.

mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::config::{Config, ConfigError};
use crate::dataset::{enumerate_combinations, sample_rows, AttributeType, CombinationMatrix, Dataset, DatasetError};
use crate::methods::{catalog, MethodError, MethodKind, Registry};
use crate::ranking::{build_insight_type_row, rank_insight_types, InsightCandidate, RankingError};
use crate::stats::derive_seed;

pub use report::{ChartChoice, CombinationView, InsightView, MethodView, Recommendations, RowView};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("cannot build worker pool: {0}")]
    ThreadPool(String),
}

/// A candidate that could not be scored, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub insight_type_id: &'static str,
    pub combination: String,
    pub reason: String,
}

/// The scored candidate pool of one dataset. Immutable; recommendations for
/// any attribute filter are derived from it without re-running detectors.
#[derive(Debug, Clone)]
pub struct Analysis {
    dataset: Dataset,
    config: Config,
    fingerprint: String,
    /// One pool per catalog type, in catalog order.
    pools: Vec<Vec<InsightCandidate>>,
    skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

struct Task {
    type_idx: usize,
    signature: &'static [AttributeType],
    methods: &'static [MethodKind],
    combo: usize,
}

enum TaskError {
    Method(MethodError),
    Ranking(RankingError),
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskError::Method(e) => e.fmt(f),
            TaskError::Ranking(e) => e.fmt(f),
        }
    }
}

/// Point-rank rows kept per candidate for annotation.
fn kept_ranks(config: &Config) -> usize {
    config.max_marks.max(1) * 4
}

fn score_candidate(
    type_id: &'static str,
    matrix: &CombinationMatrix,
    methods: &[MethodKind],
    registry: &Registry,
    config: &Config,
) -> Result<InsightCandidate, TaskError> {
    let sig_label = crate::dataset::signature_label(&matrix.spec.signature);
    let combo_label = matrix.spec.label();
    let outputs = methods
        .iter()
        .map(|&kind| {
            let seed = derive_seed(config.seed, &[type_id, &sig_label, &combo_label, kind.id()]);
            kind.run(matrix, registry.params(kind), seed)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(TaskError::Method)?;
    InsightCandidate::from_outputs(
        type_id,
        matrix.spec.clone(),
        &outputs,
        &matrix.row_ids,
        config.penalty_lambda,
        Some(kept_ranks(config)),
    )
    .map_err(TaskError::Ranking)
}

/// Runs the whole pipeline on `ds` with the global thread pool.
pub fn analyze(ds: &Dataset, config: &Config) -> Result<Analysis, EngineError> {
    analyze_with(ds, config, AnalyzeOptions::default())
}

pub fn analyze_with(ds: &Dataset, config: &Config, options: AnalyzeOptions) -> Result<Analysis, EngineError> {
    config.validate()?;
    match options.threads {
        None => run(ds, config),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| EngineError::ThreadPool(e.to_string()))?
            .install(|| run(ds, config)),
    }
}

fn run(ds: &Dataset, config: &Config) -> Result<Analysis, EngineError> {
    let registry = Registry::new(&config.methods)?;
    let dataset = sample_rows(ds, config.max_rows, config.seed)?;
    let cat = catalog();

    let mut matrices: BTreeMap<&'static [AttributeType], Vec<CombinationMatrix>> = BTreeMap::new();
    let mut tasks = Vec::new();
    for (type_idx, t) in cat.iter().enumerate() {
        for b in t.bindings {
            if !matrices.contains_key(b.signature) {
                let combos = enumerate_combinations(&dataset, b.signature, config.combination_cap, config.min_rows)?;
                matrices.insert(b.signature, combos);
            }
            let combos = &matrices[b.signature];
            tasks.extend((0..combos.len()).map(|combo| Task {
                type_idx,
                signature: b.signature,
                methods: b.methods,
                combo,
            }));
        }
    }

    let results: Vec<Result<InsightCandidate, TaskError>> = tasks
        .par_iter()
        .map(|task| {
            let m = &matrices[task.signature][task.combo];
            score_candidate(cat[task.type_idx].id, m, task.methods, &registry, config)
        })
        .collect();

    let mut pools = vec![Vec::new(); cat.len()];
    let mut skipped = Vec::new();
    for (task, result) in tasks.iter().zip(results) {
        match result {
            Ok(c) => pools[task.type_idx].push(c),
            Err(e) => skipped.push(Skipped {
                insight_type_id: cat[task.type_idx].id,
                combination: matrices[task.signature][task.combo].spec.label(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(Analysis {
        dataset,
        fingerprint: config.fingerprint(),
        config: config.clone(),
        pools,
        skipped,
    })
}

impl Analysis {
    /// The analyzed (possibly sampled) dataset.
    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Candidates that failed a method precondition.
    pub fn skipped(&self) -> &[Skipped] {
        &self.skipped
    }

    /// Scored candidates of one insight type, in enumeration order.
    pub fn pool(&self, insight_type_id: &str) -> &[InsightCandidate] {
        catalog()
            .iter()
            .position(|t| t.id == insight_type_id)
            .map_or(&[][..], |i| &self.pools[i])
    }

    pub fn pool_size(&self) -> usize {
        self.pools.iter().map(Vec::len).sum()
    }

    /// The scored candidate of `insight_type_id` over exactly `columns`
    /// (in order), rendered with its rank-1 chart. `rank` and `score` are
    /// relative to the unfiltered pool.
    pub fn insight(&self, insight_type_id: &str, columns: &[String]) -> Option<InsightView> {
        let pool = self.pool(insight_type_id);
        let pos = pool.iter().position(|c| c.combination.column_names == columns)?;
        let row = build_insight_type_row(insight_type_id, "", pool.to_vec(), pool.len())?;
        let rank = row
            .ranked_candidates
            .iter()
            .position(|c| c.combination.column_names == columns)
            .map_or(pos, |r| r);
        Some(report::insight_view(self, &row.ranked_candidates[rank], rank + 1))
    }

    /// Recommendations with the configured `top_r` / `top_k` and no filter.
    pub fn default_recommendations(&self) -> Recommendations {
        self.recommendations(&[], self.config.top_r, self.config.top_k)
            .expect("an empty filter names no attribute")
    }

    /// Ranked rows restricted to candidates whose combination contains every
    /// attribute in `filter`. Ψ, group normalization and within-type ranks
    /// are recomputed over the filtered pools.
    pub fn recommendations(
        &self,
        filter: &[String],
        top_r: usize,
        top_k: usize,
    ) -> Result<Recommendations, EngineError> {
        if let Some(unknown) = filter.iter().find(|a| self.dataset.column(a).is_none()) {
            return Err(EngineError::UnknownAttribute(unknown.clone()));
        }
        let rows = catalog()
            .iter()
            .zip(&self.pools)
            .filter_map(|(t, pool)| {
                let kept: Vec<InsightCandidate> = pool
                    .iter()
                    .filter(|c| filter.iter().all(|a| c.combination.contains(a)))
                    .cloned()
                    .collect();
                build_insight_type_row(t.id, t.display_name, kept, top_k)
            })
            .collect();
        let mut rows = rank_insight_types(rows);
        rows.truncate(top_r);
        Ok(report::render(self, filter, top_r, top_k, rows))
    }
}
