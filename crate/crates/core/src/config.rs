//! Analysis configuration shared by the library, the CLI and the service.
//!
//! The on-disk form is a JSON document; every key is optional and falls back
//! to the defaults below. Unknown keys are rejected so that typos surface as
//! configuration errors instead of silently using defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::methods::params::ParamValue;

/// Per-method hyperparameter overrides, keyed by method id then parameter name.
pub type MethodOverrides = BTreeMap<String, BTreeMap<String, ParamValue>>;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown method `{0}` in method overrides")]
    UnknownMethod(String),
    #[error("method `{method}`: {reason}")]
    Hyperparameter { method: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Datasets larger than this are reservoir-sampled before analysis.
    pub max_rows: usize,
    pub seed: u64,
    /// Upper bound on distinct values for a categorical column.
    pub cardinality_cap: usize,
    /// Combinations kept per (insight-type, signature).
    pub combination_cap: usize,
    /// Combinations with fewer complete rows are not scored.
    pub min_rows: usize,
    pub top_r: usize,
    pub top_k: usize,
    /// Base of the arity penalty applied to insights over more than two attributes.
    pub penalty_lambda: f64,
    /// Maximum number of highlighted points per chart.
    pub max_marks: usize,
    pub methods: MethodOverrides,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            max_rows: 10_000,
            seed: 42,
            cardinality_cap: 50,
            combination_cap: 200,
            min_rows: 8,
            top_r: 10,
            top_k: 5,
            penalty_lambda: 0.9,
            max_marks: 5,
            methods: BTreeMap::new(),
        }
    }
}

impl Config {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: &str| {
            Err(ConfigError::Invalid {
                key: key.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.max_rows < 100 {
            return invalid("max_rows", "must be at least 100");
        }
        if self.cardinality_cap < 2 {
            return invalid("cardinality_cap", "must be at least 2");
        }
        if self.combination_cap == 0 {
            return invalid("combination_cap", "must be positive");
        }
        if self.min_rows < 2 {
            return invalid("min_rows", "must be at least 2");
        }
        if self.top_r == 0 {
            return invalid("top_r", "must be positive");
        }
        if self.top_k == 0 {
            return invalid("top_k", "must be positive");
        }
        if !(self.penalty_lambda > 0.0 && self.penalty_lambda <= 1.0) {
            return invalid("penalty_lambda", "must lie in (0, 1]");
        }
        crate::methods::validate_overrides(&self.methods)
    }

    /// Short stable hash of the canonical JSON form of this config.
    pub fn fingerprint(&self) -> String {
        // BTreeMap-backed fields give a canonical key order.
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
