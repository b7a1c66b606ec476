pub mod config;
pub mod dataset;
pub mod engine;
pub mod methods;
pub mod ranking;
mod stats;
pub mod synthetic;
pub mod vizrec;

pub use config::{Config, ConfigError};
pub use dataset::{load_csv, load_csv_reader, AttributeType, Column, Dataset, DatasetError, IngestConfig};
pub use engine::{analyze, analyze_with, Analysis, AnalyzeOptions, EngineError, Recommendations};
pub use methods::{catalog, MethodKind, MethodOutput, Scores};
pub use ranking::{InsightCandidate, InsightTypeRow};
pub use vizrec::{ChartSpec, ChartType};
