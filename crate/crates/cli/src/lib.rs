//! Configuration-driven experiment runner on top of `doublewell-core`.
//!
//! Each experiment resolves an [`ExperimentConfig`], evaluates its grid on a
//! bounded worker pool, and writes long-format CSV files plus a
//! `manifest.json` into the output directory. Data files are byte-identical
//! for identical configurations regardless of the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, GridSpec, Metric};
pub use experiments::run;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    ParseConfig(#[from] toml::de::Error),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("evaluation failed at lambda = {lambda}, kappa_t = {kappa_t}: {source}")]
    PointFailed {
        lambda: f64,
        kappa_t: f64,
        source: doublewell_core::Error,
    },
    #[error(transparent)]
    Core(#[from] doublewell_core::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
