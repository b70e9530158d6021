//! Experiment runner for the level-set concavity checks of minimal graphs
//! over convex rings: configs, pipelines, CSV/JSON reports and the
//! acceptance criteria.

pub mod boundary;
pub mod commands;
pub mod config;
pub mod criteria;
pub mod instances;
pub mod lemma;
pub mod manifest;
pub mod output;

/// Environment variable naming the output root.
pub const OUTPUT_ENV: &str = "MSLAB_OUT";
pub const DEFAULT_OUTPUT: &str = "mslab-out";
