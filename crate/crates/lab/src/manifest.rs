//! Run manifest: what was asked, what was checked, what was written.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub core_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// The only field that changes between identical runs.
    pub wall_clock_seconds: f64,
    pub checks: Vec<Check>,
    /// Every file in the output directory, the manifest included.
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl RunManifest {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}
