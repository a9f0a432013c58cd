use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use vreal_core::config::ScoringConfig;

use crate::error::CliError;
use crate::files;

/// Written next to every set of outputs; enough to rerun the command.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub tool_version: String,
    pub config_hash: String,
    pub config: ScoringConfig,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// Command-specific settings such as the participant profile or test direction.
    pub parameters: Value,
}

impl RunManifest {
    pub fn new(command: &str, config: &ScoringConfig) -> Self {
        RunManifest {
            command: command.to_owned(),
            argv: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config_hash: config.hash(),
            config: config.clone(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            parameters: Value::Null,
        }
    }

    pub fn write(mut self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join("manifest.json");
        self.outputs.push(path.clone());
        files::write(dir, "manifest.json", &files::to_json(&self))
    }
}
