use std::fs;
use std::path::{Path, PathBuf};

use vreal_core::config::ScoringConfig;

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(CliError::io(path))
}

/// Writes `contents` to `dir/name`, creating `dir`, and returns the path.
pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(CliError::io(&path))?;
    Ok(path)
}

pub fn load_config(path: Option<&Path>) -> Result<ScoringConfig, CliError> {
    let Some(path) = path else {
        return Ok(ScoringConfig::default());
    };
    ScoringConfig::from_json(&read_text(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
    text.push('\n');
    text
}
