use std::path::Path;

use vreal_core::scoring::{aggregate_scorecard, ScorecardError};
use vreal_core::session_log::{derive_telemetry, deserialize_log, export_report};

use crate::error::CliError;
use crate::files;
use crate::manifest::RunManifest;
use crate::Format;

pub fn run(log_path: &Path, config: Option<&Path>, out: Option<&Path>, format: Format) -> Result<String, CliError> {
    let config_value = files::load_config(config)?;
    let bytes = files::read_bytes(log_path)?;
    let log = deserialize_log(&bytes).map_err(|e| CliError::Log(format!("{}: {e}", log_path.display())))?;
    let scorecard = aggregate_scorecard(&log, &config_value).map_err(|e| match e {
        ScorecardError::InvalidConfig(_) => CliError::Config(e.to_string()),
        other => CliError::Log(format!("{}: {other}", log_path.display())),
    })?;
    let telemetry = derive_telemetry(&log).map_err(|e| CliError::Log(format!("{}: {e}", log_path.display())))?;
    let report = export_report(&scorecard, &telemetry);

    if let Some(dir) = out {
        let mut manifest = RunManifest::new("score", &config_value);
        manifest.seeds.extend(log.header().seed);
        manifest.inputs.push(log_path.to_path_buf());
        manifest.inputs.extend(config.map(Path::to_path_buf));
        manifest.outputs.push(files::write(dir, "report.txt", &report)?);
        manifest.outputs.push(files::write(dir, "scorecard.json", &files::to_json(&scorecard))?);
        manifest.write(dir)?;
    }
    Ok(match format {
        Format::Json => files::to_json(&serde_json::json!({ "scorecard": scorecard, "telemetry": telemetry })),
        Format::Text => report,
    })
}
