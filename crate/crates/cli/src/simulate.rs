use std::path::{Path, PathBuf};

use serde::Serialize;
use vreal_core::par::Execution;
use vreal_core::scoring::TaskScorecard;
use vreal_core::session_log::serialize_log;
use vreal_core::sim::{simulate_cohort, ParticipantProfile, SimError};

use crate::error::CliError;
use crate::files;
use crate::manifest::RunManifest;
use crate::Format;

pub struct SimulateArgs<'a> {
    pub profile: &'a str,
    pub seed: u64,
    pub cohort: usize,
    pub config: Option<&'a Path>,
    pub out: &'a Path,
    pub sequential: bool,
    pub format: Format,
}

#[derive(Serialize)]
struct SessionSummary<'a> {
    index: usize,
    seed: u64,
    duration_ms: u64,
    pm_total: i32,
    log: &'a Path,
    scorecard: &'a TaskScorecard,
}

/// A preset name or a path to a profile JSON file.
fn load_profile(spec: &str) -> Result<(ParticipantProfile, Option<PathBuf>), CliError> {
    if let Some(profile) = ParticipantProfile::preset(spec) {
        return Ok((profile, None));
    }
    let path = PathBuf::from(spec);
    let profile = ParticipantProfile::from_json(&files::read_text(&path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    profile.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((profile, Some(path)))
}

pub fn run(args: SimulateArgs) -> Result<String, CliError> {
    if args.cohort == 0 {
        return Err(CliError::Config("--cohort must be at least 1".into()));
    }
    let config = files::load_config(args.config)?;
    let (profile, profile_path) = load_profile(args.profile)?;
    let seeds: Vec<u64> = (0..args.cohort as u64).map(|i| args.seed.wrapping_add(i)).collect();
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let profiles = vec![profile.clone(); seeds.len()];
    let sessions = simulate_cohort(&profiles, &seeds, &config, execution).map_err(|e| match e {
        SimError::Profile(_) | SimError::Config(_) => CliError::Config(e.to_string()),
        other => CliError::Log(other.to_string()),
    })?;

    let mut manifest = RunManifest::new("simulate", &config);
    manifest.seeds = seeds.clone();
    manifest.inputs.extend(args.config.map(Path::to_path_buf));
    manifest.inputs.extend(profile_path);
    manifest.parameters = serde_json::json!({ "profile_name": args.profile, "profile": profile, "cohort": args.cohort });

    let mut log_paths = Vec::new();
    for (i, session) in sessions.iter().enumerate() {
        let report = session.report().map_err(|e| CliError::Log(e.to_string()))?;
        let log_path = files::write(args.out, &format!("session-{i:03}.log.jsonl"), &serialize_log(&session.log))?;
        let report_path = files::write(args.out, &format!("report-{i:03}.txt"), &report)?;
        let card_path = files::write(args.out, &format!("scorecard-{i:03}.json"), &files::to_json(&session.scorecard))?;
        manifest.outputs.extend([log_path.clone(), report_path, card_path]);
        log_paths.push(log_path);
    }
    let manifest_path = manifest.write(args.out)?;

    let summaries: Vec<SessionSummary> = sessions
        .iter()
        .zip(&seeds)
        .zip(&log_paths)
        .enumerate()
        .map(|(index, ((s, &seed), log))| SessionSummary {
            index,
            seed,
            duration_ms: s.duration_ms(),
            pm_total: s.scorecard.pm_total(),
            log,
            scorecard: &s.scorecard,
        })
        .collect();
    Ok(match args.format {
        Format::Json => files::to_json(&serde_json::json!({ "sessions": summaries, "manifest": manifest_path })),
        Format::Text => {
            let mut out = String::new();
            for s in &summaries {
                out.push_str(&format!(
                    "session {} seed {}: {:.1} min, PM total {}, log {}\n",
                    s.index,
                    s.seed,
                    s.duration_ms as f64 / 60_000.0,
                    s.pm_total,
                    s.log.display()
                ));
            }
            out.push_str(&format!("manifest {}\n", manifest_path.display()));
            out
        }
    })
}
