use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use vreal_core::bayes::{compare, format_bf10, BayesComparison, BayesError, Direction, PairedSample};
use vreal_core::config::ScoringConfig;
use vreal_core::vrnq::{
    aggregate_cohort, check_cutoffs, read_responses_csv, score_vrnq, CohortAggregate, CutoffVerdict, DomainMap,
    ScoreKey, Tier, VrnqResponseSet, VrnqScores,
};

use crate::error::CliError;
use crate::files;
use crate::manifest::RunManifest;
use crate::Format;

fn load_domains(path: &Path) -> Result<DomainMap, CliError> {
    DomainMap::from_json(&files::read_text(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_responses(path: &Path) -> Result<Vec<VrnqResponseSet>, CliError> {
    let bytes = files::read_bytes(path)?;
    let sets = read_responses_csv(bytes.as_slice()).map_err(|e| CliError::Csv(format!("{}: {e}", path.display())))?;
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = sets.iter().find(|s| !seen.insert(s.participant_id.as_str())) {
        return Err(CliError::Csv(format!("{}: participant `{}` appears twice", path.display(), dup.participant_id)));
    }
    Ok(sets)
}

fn manifest(command: &str, inputs: &[&Path], parameters: serde_json::Value) -> RunManifest {
    let mut m = RunManifest::new(command, &ScoringConfig::default());
    m.inputs = inputs.iter().map(|p| p.to_path_buf()).collect();
    m.parameters = parameters;
    m
}

#[derive(Serialize)]
struct ParticipantScores<'a> {
    participant_id: &'a str,
    scores: VrnqScores,
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    participants: Vec<ParticipantScores<'a>>,
    aggregate: CohortAggregate,
    verdict: CutoffVerdict,
}

pub fn score(
    domains: &Path,
    csv: &Path,
    tier: Tier,
    out: Option<&Path>,
    format: Format,
) -> Result<String, CliError> {
    let map = load_domains(domains)?;
    let sets = load_responses(csv)?;
    let aggregate = aggregate_cohort(&sets, &map).map_err(|e| CliError::Csv(format!("{}: {e}", csv.display())))?;
    let verdict = check_cutoffs(&aggregate, tier);
    let output = ScoreOutput {
        participants: sets
            .iter()
            .map(|s| ParticipantScores { participant_id: &s.participant_id, scores: score_vrnq(s, &map) })
            .collect(),
        aggregate,
        verdict,
    };
    let json = files::to_json(&output);
    if let Some(dir) = out {
        let mut m = manifest("vrnq score", &[domains, csv], serde_json::json!({ "tier": tier }));
        m.outputs.push(files::write(dir, "vrnq-scores.json", &json)?);
        m.write(dir)?;
    }
    Ok(match format {
        Format::Json => json,
        Format::Text => score_text(&output, tier),
    })
}

fn score_text(output: &ScoreOutput, tier: Tier) -> String {
    let mut text = String::from("participant  UE  GM  IGA  VRISE  total\n");
    for p in &output.participants {
        let s = &p.scores;
        text.push_str(&format!(
            "{}  {}  {}  {}  {}  {}\n",
            p.participant_id,
            s.get(ScoreKey::UserExperience),
            s.get(ScoreKey::GameMechanics),
            s.get(ScoreKey::InGameAssistance),
            s.get(ScoreKey::Vrise),
            s.total
        ));
    }
    text.push_str(&format!("\n{} tier\n", tier_name(tier)));
    for key in ScoreKey::ALL {
        let stat = output.aggregate.stats[&key];
        let pass = output.verdict.passes[&key];
        text.push_str(&format!(
            "{}: median {} (MAD {}), n {}, cut-off {}: {}\n",
            key.as_str(),
            stat.median,
            stat.mad,
            stat.n,
            tier.threshold(key),
            if pass { "pass" } else { "fail" }
        ));
    }
    text.push_str(&format!("overall: {}\n", if output.verdict.overall { "pass" } else { "fail" }));
    text
}

fn tier_name(tier: Tier) -> &'static str {
    match tier {
        Tier::Minimum => "minimum",
        Tier::Parsimonious => "parsimonious",
    }
}

#[derive(Serialize)]
struct CompareRow {
    score: ScoreKey,
    #[serde(flatten)]
    comparison: Option<BayesComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Pairs two cohorts by participant id, in the order of `a`.
fn pair_scores(
    a: &[VrnqResponseSet],
    b: &[VrnqResponseSet],
    map: &DomainMap,
    labels: (&Path, &Path),
) -> Result<Vec<(VrnqScores, VrnqScores)>, CliError> {
    let by_id: BTreeMap<&str, &VrnqResponseSet> = b.iter().map(|s| (s.participant_id.as_str(), s)).collect();
    let mut pairs = Vec::with_capacity(a.len());
    for set in a {
        let other = by_id.get(set.participant_id.as_str()).ok_or_else(|| {
            CliError::Csv(format!("participant `{}` is missing from {}", set.participant_id, labels.1.display()))
        })?;
        pairs.push((score_vrnq(set, map), score_vrnq(other, map)));
    }
    if b.len() != a.len() {
        let known: std::collections::BTreeSet<&str> = a.iter().map(|s| s.participant_id.as_str()).collect();
        let extra = b.iter().find(|s| !known.contains(s.participant_id.as_str())).expect("b has an unmatched id");
        return Err(CliError::Csv(format!(
            "participant `{}` is missing from {}",
            extra.participant_id,
            labels.0.display()
        )));
    }
    Ok(pairs)
}

pub struct CompareArgs<'a> {
    pub domains: &'a Path,
    pub a: &'a Path,
    pub b: &'a Path,
    pub direction: Direction,
    pub prior_scale: f64,
    pub csv_out: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub format: Format,
}

pub fn compare_cohorts(args: CompareArgs) -> Result<String, CliError> {
    if !(args.prior_scale > 0.0 && args.prior_scale.is_finite()) {
        return Err(CliError::Config(format!("--prior-scale must be positive, got {}", args.prior_scale)));
    }
    let map = load_domains(args.domains)?;
    let a = load_responses(args.a)?;
    let b = load_responses(args.b)?;
    let pairs = pair_scores(&a, &b, &map, (args.a, args.b))?;
    let rows: Vec<CompareRow> = ScoreKey::ALL
        .iter()
        .map(|&key| {
            let xs = pairs.iter().map(|(x, _)| f64::from(x.get(key))).collect();
            let ys = pairs.iter().map(|(_, y)| f64::from(y.get(key))).collect();
            let result = PairedSample::new(xs, ys)
                .and_then(|sample| compare(&sample, args.direction, args.prior_scale))
                .map_err(|e: BayesError| e.to_string());
            match result {
                Ok(c) => CompareRow { score: key, comparison: Some(c), error: None },
                Err(e) => CompareRow { score: key, comparison: None, error: Some(e) },
            }
        })
        .collect();

    let csv = compare_csv(&rows);
    let mut written = Vec::new();
    if let Some(path) = args.csv_out {
        std::fs::write(path, &csv).map_err(CliError::io(path))?;
        written.push(path.to_path_buf());
    }
    let json = files::to_json(&rows);
    if let Some(dir) = args.out {
        let mut m = manifest(
            "vrnq compare",
            &[args.domains, args.a, args.b],
            serde_json::json!({ "direction": args.direction, "prior_scale": args.prior_scale }),
        );
        m.outputs = written;
        m.outputs.push(files::write(dir, "vrnq-compare.json", &json)?);
        m.write(dir)?;
    }
    Ok(match args.format {
        Format::Json => json,
        Format::Text => compare_text(&rows, args),
    })
}

fn compare_csv(rows: &[CompareRow]) -> String {
    let mut csv = String::from("score,n,t,df,p,bf10,bf10_rel_error,evidence,error\n");
    for row in rows {
        match (&row.comparison, &row.error) {
            (Some(c), _) => csv.push_str(&format!(
                "{},{},{},{},{},{},{:e},{},\n",
                row.score.as_str(),
                c.n,
                c.t,
                c.df,
                c.p,
                c.bf10,
                c.bf10_rel_error,
                c.band.label()
            )),
            (None, e) => csv.push_str(&format!("{},,,,,,,,\"{}\"\n", row.score.as_str(), e.as_deref().unwrap_or_default().replace('"', "'"))),
        }
    }
    csv
}

fn compare_text(rows: &[CompareRow], args: CompareArgs) -> String {
    let stem = |p: &Path| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
    let mut text = format!(
        "H1: {} {} {} (paired, prior scale {})\nscore  n  t  df  p  BF10  evidence\n",
        stem(args.a),
        args.direction.symbol(),
        stem(args.b),
        args.prior_scale
    );
    for row in rows {
        match (&row.comparison, &row.error) {
            (Some(c), _) => text.push_str(&format!(
                "{}  {}  {:.3}  {}  {:.4}  {}  {}\n",
                row.score.as_str(),
                c.n,
                c.t,
                c.df,
                c.p,
                format_bf10(c.bf10),
                c.band.label()
            )),
            (None, e) => text.push_str(&format!(
                "{}  not computed: {}\n",
                row.score.as_str(),
                e.as_deref().unwrap_or_default()
            )),
        }
    }
    text
}
