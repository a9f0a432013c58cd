use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use vreal_core::bayes::{compare, Direction, PairedSample, DEFAULT_PRIOR_SCALE};
use vreal_core::scenario::{CascadeTrigger, PmTask, Polarity};

fn vreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vreal")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate(dir: &Path, profile: &str, seed: &str) -> PathBuf {
    let out = vreal(&["simulate", "--profile", profile, "--seed", seed, "--out", p(dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join("session-000.log.jsonl")
}

const DOMAINS: &str = r#"{"user_experience":[1,2,3,4,5],"game_mechanics":[6,7,8,9,10],
"in_game_assistance":[11,12,13,14,15],"vrise":[16,17,18,19,20]}"#;

fn header() -> String {
    let qs: Vec<String> = (1..=20).map(|i| format!("q{i}")).collect();
    format!("participant_id,{}\n", qs.join(","))
}

fn cohort_csv(rows: &[(&str, [u8; 20])]) -> String {
    let mut text = header();
    for (id, items) in rows {
        let cells: Vec<String> = items.iter().map(u8::to_string).collect();
        text.push_str(&format!("{id},{}\n", cells.join(",")));
    }
    text
}

#[test]
fn simulate_is_byte_reproducible_and_writes_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let a = simulate(&tmp.path().join("a"), "typical", "42");
    let b = simulate(&tmp.path().join("b"), "typical", "42");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(tmp.path().join("a/report-000.txt").exists());

    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seeds"], serde_json::json!([42]));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["parameters"]["profile_name"], "typical");
    assert!(manifest["parameters"]["profile"]["pm_hit_prob"].is_object());
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn cohort_outputs_follow_seed_order() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vreal(&["--format", "json", "simulate", "--profile", "typical", "--seed", "7", "--cohort", "4", "--out", p(tmp.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sessions = json(&out)["sessions"].as_array().unwrap().clone();
    let seeds: Vec<u64> = sessions.iter().map(|s| s["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, [7, 8, 9, 10]);
    let single = simulate(&tmp.path().join("single"), "typical", "9");
    assert_eq!(fs::read(single).unwrap(), fs::read(tmp.path().join("session-002.log.jsonl")).unwrap());
}

#[test]
fn missing_profile_is_an_io_error_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere.json");
    let out = vreal(&["simulate", "--profile", p(&missing), "--out", p(tmp.path())]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("nowhere.json"), "{}", stderr(&out));
}

#[test]
fn bad_config_and_profile_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, r#"{"planning_norms":{"mean_s":120.0,"sd_s":-1.0}}"#).unwrap();
    let out = vreal(&["simulate", "--profile", "typical", "--config", p(&config), "--out", p(tmp.path())]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    let profile = tmp.path().join("profile.json");
    let mut value = serde_json::to_value(vreal_core::sim::ParticipantProfile::typical()).unwrap();
    value["attention_hit_prob"] = serde_json::json!(1.5);
    fs::write(&profile, value.to_string()).unwrap();
    let out = vreal(&["simulate", "--profile", p(&profile), "--out", p(tmp.path())]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn score_reproduces_the_simulated_scorecard() {
    let tmp = tempfile::tempdir().unwrap();
    let log = simulate(&tmp.path().join("sim"), "typical", "5");
    let recorded: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("sim/scorecard-000.json")).unwrap()).unwrap();
    let out = vreal(&["--format", "json", "score", p(&log), "--out", p(&tmp.path().join("scored"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["scorecard"], recorded);
    assert_eq!(
        fs::read_to_string(tmp.path().join("scored/report.txt")).unwrap(),
        fs::read_to_string(tmp.path().join("sim/report-000.txt")).unwrap()
    );
    assert!(tmp.path().join("scored/manifest.json").exists());
}

#[test]
fn truncated_log_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let log = simulate(&tmp.path().join("sim"), "typical", "5");
    let text = fs::read_to_string(&log).unwrap();
    let cut: String = text.lines().take(40).map(|l| format!("{l}\n")).collect();
    let truncated = tmp.path().join("cut.jsonl");
    fs::write(&truncated, cut).unwrap();
    let out = vreal(&["score", p(&truncated)]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("did not reach the end"), "{}", stderr(&out));

    let garbage = tmp.path().join("garbage.jsonl");
    fs::write(&garbage, "not a log\n").unwrap();
    assert_eq!(code(&vreal(&["score", p(&garbage)])), 4);
}

#[test]
fn alternate_matrix_changes_conversation_scores_only() {
    let tmp = tempfile::tempdir().unwrap();
    let log = simulate(&tmp.path().join("sim"), "perfect", "3");
    let base = json(&vreal(&["--format", "json", "score", p(&log)]))["scorecard"]["pm_scores"].clone();

    let mut config = serde_json::to_value(vreal_core::config::ScoringConfig::default()).unwrap();
    config["positive_matrix"]["by_prompt"][0]["correct"] = serde_json::json!(5);
    let path = tmp.path().join("alt.json");
    fs::write(&path, config.to_string()).unwrap();
    let alt = json(&vreal(&["--format", "json", "score", p(&log), "--config", p(&path)]))["scorecard"]["pm_scores"].clone();

    for task in PmTask::ALL {
        let spec = task.spec();
        let key = serde_json::to_value(task).unwrap();
        let key = key.as_str().unwrap();
        let delta = alt[key].as_i64().unwrap() - base[key].as_i64().unwrap();
        let conversation = spec.cascade.trigger == CascadeTrigger::NpcDialogue && spec.polarity == Polarity::Positive;
        assert_eq!(delta, if conversation { -1 } else { 0 }, "{key}");
    }
}

#[test]
fn vrnq_all_sevens_pass_parsimonious() {
    let tmp = tempfile::tempdir().unwrap();
    let domains = tmp.path().join("domains.json");
    fs::write(&domains, DOMAINS).unwrap();
    let csv = tmp.path().join("cohort.csv");
    fs::write(&csv, cohort_csv(&[("a", [7; 20]), ("b", [7; 20]), ("c", [7; 20])])).unwrap();
    let out = vreal(&["--format", "json", "vrnq", "score", "--domains", p(&domains), p(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["aggregate"]["stats"]["total"]["median"], 140.0);
    assert_eq!(v["verdict"]["tier"], "parsimonious");
    assert_eq!(v["verdict"]["overall"], true);

    let text = vreal(&["vrnq", "score", "--domains", p(&domains), p(&csv), "--tier", "minimum"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("overall: pass"));
}

#[test]
fn malformed_csv_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let domains = tmp.path().join("domains.json");
    fs::write(&domains, DOMAINS).unwrap();
    let csv = tmp.path().join("bad.csv");
    fs::write(&csv, format!("{}a,{}\n", header(), vec!["9"; 20].join(","))).unwrap();
    let out = vreal(&["vrnq", "score", "--domains", p(&domains), p(&csv)]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("bad.csv"));
}

#[test]
fn compare_identical_cohorts_reports_degenerate_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let domains = tmp.path().join("domains.json");
    fs::write(&domains, DOMAINS).unwrap();
    let csv = tmp.path().join("same.csv");
    fs::write(&csv, cohort_csv(&[("a", [4; 20]), ("b", [5; 20]), ("c", [6; 20])])).unwrap();
    let out = vreal(&["vrnq", "compare", "--domains", p(&domains), p(&csv), p(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("zero variance"), "{text}");
}

#[test]
fn compare_matches_the_library() {
    let tmp = tempfile::tempdir().unwrap();
    let domains = tmp.path().join("domains.json");
    fs::write(&domains, DOMAINS).unwrap();
    let shifts: [u8; 6] = [1, 2, 3, 4, 2, 3];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for (i, &s) in shifts.iter().enumerate() {
        let mut b = [3u8; 20];
        b[..usize::from(s)].fill(4);
        alpha.push((["p0", "p1", "p2", "p3", "p4", "p5"][i], [3u8; 20]));
        beta.push((["p0", "p1", "p2", "p3", "p4", "p5"][i], b));
    }
    // Reverse the second file so pairing has to go by participant id.
    beta.reverse();
    let (a_path, b_path) = (tmp.path().join("alpha.csv"), tmp.path().join("beta.csv"));
    fs::write(&a_path, cohort_csv(&alpha)).unwrap();
    fs::write(&b_path, cohort_csv(&beta)).unwrap();
    let csv_out = tmp.path().join("rows.csv");
    let out = vreal(&[
        "--format", "json", "vrnq", "compare", "--domains", p(&domains), p(&a_path), p(&b_path),
        "--direction", "less", "--csv", p(&csv_out),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = json(&out);
    let total = rows.as_array().unwrap().iter().find(|r| r["score"] == "total").unwrap();

    let a: Vec<f64> = vec![60.0; 6];
    let b: Vec<f64> = shifts.iter().map(|&s| 60.0 + f64::from(s)).collect();
    let expected = compare(&PairedSample::new(a, b).unwrap(), Direction::ALess, DEFAULT_PRIOR_SCALE).unwrap();
    assert_eq!(total["bf10"].as_f64().unwrap(), expected.bf10);
    assert_eq!(total["t"].as_f64().unwrap(), expected.t);
    assert_eq!(total["p"].as_f64().unwrap(), expected.p);
    assert!(fs::read_to_string(csv_out).unwrap().lines().count() == 6);
}

#[test]
fn compare_rejects_unpaired_participants() {
    let tmp = tempfile::tempdir().unwrap();
    let domains = tmp.path().join("domains.json");
    fs::write(&domains, DOMAINS).unwrap();
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    fs::write(&a, cohort_csv(&[("x", [4; 20]), ("y", [5; 20])])).unwrap();
    fs::write(&b, cohort_csv(&[("x", [4; 20]), ("z", [5; 20])])).unwrap();
    let out = vreal(&["vrnq", "compare", "--domains", p(&domains), p(&a), p(&b)]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("`y`"), "{}", stderr(&out));
}
