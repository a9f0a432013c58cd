//! Seeded participant agents that play a whole session through the engine.
//!
//! Each scene draws from its own ChaCha stream keyed by `(seed, scene id)`, so
//! changing how one scene is played never shifts the draws of another.

mod profile;

pub use profile::{DelayProbs, ParticipantProfile, ProfileError, DEFAULT_SESSION_LENGTH_S};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::catalog::{NpcBoard, RecognitionCatalog, Side, COLLECTION_DISTRACTORS, COLLECTION_TARGETS};
use crate::config::ScoringConfig;
use crate::par::{map_ordered, Execution};
use crate::scenario::{
    scene_sequence, Activity, Effect, EngineError, PmTask, Polarity, SceneDescriptor, SceneKind, Scenario,
    SessionState, LUNCH_TIMER_OFFSETS_MS, MAX_PROMPT_DEPTH, PRACTICE_TARGETS,
};
use crate::scoring::{score_state, CookingItem, ScorecardError, TaskScorecard, IDEAL_ROUTE_UNITS, ROAD_UNITS};
use crate::session_log::{derive_telemetry, export_report, EventKind, LogError, LogHeader, SessionLog};

/// Longest single response latency; keeps every scene schedulable.
pub const MAX_LATENCY_MS: u64 = 10_000;
/// Practice attempts after which the simulated participant always passes.
pub const PRACTICE_ATTEMPT_CAP: u32 = 5;
const PRACTICE_DISTRACTORS: u8 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid profile: {0}")]
    Profile(#[from] ProfileError),
    #[error("invalid scoring config: {0}")]
    Config(String),
    #[error("profile and seed lists differ in length ({profiles} vs {seeds})")]
    LengthMismatch { profiles: usize, seeds: usize },
    #[error("simulator produced an event the engine rejected: {0}")]
    Engine(#[from] EngineError),
    #[error("simulator produced an invalid log: {0}")]
    Log(#[from] LogError),
    #[error(transparent)]
    Scorecard(#[from] ScorecardError),
}

/// A generated session with the scorecard computed alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSession {
    pub log: SessionLog,
    pub scorecard: TaskScorecard,
}

impl SimulatedSession {
    pub fn report(&self) -> Result<String, LogError> {
        Ok(export_report(&self.scorecard, &derive_telemetry(&self.log)?))
    }

    /// Simulated clock at the last event.
    pub fn duration_ms(&self) -> u64 {
        self.log.events().last().map_or(0, |e| e.sim_time_ms)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The random stream a given scene draws from.
pub fn scene_rng(seed: u64, scene_id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(u64::from(scene_id))))
}

/// Milliseconds allotted to each scene; storyline scenes weigh twice a tutorial.
fn scene_budgets_ms(session_length_s: f64) -> Vec<u64> {
    let weight = |s: &SceneDescriptor| if s.kind == SceneKind::Tutorial { 1.0 } else { 2.0 };
    let total: f64 = scene_sequence().iter().map(weight).sum();
    scene_sequence()
        .iter()
        .map(|s| (session_length_s * 1000.0 * weight(s) / total).round() as u64)
        .collect()
}

/// Feeds events to the log and the engine in lock step.
struct Recorder<'a> {
    scenario: &'a Scenario,
    state: SessionState,
    log: SessionLog,
}

impl Recorder<'_> {
    fn emit(&mut self, at_ms: u64, kind: EventKind) -> Result<Vec<Effect>, SimError> {
        let event = self.log.record(self.state.current_scene, at_ms, kind)?;
        let (next, effects) = self.scenario.advance(&self.state, event)?;
        self.state = next;
        Ok(effects)
    }
}

struct ScenePlay<'r, 'a> {
    rec: &'r mut Recorder<'a>,
    rng: ChaCha8Rng,
    profile: &'r ParticipantProfile,
    latency: Normal<f64>,
    entered: u64,
    t: u64,
}

impl ScenePlay<'_, '_> {
    fn latency(&mut self) -> u64 {
        let ms = self.latency.sample(&mut self.rng).max(0.0).round() as u64;
        ms.min(MAX_LATENCY_MS)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Acts one latency after the previous action.
    fn act(&mut self, kind: EventKind) -> Result<Vec<Effect>, SimError> {
        self.t += self.latency();
        self.rec.emit(self.t, kind)
    }

    /// Acts at `at_ms`, or immediately if that moment has passed.
    fn act_at(&mut self, at_ms: u64, kind: EventKind) -> Result<Vec<Effect>, SimError> {
        self.t = self.t.max(at_ms);
        self.rec.emit(self.t, kind)
    }

    /// The prompt (1..=3) after which the participant acts, 0 for before any
    /// prompt, `None` for never.
    fn cascade_depth(&mut self, hit: f64) -> Option<u8> {
        if self.chance(hit) {
            return Some(0);
        }
        (1..=MAX_PROMPT_DEPTH).find(|&d| {
            let p = self.profile.prompt_yield_probs[d as usize - 1];
            self.chance(p)
        })
    }

    fn recognition_picks(&mut self, catalog: &RecognitionCatalog) -> Vec<String> {
        let (pt, pd) = (self.profile.recognition_target_prob, self.profile.recognition_distractor_prob);
        let mut picks = Vec::new();
        for (i, item) in catalog.universe().enumerate() {
            let p = if i < catalog.targets.len() { pt } else { pd };
            if self.chance(p) {
                picks.push(item.to_owned());
            }
        }
        if picks.len() > catalog.list_capacity() {
            picks.shuffle(&mut self.rng);
            picks.truncate(catalog.list_capacity());
        }
        picks
    }
}

/// Plays one full session. Deterministic in `(profile, seed, config)`.
pub fn simulate_session(
    profile: &ParticipantProfile,
    seed: u64,
    config: &ScoringConfig,
) -> Result<SimulatedSession, SimError> {
    profile.validate()?;
    config.validate().map_err(|e| SimError::Config(e.to_string()))?;
    let scenario = Scenario::new(config);
    let latency = Normal::new(profile.latency_mean_ms, profile.latency_sd_ms).expect("validated profile");
    let budgets = scene_budgets_ms(profile.session_length_s);
    let mut rec = Recorder {
        scenario: &scenario,
        state: SessionState::default(),
        log: SessionLog::new(LogHeader::new(Some(seed), Some(config.hash()))),
    };
    let mut clock = 0;
    for descriptor in scene_sequence() {
        let mut play = ScenePlay {
            rec: &mut rec,
            rng: scene_rng(seed, descriptor.id),
            profile,
            latency,
            entered: clock,
            t: clock,
        };
        play.rec.emit(clock, EventKind::SceneEntered)?;
        play_scene(&mut play, descriptor, config)?;
        let exit_at = (play.t + play.latency()).max(play.entered + budgets[descriptor.id as usize - 1]);
        play.act_at(exit_at, EventKind::SceneExited)?;
        clock = exit_at;
    }
    let scorecard = score_state(&rec.state, config)?;
    Ok(SimulatedSession { log: rec.log, scorecard })
}

fn play_scene(play: &mut ScenePlay, scene: &SceneDescriptor, config: &ScoringConfig) -> Result<(), SimError> {
    let profile = play.profile;
    if !scene.pm_tasks.is_empty() && play.chance(profile.notes_use_prob) {
        play.act(EventKind::NoteOpened)?;
        play.act(EventKind::NoteClosed)?;
    }
    match scene.activity {
        Activity::Tutorial => {
            play.act(EventKind::TutorialCompleted)?;
        }
        Activity::PracticeTrial => play_practice(play)?,
        Activity::Bedroom => play_bedroom(play, config)?,
        Activity::Kitchen => play_kitchen(play)?,
        Activity::LivingRoom => play_living_room(play)?,
        Activity::Conversation => play_conversation(play, scene)?,
        Activity::VisualAttention => {
            for stimulus in play.rec.scenario.visual_layout().to_vec() {
                let p = if stimulus.kind == crate::catalog::VisualKind::Target {
                    profile.attention_hit_prob
                } else {
                    profile.attention_false_alarm_prob
                };
                if play.chance(p) {
                    let (index, kind, side) = (stimulus.index, stimulus.kind, stimulus.side);
                    play.act(EventKind::PosterSpotted { index, kind, side })?;
                }
            }
            play.act(EventKind::FinalButtonPressed)?;
        }
        Activity::Supermarket => {
            let catalog = play.rec.scenario.catalog().clone();
            for item in play.recognition_picks(&catalog) {
                play.act(EventKind::ShoppingCollected { item })?;
            }
            play.act(EventKind::FinalButtonPressed)?;
        }
        Activity::AuditoryAttention => {
            for stimulus in play.rec.scenario.auditory_layout().to_vec() {
                let p = if stimulus.kind == crate::catalog::AuditoryKind::Target {
                    profile.attention_hit_prob
                } else {
                    profile.attention_false_alarm_prob
                };
                if play.chance(p) {
                    let controller = if play.chance(profile.wrong_controller_prob) {
                        opposite(stimulus.side)
                    } else {
                        stimulus.side
                    };
                    let (index, kind, side) = (stimulus.index, stimulus.kind, stimulus.side);
                    play.act(EventKind::SoundTriggered { index, kind, side, controller })?;
                }
            }
            play.act(EventKind::FinalButtonPressed)?;
        }
        Activity::PutAway => play_put_away(play)?,
    }
    Ok(())
}

fn opposite(side: Side) -> Side {
    match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

/// Hit rate rises towards certainty with each attempt; the cap forces a pass.
fn play_practice(play: &mut ScenePlay) -> Result<(), SimError> {
    let (hit, false_alarm) = (play.profile.attention_hit_prob, play.profile.attention_false_alarm_prob);
    for attempt in 1..=PRACTICE_ATTEMPT_CAP {
        let learned = 1.0 - 0.5f64.powi(attempt as i32 - 1);
        let p_hit = hit + (1.0 - hit) * learned;
        let p_fa = false_alarm * (1.0 - learned);
        let (mut targets_hit, mut distractors_hit) = (0, 0);
        for _ in 0..PRACTICE_TARGETS {
            targets_hit += u8::from(play.chance(p_hit));
        }
        for _ in 0..PRACTICE_DISTRACTORS {
            distractors_hit += u8::from(play.chance(p_fa));
        }
        if attempt == PRACTICE_ATTEMPT_CAP {
            (targets_hit, distractors_hit) = (PRACTICE_TARGETS, 0);
        }
        let effects = play.act(EventKind::PracticeAttempt { targets_hit, distractors_hit })?;
        if effects.iter().any(|e| matches!(e, Effect::PracticePassed { .. })) {
            break;
        }
    }
    Ok(())
}

fn play_bedroom(play: &mut ScenePlay, config: &ScoringConfig) -> Result<(), SimError> {
    for prompt in 1..=3 {
        let intends = play.chance(play.profile.notes_use_prob);
        play.act(EventKind::NotesIntentAnswered { prompt, intends })?;
    }
    let catalog = play.rec.scenario.catalog().clone();
    for item in play.recognition_picks(&catalog) {
        play.act(EventKind::ItemSelected { item })?;
    }

    let k = i32::from(play.profile.planning_extra_units);
    let deviation = if k == 0 { 0 } else { play.rng.random_range(-k..=k) };
    let n = (IDEAL_ROUTE_UNITS + deviation).clamp(1, i32::from(ROAD_UNITS)) as usize;
    let mut units: Vec<u8> = (1..=ROAD_UNITS).collect();
    units.shuffle(&mut play.rng);
    let norms = config.planning_norms;
    let planning = Normal::new(norms.mean_s, norms.sd_s).expect("validated config");
    let planning_ms = (planning.sample(&mut play.rng).max(1.0) * 1000.0).round() as u64;
    let started = play.t;
    for &unit in &units[..n] {
        play.act(EventKind::RouteUnitToggled { unit })?;
    }
    let submit_at = (started + planning_ms).max(play.t);
    play.act_at(submit_at, EventKind::RouteSubmitted { elapsed_ms: submit_at - started })?;
    play.act(EventKind::FinalButtonPressed)?;
    Ok(())
}

/// Final-button or exit-attempt cascade: press the control until the scene
/// ends, performing `action` after the chosen prompt.
fn play_control_cascade(
    play: &mut ScenePlay,
    depth: Option<u8>,
    action: EventKind,
    control: EventKind,
) -> Result<(), SimError> {
    if depth == Some(0) {
        play.act(action.clone())?;
    }
    let mut shown = 0;
    loop {
        let effects = play.act(control.clone())?;
        if effects.iter().any(|e| matches!(e, Effect::SceneTransition { .. } | Effect::SessionComplete)) {
            return Ok(());
        }
        shown += 1;
        if depth == Some(shown) {
            play.act(action.clone())?;
        }
    }
}

fn play_kitchen(play: &mut ScenePlay) -> Result<(), SimError> {
    let sd = play.profile.cooking_timing_sd_s;
    let noise = Normal::new(0.0, sd).expect("validated profile");
    let mut placements: Vec<(u64, CookingItem)> = CookingItem::ALL
        .iter()
        .map(|&item| {
            let t_s = (item.on_time_midpoint_s() + noise.sample(&mut play.rng)).max(0.0);
            ((t_s * 1000.0).round() as u64, item)
        })
        .collect();
    placements.sort();
    for (elapsed_ms, item) in placements {
        let at = (play.entered + elapsed_ms).max(play.t);
        play.act_at(at, EventKind::CookingItemPlaced { item, elapsed_ms })?;
    }
    let depth = play.cascade_depth(play.profile.pm_hit_prob.get(PmTask::MedicationBreakfast.spec().delay));
    play_control_cascade(play, depth, EventKind::MedicationTaken, EventKind::FinalButtonPressed)
}

fn play_living_room(play: &mut ScenePlay) -> Result<(), SimError> {
    let (hit, false_alarm) = (play.profile.attention_hit_prob, play.profile.attention_false_alarm_prob);
    for item in COLLECTION_TARGETS {
        if play.chance(hit) {
            play.act(EventKind::ItemSelected { item: item.to_owned() })?;
        }
    }
    for item in COLLECTION_DISTRACTORS {
        if play.chance(false_alarm) {
            play.act(EventKind::ItemSelected { item: item.to_owned() })?;
        }
    }
    let depth = play.cascade_depth(play.profile.pm_hit_prob.get(PmTask::ChocolatePie.spec().delay));
    play_control_cascade(play, depth, EventKind::PieRemoved, EventKind::ExitAttempted)
}

fn play_conversation(play: &mut ScenePlay, scene: &SceneDescriptor) -> Result<(), SimError> {
    let spec = &scene.pm_tasks[0];
    let profile = play.profile;
    // The first prompt is shown on entry, so "acting unprompted" means
    // answering it; later prompts use the first two yield probabilities.
    let yes_at = match spec.polarity {
        Polarity::Positive => {
            let hit = profile.pm_hit_prob.get(spec.delay);
            (1..=MAX_PROMPT_DEPTH).find(|&d| {
                let p = if d == 1 { hit } else { profile.prompt_yield_probs[d as usize - 2] };
                play.chance(p)
            })
        }
        Polarity::NegativeFalsePrompt => (1..=MAX_PROMPT_DEPTH).find(|_| play.chance(profile.false_prompt_yes_prob)),
    };
    for prompt in 1..=MAX_PROMPT_DEPTH {
        let affirmative = yes_at == Some(prompt);
        play.act(EventKind::NpcPromptAnswered { prompt, affirmative })?;
        if affirmative {
            break;
        }
    }
    if let (Some(_), Polarity::Positive) = (yes_at, spec.polarity) {
        let board = NpcBoard::for_task(spec.task).expect("positive conversations have a board");
        let item = if play.chance(profile.pm_item_correct_prob) {
            board.correct
        } else {
            let others: Vec<&str> = board.items().filter(|i| *i != board.correct).collect();
            others[play.rng.random_range(0..others.len())]
        };
        play.act(EventKind::NpcItemChosen { item: item.to_owned() })?;
        if spec.task == PmTask::SpareKeys && item == board.correct {
            play.act(EventKind::KeysGiven)?;
        }
    }
    Ok(())
}

fn play_put_away(play: &mut ScenePlay) -> Result<(), SimError> {
    let depth = play.cascade_depth(play.profile.pm_hit_prob.get(PmTask::MedicationLunch.spec().delay));
    let offsets = LUNCH_TIMER_OFFSETS_MS;
    // Medication time: before the first prompt, or within the window that
    // follows prompt `d`.
    let take_at = depth.map(|d| {
        let lat = play.latency();
        match d {
            0 => play.entered + lat.min(offsets[0] - 1),
            d => play.entered + offsets[d as usize - 1] + lat.min(9_999),
        }
    });
    let items: Vec<String> = play.rec.state.record.delayed_selection.iter().cloned().collect();
    let mut taken = false;
    for item in items {
        let next = play.t + play.latency();
        if let Some(at) = take_at.filter(|&at| !taken && next >= at) {
            play.act_at(at, EventKind::MedicationTaken)?;
            taken = true;
        }
        play.act_at(next.max(play.t), EventKind::ItemStowed { item })?;
    }
    match take_at {
        Some(at) if !taken => {
            play.act_at(at, EventKind::MedicationTaken)?;
        }
        None => {
            // Wait out the whole cascade before finishing.
            play.t = play.t.max(play.entered + offsets[2]);
        }
        _ => {}
    }
    play.act(EventKind::FinalButtonPressed)?;
    Ok(())
}

/// Independent sessions, output in input order.
pub fn simulate_cohort(
    profiles: &[ParticipantProfile],
    seeds: &[u64],
    config: &ScoringConfig,
    execution: Execution,
) -> Result<Vec<SimulatedSession>, SimError> {
    if profiles.len() != seeds.len() {
        return Err(SimError::LengthMismatch { profiles: profiles.len(), seeds: seeds.len() });
    }
    let jobs: Vec<(&ParticipantProfile, u64)> = profiles.iter().zip(seeds.iter().copied()).collect();
    map_ordered(&jobs, execution, |(profile, seed)| simulate_session(profile, *seed, config))
        .into_iter()
        .collect()
}
