//! The 22-scene scenario and the deterministic state machine that walks a
//! session through it.
//!
//! [`Scenario::advance`] is a pure function of `(state, event)`. Timer-driven
//! prompts (scene 22) are queued on scene entry and released by the first
//! event whose timestamp reaches them, so replaying a log always reproduces
//! the same effect stream.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::catalog::{
    AuditoryKind, ItemCategory, NpcBoard, RecognitionCatalog, Stimulus, VisualKind, COLLECTION_DISTRACTORS,
    COLLECTION_TARGETS,
};
use crate::config::ScoringConfig;
use crate::scoring::{AuditoryResponse, CookingItem, Grab, VisualSpot, ROAD_UNITS};
use crate::session_log::{EventKind, SessionEvent};

pub const SCENE_COUNT: u8 = 22;
pub const MAX_PROMPT_DEPTH: u8 = 3;

/// Every prospective-memory task in the battery, named by what it asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmTask {
    MedicationBreakfast,
    ChocolatePie,
    CallRose,
    CarrotCake,
    BakeryFalsePrompt,
    ReturnLibraryBook,
    PetrolFalsePrompt,
    SpareKeys,
    MedicationLunch,
}

impl PmTask {
    pub const ALL: [PmTask; 9] = [
        PmTask::MedicationBreakfast,
        PmTask::ChocolatePie,
        PmTask::CallRose,
        PmTask::CarrotCake,
        PmTask::BakeryFalsePrompt,
        PmTask::ReturnLibraryBook,
        PmTask::PetrolFalsePrompt,
        PmTask::SpareKeys,
        PmTask::MedicationLunch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PmTask::MedicationBreakfast => "medication_breakfast",
            PmTask::ChocolatePie => "chocolate_pie",
            PmTask::CallRose => "call_rose",
            PmTask::CarrotCake => "carrot_cake",
            PmTask::BakeryFalsePrompt => "bakery_false_prompt",
            PmTask::ReturnLibraryBook => "return_library_book",
            PmTask::PetrolFalsePrompt => "petrol_false_prompt",
            PmTask::SpareKeys => "spare_keys",
            PmTask::MedicationLunch => "medication_lunch",
        }
    }

    pub fn scene(self) -> u8 {
        match self {
            PmTask::MedicationBreakfast => 6,
            PmTask::ChocolatePie => 8,
            PmTask::CallRose => 10,
            PmTask::CarrotCake => 15,
            PmTask::BakeryFalsePrompt => 16,
            PmTask::ReturnLibraryBook => 17,
            PmTask::PetrolFalsePrompt => 20,
            PmTask::SpareKeys => 21,
            PmTask::MedicationLunch => 22,
        }
    }

    pub fn spec(self) -> &'static PmTaskSpec {
        scene(self.scene())
            .and_then(|s| s.pm_tasks.iter().find(|t| t.task == self))
            .expect("every task belongs to a scene")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SceneKind {
    Tutorial,
    Storyline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PmBasis {
    EventBased,
    TimeBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PmDelay {
    Short,
    Medium,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    NegativeFalsePrompt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CascadeTrigger {
    FinalButton,
    ExitAttempt,
    NpcDialogue,
    Timer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CascadeSpec {
    pub trigger: CascadeTrigger,
    /// Offsets from scene entry, for timer cascades only.
    pub timer_offsets_ms: Option<[u64; 3]>,
    pub prompt_texts: [&'static str; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PmTaskSpec {
    pub task: PmTask,
    pub basis: PmBasis,
    pub delay: PmDelay,
    pub polarity: Polarity,
    pub cascade: CascadeSpec,
}

/// What the participant does in a scene, beyond any PM task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Activity {
    Tutorial,
    PracticeTrial,
    /// PM-notes prompts, immediate recognition and route planning.
    Bedroom,
    /// Cooking plus the breakfast medication cascade.
    Kitchen,
    /// Item collection plus the chocolate-pie cascade.
    LivingRoom,
    Conversation,
    VisualAttention,
    Supermarket,
    AuditoryAttention,
    /// Putting the shopping away plus the timed medication cascade.
    PutAway,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SceneDescriptor {
    pub id: u8,
    pub kind: SceneKind,
    pub title: &'static str,
    pub activity: Activity,
    pub pm_tasks: Vec<PmTaskSpec>,
    pub gated_by_practice: bool,
}

const KITCHEN_PROMPTS: [&str; 3] = [
    "You Have to Do Something Else",
    "You Have to Do Something After Breakfast",
    "Take Your Medication",
];
const PIE_PROMPTS: [&str; 3] = [
    "You Have to Do Something Else",
    "You Have to Do Something Before Leaving",
    "Take the Pie Out of the Oven",
];
const NPC_PROMPTS: [&str; 3] = [
    "Is there anything else we need to do now?",
    "Are you certain there is nothing to do right now?",
    "I believe there is something we should do now.",
];
const LUNCH_PROMPTS: [&str; 3] = [
    "You Have to Do Something Else",
    "You Have to Do Something at 1pm",
    "Take Your Medication",
];

/// Timer cascade offsets of the final scene, from scene entry.
pub const LUNCH_TIMER_OFFSETS_MS: [u64; 3] = [70_000, 80_000, 90_000];

fn pm(task: PmTask, basis: PmBasis, delay: PmDelay, polarity: Polarity, trigger: CascadeTrigger) -> PmTaskSpec {
    let (timer_offsets_ms, prompt_texts) = match trigger {
        CascadeTrigger::FinalButton => (None, KITCHEN_PROMPTS),
        CascadeTrigger::ExitAttempt => (None, PIE_PROMPTS),
        CascadeTrigger::NpcDialogue => (None, NPC_PROMPTS),
        CascadeTrigger::Timer => (Some(LUNCH_TIMER_OFFSETS_MS), LUNCH_PROMPTS),
    };
    PmTaskSpec { task, basis, delay, polarity, cascade: CascadeSpec { trigger, timer_offsets_ms, prompt_texts } }
}

fn build_sequence() -> Vec<SceneDescriptor> {
    use Activity as A;
    use CascadeTrigger::*;
    use PmBasis::*;
    use PmDelay::*;
    use Polarity::*;
    use SceneKind::*;

    let s = |id, kind, title, activity, pm_tasks| SceneDescriptor {
        id,
        kind,
        title,
        activity,
        pm_tasks,
        gated_by_practice: false,
    };
    let npc = |task, basis, delay, polarity| vec![pm(task, basis, delay, polarity, NpcDialogue)];
    let mut scenes = vec![
        s(1, Tutorial, "Basic interactions and navigation", A::Tutorial, vec![]),
        s(2, Tutorial, "Interactive boards (recognition and planning)", A::Tutorial, vec![]),
        s(3, Storyline, "PM task list, shopping list and itinerary", A::Bedroom, vec![]),
        s(4, Tutorial, "Prospective memory mechanics, prompts and notes", A::Tutorial, vec![]),
        s(5, Tutorial, "Cooking", A::Tutorial, vec![]),
        s(
            6,
            Storyline,
            "Prepare breakfast and take medication",
            A::Kitchen,
            vec![pm(PmTask::MedicationBreakfast, EventBased, Short, Positive, FinalButton)],
        ),
        s(7, Tutorial, "Collect items", A::Tutorial, vec![]),
        s(
            8,
            Storyline,
            "Collect items and take the pie out of the oven",
            A::LivingRoom,
            vec![pm(PmTask::ChocolatePie, EventBased, Short, Positive, ExitAttempt)],
        ),
        s(9, Tutorial, "Interaction with non-player characters", A::Tutorial, vec![]),
        s(10, Storyline, "Call Rose", A::Conversation, npc(PmTask::CallRose, TimeBased, Short, Positive)),
        s(11, Tutorial, "Gaze interaction", A::PracticeTrial, vec![]),
        s(12, Storyline, "Detect posters on both sides of the road", A::VisualAttention, vec![]),
        s(13, Tutorial, "Collecting items in the supermarket", A::Tutorial, vec![]),
        s(14, Storyline, "Collect the shopping list items", A::Supermarket, vec![]),
        s(
            15,
            Storyline,
            "Collect the carrot cake from the bakery",
            A::Conversation,
            npc(PmTask::CarrotCake, TimeBased, Medium, Positive),
        ),
        s(
            16,
            Storyline,
            "False prompt before the library",
            A::Conversation,
            npc(PmTask::BakeryFalsePrompt, EventBased, Medium, NegativeFalsePrompt),
        ),
        s(
            17,
            Storyline,
            "Return the red book to the library",
            A::Conversation,
            npc(PmTask::ReturnLibraryBook, EventBased, Medium, Positive),
        ),
        s(18, Tutorial, "Auditory interaction", A::PracticeTrial, vec![]),
        s(19, Storyline, "Detect sounds from both sides of the road", A::AuditoryAttention, vec![]),
        s(
            20,
            Storyline,
            "False prompt before going home",
            A::Conversation,
            npc(PmTask::PetrolFalsePrompt, TimeBased, Long, NegativeFalsePrompt),
        ),
        s(
            21,
            Storyline,
            "Give the spare keys to Alex",
            A::Conversation,
            npc(PmTask::SpareKeys, EventBased, Long, Positive),
        ),
        s(
            22,
            Storyline,
            "Put away the shopping and take medication",
            A::PutAway,
            vec![pm(PmTask::MedicationLunch, TimeBased, Long, Positive, Timer)],
        ),
    ];
    for scene in &mut scenes {
        scene.gated_by_practice = scene.activity == A::PracticeTrial;
    }
    scenes
}

static SEQUENCE: LazyLock<Vec<SceneDescriptor>> = LazyLock::new(build_sequence);

/// The 22 scenes in running order.
pub fn scene_sequence() -> &'static [SceneDescriptor] {
    &SEQUENCE
}

pub fn scene(id: u8) -> Option<&'static SceneDescriptor> {
    id.checked_sub(1).and_then(|i| SEQUENCE.get(i as usize))
}

/// Outcome of one practice trial in a gated tutorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PracticeAttempt {
    pub targets_hit: u8,
    pub distractors_hit: u8,
}

pub const PRACTICE_TARGETS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOutcome {
    Pass,
    Retry,
}

/// Pass iff all three practice targets were hit and no distractor was.
pub fn practice_gate(scene_id: u8, attempt: PracticeAttempt) -> Result<GateOutcome, EngineError> {
    if !scene(scene_id).is_some_and(|s| s.gated_by_practice) {
        return Err(EngineError::NotAGatedScene(scene_id));
    }
    if attempt.targets_hit == PRACTICE_TARGETS && attempt.distractors_hit == 0 {
        Ok(GateOutcome::Pass)
    } else {
        Ok(GateOutcome::Retry)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Effect {
    PromptShown { task: PmTask, depth: u8, text: String, at_ms: u64 },
    SceneTransition { from: u8, to: u8 },
    PracticeRetry { scene: u8, attempt: u32 },
    PracticePassed { scene: u8, attempt: u32 },
    SessionComplete,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("event seq {seq} at {sim_time_ms} ms arrives after the clock reached {clock_ms} ms (last seq {last_seq:?})")]
    OutOfOrderEvent { seq: u64, sim_time_ms: u64, clock_ms: u64, last_seq: Option<u64> },
    #[error("event for scene {got} while the session is in scene {expected}")]
    WrongSceneEvent { expected: u8, got: u8 },
    #[error("{kind} not accepted in scene {scene}: {reason}")]
    UnexpectedEvent { scene: u8, kind: &'static str, reason: String },
    #[error("scene {0} has no practice gate")]
    NotAGatedScene(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    AwaitingEntry,
    Active,
    /// The engine has ended the scene; only `SceneExited` moves on.
    AwaitingExit { next: Option<u8> },
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingPrompt {
    pub due_ms: u64,
    pub task: PmTask,
    pub depth: u8,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeRecord {
    /// Prompts shown before the action was performed.
    pub done_at_depth: Option<u8>,
    pub closed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversationRecord {
    pub yes_at_prompt: Option<u8>,
    pub item: Option<String>,
    pub category: Option<ItemCategory>,
    pub closed: bool,
    pub keys_given: bool,
}

/// Raw task data accumulated while the session runs; the scorers read this.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub notes_intent: Vec<bool>,
    pub immediate_selection: BTreeSet<String>,
    pub route_units: BTreeSet<u8>,
    pub route_elapsed_ms: Option<u64>,
    pub cooking_ms: BTreeMap<CookingItem, u64>,
    pub cascades: BTreeMap<PmTask, CascadeRecord>,
    pub conversations: BTreeMap<PmTask, ConversationRecord>,
    pub grabs: Vec<Grab>,
    pub pie_removed: bool,
    pub posters: Vec<VisualSpot>,
    pub sounds: Vec<AuditoryResponse>,
    pub delayed_selection: BTreeSet<String>,
    pub stowed: BTreeSet<String>,
    pub session_complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub current_scene: u8,
    pub phase: Phase,
    pub sim_clock_ms: u64,
    pub last_seq: Option<u64>,
    pub scene_entered_ms: u64,
    pub prompt_depth_by_task: BTreeMap<PmTask, u8>,
    pub practice_attempts: BTreeMap<u8, u32>,
    /// Timer prompts not yet due, in due order.
    pub pending_effects: Vec<PendingPrompt>,
    pub note_open: bool,
    pub record: TaskRecord,
}

impl Default for SessionState {
    fn default() -> Self {
        SessionState {
            current_scene: 1,
            phase: Phase::AwaitingEntry,
            sim_clock_ms: 0,
            last_seq: None,
            scene_entered_ms: 0,
            prompt_depth_by_task: BTreeMap::new(),
            practice_attempts: BTreeMap::new(),
            pending_effects: Vec::new(),
            note_open: false,
            record: TaskRecord::default(),
        }
    }
}

impl SessionState {
    pub fn depth(&self, task: PmTask) -> u8 {
        self.prompt_depth_by_task.get(&task).copied().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.record.session_complete
    }
}

/// Result of replaying a whole event stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub state: SessionState,
    pub effects: Vec<Effect>,
}

/// Scene content plus the transition function.
#[derive(Debug, Clone)]
pub struct Scenario {
    catalog: RecognitionCatalog,
    visual: Vec<Stimulus<VisualKind>>,
    auditory: Vec<Stimulus<AuditoryKind>>,
}

impl Scenario {
    pub fn new(config: &ScoringConfig) -> Self {
        Scenario {
            catalog: RecognitionCatalog::default(),
            visual: config.visual_layout(),
            auditory: config.auditory_layout(),
        }
    }

    pub fn catalog(&self) -> &RecognitionCatalog {
        &self.catalog
    }

    pub fn visual_layout(&self) -> &[Stimulus<VisualKind>] {
        &self.visual
    }

    pub fn auditory_layout(&self) -> &[Stimulus<AuditoryKind>] {
        &self.auditory
    }

    pub fn advance(&self, state: &SessionState, event: &SessionEvent) -> Result<(SessionState, Vec<Effect>), EngineError> {
        let mut next = state.clone();
        let mut effects = Vec::new();
        self.apply(&mut next, event, &mut effects)?;
        Ok((next, effects))
    }

    /// Folds `advance` over `events` from the initial state.
    pub fn replay<'a, I>(&self, events: I) -> Result<Replay, EngineError>
    where
        I: IntoIterator<Item = &'a SessionEvent>,
    {
        let mut state = SessionState::default();
        let mut effects = Vec::new();
        for event in events {
            self.apply(&mut state, event, &mut effects)?;
        }
        Ok(Replay { state, effects })
    }

    /// In-place transition; on error `state` may be partially updated and
    /// must be discarded.
    pub(crate) fn apply(
        &self,
        state: &mut SessionState,
        event: &SessionEvent,
        effects: &mut Vec<Effect>,
    ) -> Result<(), EngineError> {
        if state.last_seq.is_some_and(|last| event.seq <= last) || event.sim_time_ms < state.sim_clock_ms {
            return Err(EngineError::OutOfOrderEvent {
                seq: event.seq,
                sim_time_ms: event.sim_time_ms,
                clock_ms: state.sim_clock_ms,
                last_seq: state.last_seq,
            });
        }
        if event.scene != state.current_scene {
            return Err(EngineError::WrongSceneEvent { expected: state.current_scene, got: event.scene });
        }
        if state.phase == Phase::Active {
            release_due_prompts(state, event.sim_time_ms, effects);
        }
        state.sim_clock_ms = event.sim_time_ms;
        state.last_seq = Some(event.seq);

        let scene_id = state.current_scene;
        let reject = |reason: &str| EngineError::UnexpectedEvent {
            scene: scene_id,
            kind: event.kind.name(),
            reason: reason.to_owned(),
        };

        match state.phase {
            Phase::AwaitingEntry => match event.kind {
                EventKind::SceneEntered => {
                    self.enter_scene(state, event.sim_time_ms, effects);
                    Ok(())
                }
                _ => Err(reject("scene has not been entered")),
            },
            Phase::Exited => Err(reject("session has ended")),
            Phase::AwaitingExit { next } => match &event.kind {
                EventKind::SceneExited => {
                    state.note_open = false;
                    match next {
                        Some(to) => {
                            state.current_scene = to;
                            state.phase = Phase::AwaitingEntry;
                        }
                        None => state.phase = Phase::Exited,
                    }
                    Ok(())
                }
                EventKind::NoteClosed if state.note_open => {
                    state.note_open = false;
                    Ok(())
                }
                EventKind::KeysGiven if scene_id == PmTask::SpareKeys.scene() => {
                    let conv = state.record.conversations.entry(PmTask::SpareKeys).or_default();
                    if conv.category != Some(ItemCategory::Correct) || conv.keys_given {
                        return Err(reject("keys can be handed over once, after choosing them"));
                    }
                    conv.keys_given = true;
                    Ok(())
                }
                _ => Err(reject("scene is over; only SceneExited is accepted")),
            },
            Phase::Active => match &event.kind {
                EventKind::NoteOpened => {
                    if state.note_open {
                        return Err(reject("notes are already open"));
                    }
                    state.note_open = true;
                    Ok(())
                }
                EventKind::NoteClosed => {
                    if !state.note_open {
                        return Err(reject("notes are not open"));
                    }
                    state.note_open = false;
                    Ok(())
                }
                EventKind::SceneEntered => Err(reject("scene already entered")),
                EventKind::SceneExited => Err(reject("scene has not ended yet")),
                _ => self.scene_event(state, event, effects).map_err(|reason| reject(&reason)),
            },
        }
    }

    fn enter_scene(&self, state: &mut SessionState, now: u64, effects: &mut Vec<Effect>) {
        let descriptor = scene(state.current_scene).expect("current scene is valid");
        state.phase = Phase::Active;
        state.scene_entered_ms = now;
        state.note_open = false;
        for spec in &descriptor.pm_tasks {
            match spec.cascade.trigger {
                CascadeTrigger::NpcDialogue => {
                    state.record.conversations.insert(spec.task, ConversationRecord::default());
                    show_prompt(state, spec.task, now, effects);
                }
                CascadeTrigger::Timer => {
                    state.record.cascades.insert(spec.task, CascadeRecord::default());
                    let offsets = spec.cascade.timer_offsets_ms.expect("timer cascades carry offsets");
                    state.pending_effects = offsets
                        .iter()
                        .zip(1..)
                        .map(|(&offset, depth)| PendingPrompt { due_ms: now + offset, task: spec.task, depth })
                        .collect();
                }
                CascadeTrigger::FinalButton | CascadeTrigger::ExitAttempt => {
                    state.record.cascades.insert(spec.task, CascadeRecord::default());
                }
            }
        }
    }

    /// Scene-specific handling. Errors are rejection reasons.
    fn scene_event(&self, state: &mut SessionState, event: &SessionEvent, effects: &mut Vec<Effect>) -> Result<(), String> {
        let descriptor = scene(state.current_scene).expect("current scene is valid");
        let now = event.sim_time_ms;
        let in_scene_ms = now - state.scene_entered_ms;
        let rec = &mut state.record;
        match (descriptor.activity, &event.kind) {
            (Activity::Tutorial, EventKind::TutorialCompleted) => {
                finish_scene(state, effects);
            }
            (Activity::PracticeTrial, &EventKind::PracticeAttempt { targets_hit, distractors_hit }) => {
                if targets_hit > PRACTICE_TARGETS {
                    return Err(format!("only {PRACTICE_TARGETS} practice targets exist"));
                }
                let attempt = PracticeAttempt { targets_hit, distractors_hit };
                let outcome = practice_gate(descriptor.id, attempt).map_err(|e| e.to_string())?;
                let count = state.practice_attempts.entry(descriptor.id).or_insert(0);
                *count += 1;
                let attempt = *count;
                match outcome {
                    GateOutcome::Pass => {
                        effects.push(Effect::PracticePassed { scene: descriptor.id, attempt });
                        finish_scene(state, effects);
                    }
                    GateOutcome::Retry => effects.push(Effect::PracticeRetry { scene: descriptor.id, attempt }),
                }
            }

            (Activity::Bedroom, &EventKind::NotesIntentAnswered { prompt, intends }) => {
                let expected = rec.notes_intent.len() + 1;
                if usize::from(prompt) != expected || expected > 3 {
                    return Err(format!("expected notes prompt {expected}, got {prompt}"));
                }
                rec.notes_intent.push(intends);
            }
            (Activity::Bedroom, EventKind::ItemSelected { item }) => {
                if self.catalog.classify(item).is_none() {
                    return Err(format!("`{item}` is not on the shopping board"));
                }
                if rec.immediate_selection.len() >= self.catalog.list_capacity() {
                    return Err("shopping list is full".into());
                }
                if !rec.immediate_selection.insert(item.clone()) {
                    return Err(format!("`{item}` already selected"));
                }
            }
            (Activity::Bedroom, &EventKind::RouteUnitToggled { unit }) => {
                if rec.route_elapsed_ms.is_some() {
                    return Err("route already submitted".into());
                }
                if !(1..=ROAD_UNITS).contains(&unit) {
                    return Err(format!("street unit {unit} is not on the map"));
                }
                if !rec.route_units.remove(&unit) {
                    rec.route_units.insert(unit);
                }
            }
            (Activity::Bedroom, &EventKind::RouteSubmitted { elapsed_ms }) => {
                if rec.route_elapsed_ms.is_some() {
                    return Err("route already submitted".into());
                }
                if elapsed_ms == 0 || elapsed_ms > in_scene_ms {
                    return Err(format!("planning time {elapsed_ms} ms must be positive and within the scene"));
                }
                rec.route_elapsed_ms = Some(elapsed_ms);
            }
            (Activity::Bedroom, EventKind::FinalButtonPressed) => {
                if rec.notes_intent.len() < 3 || rec.route_elapsed_ms.is_none() {
                    return Err("notes prompts and route must be completed first".into());
                }
                finish_scene(state, effects);
            }

            (Activity::Kitchen, &EventKind::CookingItemPlaced { item, elapsed_ms }) => {
                if elapsed_ms > in_scene_ms {
                    return Err(format!("cooking time {elapsed_ms} ms exceeds time in scene"));
                }
                if rec.cooking_ms.insert(item, elapsed_ms).is_some() {
                    return Err(format!("{} already placed", item.as_str()));
                }
            }
            (Activity::Kitchen, EventKind::MedicationTaken) => {
                take_action(state, PmTask::MedicationBreakfast)?;
            }
            (Activity::Kitchen, EventKind::FinalButtonPressed) => {
                if rec.cooking_ms.len() < CookingItem::ALL.len() {
                    return Err("the final button appears after breakfast is ready".into());
                }
                press_cascade_control(state, PmTask::MedicationBreakfast, now, effects);
            }

            (Activity::LivingRoom, EventKind::ItemSelected { item }) => {
                let grab = if COLLECTION_TARGETS.contains(&item.as_str()) {
                    Grab::TargetItem(item.clone())
                } else if COLLECTION_DISTRACTORS.contains(&item.as_str()) {
                    Grab::DistractorGrabAttempt(item.clone())
                } else {
                    return Err(format!("`{item}` is not in the living room"));
                };
                rec.grabs.push(grab);
            }
            (Activity::LivingRoom, EventKind::PieRemoved) => {
                if rec.pie_removed {
                    return Err("pie already removed".into());
                }
                rec.pie_removed = true;
                take_action(state, PmTask::ChocolatePie)?;
            }
            (Activity::LivingRoom, EventKind::ExitAttempted) => {
                press_cascade_control(state, PmTask::ChocolatePie, now, effects);
            }

            (Activity::Conversation, &EventKind::NpcPromptAnswered { prompt, affirmative }) => {
                let spec = &descriptor.pm_tasks[0];
                let depth = state.prompt_depth_by_task.get(&spec.task).copied().unwrap_or(0);
                let conv = rec.conversations.get_mut(&spec.task).expect("conversation opened on entry");
                if conv.closed || conv.yes_at_prompt.is_some() {
                    return Err("conversation is not waiting for an answer".into());
                }
                if prompt != depth {
                    return Err(format!("answer to prompt {prompt} while prompt {depth} is shown"));
                }
                if affirmative {
                    conv.yes_at_prompt = Some(depth);
                    if spec.polarity == Polarity::NegativeFalsePrompt {
                        conv.closed = true;
                        finish_scene(state, effects);
                    }
                } else if depth < MAX_PROMPT_DEPTH {
                    show_prompt(state, spec.task, now, effects);
                } else {
                    conv.closed = true;
                    finish_scene(state, effects);
                }
            }
            (Activity::Conversation, EventKind::NpcItemChosen { item }) => {
                let spec = &descriptor.pm_tasks[0];
                let board = NpcBoard::for_task(spec.task).ok_or("no item board in this conversation")?;
                let conv = rec.conversations.get_mut(&spec.task).expect("conversation opened on entry");
                if conv.yes_at_prompt.is_none() || conv.closed {
                    return Err("the item board is not shown".into());
                }
                let category = board.categorize(item).ok_or_else(|| format!("`{item}` is not on the board"))?;
                conv.item = Some(item.clone());
                conv.category = Some(category);
                conv.closed = true;
                finish_scene(state, effects);
            }

            (Activity::VisualAttention, &EventKind::PosterSpotted { index, kind, side }) => {
                let stimulus = Stimulus { index, kind, side };
                if self.visual.get(index as usize) != Some(&stimulus) {
                    return Err(format!("no poster {index} of kind {kind:?} on the {side:?}"));
                }
                if rec.posters.iter().any(|p| p.index == index) {
                    return Err(format!("poster {index} already spotted"));
                }
                rec.posters.push(stimulus);
            }
            (Activity::Supermarket, EventKind::ShoppingCollected { item }) => {
                if self.catalog.classify(item).is_none() {
                    return Err(format!("`{item}` is not on the shelves"));
                }
                if rec.delayed_selection.len() >= self.catalog.list_capacity() {
                    return Err("basket is full".into());
                }
                if !rec.delayed_selection.insert(item.clone()) {
                    return Err(format!("`{item}` already in the basket"));
                }
            }
            (Activity::AuditoryAttention, &EventKind::SoundTriggered { index, kind, side, controller }) => {
                if self.auditory.get(index as usize) != Some(&Stimulus { index, kind, side }) {
                    return Err(format!("no sound {index} of kind {kind:?} on the {side:?}"));
                }
                if rec.sounds.iter().any(|s| s.index == index) {
                    return Err(format!("sound {index} already answered"));
                }
                rec.sounds.push(AuditoryResponse { index, kind, stimulus_side: side, response_side: controller });
            }
            (Activity::VisualAttention | Activity::Supermarket | Activity::AuditoryAttention, EventKind::FinalButtonPressed) => {
                finish_scene(state, effects);
            }

            (Activity::PutAway, EventKind::ItemStowed { item }) => {
                if !rec.delayed_selection.contains(item) {
                    return Err(format!("`{item}` was not bought"));
                }
                if !rec.stowed.insert(item.clone()) {
                    return Err(format!("`{item}` already put away"));
                }
            }
            (Activity::PutAway, EventKind::MedicationTaken) => {
                take_action(state, PmTask::MedicationLunch)?;
                state.pending_effects.clear();
            }
            (Activity::PutAway, EventKind::FinalButtonPressed) => {
                state.pending_effects.clear();
                if let Some(c) = state.record.cascades.get_mut(&PmTask::MedicationLunch) {
                    c.closed = true;
                }
                finish_scene(state, effects);
            }

            _ => return Err("not part of this scene".into()),
        }
        Ok(())
    }
}

fn show_prompt(state: &mut SessionState, task: PmTask, at_ms: u64, effects: &mut Vec<Effect>) {
    let depth = state.depth(task) + 1;
    debug_assert!(depth <= MAX_PROMPT_DEPTH);
    state.prompt_depth_by_task.insert(task, depth);
    let text = task.spec().cascade.prompt_texts[depth as usize - 1].to_owned();
    effects.push(Effect::PromptShown { task, depth, text, at_ms });
}

fn release_due_prompts(state: &mut SessionState, now: u64, effects: &mut Vec<Effect>) {
    while let Some(&pending) = state.pending_effects.first() {
        if pending.due_ms > now {
            break;
        }
        state.pending_effects.remove(0);
        let done = state.record.cascades.get(&pending.task).is_some_and(|c| c.done_at_depth.is_some());
        if !done && state.depth(pending.task) + 1 == pending.depth {
            show_prompt(state, pending.task, pending.due_ms, effects);
        }
    }
}

fn take_action(state: &mut SessionState, task: PmTask) -> Result<(), String> {
    let depth = state.depth(task);
    let cascade = state.record.cascades.get_mut(&task).expect("cascade opened on entry");
    if cascade.done_at_depth.is_some() {
        return Err("already done".into());
    }
    cascade.done_at_depth = Some(depth);
    Ok(())
}

/// Final button (kitchen) or exit attempt (living room): ends the scene once
/// the action is done or three prompts went unanswered; otherwise prompts.
fn press_cascade_control(state: &mut SessionState, task: PmTask, now: u64, effects: &mut Vec<Effect>) {
    let depth = state.depth(task);
    let cascade = state.record.cascades.get_mut(&task).expect("cascade opened on entry");
    if cascade.done_at_depth.is_some() || depth == MAX_PROMPT_DEPTH {
        cascade.closed = true;
        finish_scene(state, effects);
    } else {
        show_prompt(state, task, now, effects);
    }
}

fn finish_scene(state: &mut SessionState, effects: &mut Vec<Effect>) {
    let from = state.current_scene;
    state.pending_effects.clear();
    let next = if from == SCENE_COUNT {
        state.record.session_complete = true;
        effects.push(Effect::SessionComplete);
        None
    } else {
        effects.push(Effect::SceneTransition { from, to: from + 1 });
        Some(from + 1)
    };
    state.phase = Phase::AwaitingExit { next };
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Driver {
        scenario: Scenario,
        state: SessionState,
        seq: u64,
        time: u64,
    }

    impl Driver {
        fn new() -> Self {
            Driver { scenario: Scenario::new(&ScoringConfig::default()), state: SessionState::default(), seq: 0, time: 0 }
        }

        fn send_at(&mut self, time: u64, kind: EventKind) -> Result<Vec<Effect>, EngineError> {
            let event = SessionEvent { seq: self.seq, sim_time_ms: time, scene: self.state.current_scene, kind };
            let (next, effects) = self.scenario.advance(&self.state, &event)?;
            self.state = next;
            self.seq += 1;
            self.time = time;
            Ok(effects)
        }

        fn send(&mut self, kind: EventKind) -> Vec<Effect> {
            let t = self.time + 1000;
            self.send_at(t, kind).unwrap()
        }

        /// Walks scenes with the minimum events until `target` is entered.
        fn skip_to(&mut self, target: u8) {
            self.send(EventKind::SceneEntered);
            while self.state.current_scene < target {
                self.finish_current();
                self.send(EventKind::SceneExited);
                self.send(EventKind::SceneEntered);
            }
        }

        fn finish_current(&mut self) {
            let id = self.state.current_scene;
            match scene(id).unwrap().activity {
                Activity::Tutorial => {
                    self.send(EventKind::TutorialCompleted);
                }
                Activity::PracticeTrial => {
                    self.send(EventKind::PracticeAttempt { targets_hit: 3, distractors_hit: 0 });
                }
                Activity::Bedroom => {
                    for prompt in 1..=3 {
                        self.send(EventKind::NotesIntentAnswered { prompt, intends: true });
                    }
                    self.send(EventKind::RouteSubmitted { elapsed_ms: 500 });
                    self.send(EventKind::FinalButtonPressed);
                }
                Activity::Kitchen => {
                    for item in CookingItem::ALL {
                        self.send(EventKind::CookingItemPlaced { item, elapsed_ms: 1 });
                    }
                    self.send(EventKind::MedicationTaken);
                    self.send(EventKind::FinalButtonPressed);
                }
                Activity::LivingRoom => {
                    self.send(EventKind::PieRemoved);
                    self.send(EventKind::ExitAttempted);
                }
                Activity::Conversation => {
                    let task = scene(id).unwrap().pm_tasks[0].task;
                    let positive = task.spec().polarity == Polarity::Positive;
                    if positive {
                        self.send(EventKind::NpcPromptAnswered { prompt: 1, affirmative: true });
                        let item = NpcBoard::for_task(task).unwrap().correct.to_owned();
                        self.send(EventKind::NpcItemChosen { item });
                    } else {
                        for prompt in 1..=MAX_PROMPT_DEPTH {
                            self.send(EventKind::NpcPromptAnswered { prompt, affirmative: false });
                        }
                    }
                }
                Activity::VisualAttention | Activity::Supermarket | Activity::AuditoryAttention | Activity::PutAway => {
                    self.send(EventKind::FinalButtonPressed);
                }
            }
        }
    }

    #[test]
    fn sequence_matches_scenario_table() {
        let seq = scene_sequence();
        assert_eq!(seq.len(), 22);
        assert!(seq.iter().enumerate().all(|(i, s)| s.id as usize == i + 1));
        assert_eq!(seq[0].kind, SceneKind::Tutorial);
        assert_eq!(seq[0].title, "Basic interactions and navigation");
        let tutorials: Vec<u8> = seq.iter().filter(|s| s.kind == SceneKind::Tutorial).map(|s| s.id).collect();
        assert_eq!(tutorials, vec![1, 2, 4, 5, 7, 9, 11, 13, 18]);
        assert_eq!(seq.iter().filter(|s| s.kind == SceneKind::Storyline).count(), 13);
        let gated: Vec<u8> = seq.iter().filter(|s| s.gated_by_practice).map(|s| s.id).collect();
        assert_eq!(gated, vec![11, 18]);
    }

    #[test]
    fn pm_annotations() {
        use PmBasis::*;
        use PmDelay::*;
        let expected = [
            (6, EventBased, Short),
            (8, EventBased, Short),
            (10, TimeBased, Short),
            (15, TimeBased, Medium),
            (16, EventBased, Medium),
            (17, EventBased, Medium),
            (20, TimeBased, Long),
            (21, EventBased, Long),
            (22, TimeBased, Long),
        ];
        for (id, basis, delay) in expected {
            let spec = &scene(id).unwrap().pm_tasks[0];
            assert_eq!((spec.basis, spec.delay), (basis, delay), "scene {id}");
        }
        let negative: Vec<u8> = PmTask::ALL
            .iter()
            .filter(|t| t.spec().polarity == Polarity::NegativeFalsePrompt)
            .map(|t| t.scene())
            .collect();
        assert_eq!(negative, vec![16, 20]);
        let last = &scene(22).unwrap().pm_tasks[0].cascade;
        assert_eq!(last.trigger, CascadeTrigger::Timer);
        assert_eq!(last.timer_offsets_ms, Some([70_000, 80_000, 90_000]));
        for spec in scene_sequence().iter().flat_map(|s| &s.pm_tasks) {
            assert_eq!(spec.cascade.timer_offsets_ms.is_some(), spec.cascade.trigger == CascadeTrigger::Timer);
        }
    }

    #[test]
    fn practice_gate_rule() {
        let attempt = |t, d| PracticeAttempt { targets_hit: t, distractors_hit: d };
        assert_eq!(practice_gate(11, attempt(3, 0)), Ok(GateOutcome::Pass));
        assert_eq!(practice_gate(11, attempt(2, 0)), Ok(GateOutcome::Retry));
        assert_eq!(practice_gate(18, attempt(3, 1)), Ok(GateOutcome::Retry));
        assert_eq!(practice_gate(12, attempt(3, 0)), Err(EngineError::NotAGatedScene(12)));
    }

    #[test]
    fn kitchen_medication_cascade() {
        let mut d = Driver::new();
        d.skip_to(6);
        for item in CookingItem::ALL {
            d.send(EventKind::CookingItemPlaced { item, elapsed_ms: 1 });
        }
        let fx = d.send(EventKind::FinalButtonPressed);
        assert!(matches!(
            &fx[..],
            [Effect::PromptShown { task: PmTask::MedicationBreakfast, depth: 1, text, .. }]
                if text == "You Have to Do Something Else"
        ));
        d.send(EventKind::MedicationTaken);
        let fx = d.send(EventKind::FinalButtonPressed);
        assert_eq!(fx, vec![Effect::SceneTransition { from: 6, to: 7 }]);
        assert_eq!(d.state.record.cascades[&PmTask::MedicationBreakfast].done_at_depth, Some(1));
    }

    #[test]
    fn kitchen_medication_before_button_ends_scene() {
        let mut d = Driver::new();
        d.skip_to(6);
        d.send(EventKind::MedicationTaken);
        for item in CookingItem::ALL {
            d.send(EventKind::CookingItemPlaced { item, elapsed_ms: 1 });
        }
        assert_eq!(d.send(EventKind::FinalButtonPressed), vec![Effect::SceneTransition { from: 6, to: 7 }]);
    }

    #[test]
    fn kitchen_never_taken_ends_after_third_prompt() {
        let mut d = Driver::new();
        d.skip_to(6);
        for item in CookingItem::ALL {
            d.send(EventKind::CookingItemPlaced { item, elapsed_ms: 1 });
        }
        let depths: Vec<u8> = (0..3)
            .flat_map(|_| d.send(EventKind::FinalButtonPressed))
            .filter_map(|e| match e {
                Effect::PromptShown { depth, .. } => Some(depth),
                _ => None,
            })
            .collect();
        assert_eq!(depths, vec![1, 2, 3]);
        assert_eq!(d.send(EventKind::FinalButtonPressed), vec![Effect::SceneTransition { from: 6, to: 7 }]);
        assert_eq!(d.state.record.cascades[&PmTask::MedicationBreakfast].done_at_depth, None);
    }

    #[test]
    fn final_button_needs_breakfast() {
        let mut d = Driver::new();
        d.skip_to(6);
        let t = d.time + 1;
        assert!(matches!(
            d.send_at(t, EventKind::FinalButtonPressed),
            Err(EngineError::UnexpectedEvent { scene: 6, .. })
        ));
    }

    #[test]
    fn lunch_timer_prompts() {
        let mut d = Driver::new();
        d.skip_to(22);
        let entered = d.state.scene_entered_ms;
        let fx = d.send_at(entered + 69_999, EventKind::NoteOpened).unwrap();
        assert!(fx.is_empty());
        let fx = d.send_at(entered + 70_000, EventKind::NoteClosed).unwrap();
        assert!(matches!(&fx[..], [Effect::PromptShown { depth: 1, task: PmTask::MedicationLunch, .. }]));
        // Both remaining prompts surface at the next event, stamped with their due time.
        let fx = d.send_at(entered + 95_000, EventKind::MedicationTaken).unwrap();
        let stamps: Vec<(u8, u64)> = fx
            .iter()
            .filter_map(|e| match e {
                Effect::PromptShown { depth, at_ms, .. } => Some((*depth, *at_ms - entered)),
                _ => None,
            })
            .collect();
        assert_eq!(stamps, vec![(2, 80_000), (3, 90_000)]);
        assert_eq!(d.state.record.cascades[&PmTask::MedicationLunch].done_at_depth, Some(3));
        let fx = d.send(EventKind::FinalButtonPressed);
        assert_eq!(fx, vec![Effect::SessionComplete]);
        assert!(d.state.is_complete());
    }

    #[test]
    fn lunch_taken_on_time() {
        let mut d = Driver::new();
        d.skip_to(22);
        let entered = d.state.scene_entered_ms;
        d.send_at(entered + 30_000, EventKind::MedicationTaken).unwrap();
        let fx = d.send_at(entered + 200_000, EventKind::FinalButtonPressed).unwrap();
        assert_eq!(fx, vec![Effect::SessionComplete]);
        assert_eq!(d.state.record.cascades[&PmTask::MedicationLunch].done_at_depth, Some(0));
        assert_eq!(d.state.depth(PmTask::MedicationLunch), 0);
    }

    #[test]
    fn conversation_flow() {
        let mut d = Driver::new();
        d.skip_to(10);
        assert_eq!(d.state.depth(PmTask::CallRose), 1);
        let fx = d.send(EventKind::NpcPromptAnswered { prompt: 1, affirmative: false });
        assert!(matches!(&fx[..], [Effect::PromptShown { depth: 2, .. }]));
        let fx = d.send(EventKind::NpcPromptAnswered { prompt: 2, affirmative: true });
        assert!(fx.is_empty());
        let fx = d.send(EventKind::NpcItemChosen { item: "tablet_computer".into() });
        assert_eq!(fx, vec![Effect::SceneTransition { from: 10, to: 11 }]);
        let conv = &d.state.record.conversations[&PmTask::CallRose];
        assert_eq!(conv.yes_at_prompt, Some(2));
        assert_eq!(conv.category, Some(ItemCategory::SemanticRelative));
    }

    #[test]
    fn conversation_answer_must_match_prompt() {
        let mut d = Driver::new();
        d.skip_to(10);
        let t = d.time + 1;
        assert!(d.send_at(t, EventKind::NpcPromptAnswered { prompt: 2, affirmative: true }).is_err());
    }

    #[test]
    fn false_prompt_affirmed_ends_scene() {
        let mut d = Driver::new();
        d.skip_to(16);
        let fx = d.send(EventKind::NpcPromptAnswered { prompt: 1, affirmative: true });
        assert_eq!(fx, vec![Effect::SceneTransition { from: 16, to: 17 }]);
        assert_eq!(d.state.record.conversations[&PmTask::BakeryFalsePrompt].yes_at_prompt, Some(1));
    }

    #[test]
    fn practice_retry_then_pass() {
        let mut d = Driver::new();
        d.skip_to(11);
        let fx = d.send(EventKind::PracticeAttempt { targets_hit: 2, distractors_hit: 0 });
        assert_eq!(fx, vec![Effect::PracticeRetry { scene: 11, attempt: 1 }]);
        let fx = d.send(EventKind::PracticeAttempt { targets_hit: 3, distractors_hit: 0 });
        assert_eq!(
            fx,
            vec![Effect::PracticePassed { scene: 11, attempt: 2 }, Effect::SceneTransition { from: 11, to: 12 }]
        );
        assert_eq!(d.state.practice_attempts[&11], 2);
    }

    #[test]
    fn cannot_skip_a_gated_scene() {
        let mut d = Driver::new();
        d.skip_to(11);
        let t = d.time + 1;
        assert!(matches!(d.send_at(t, EventKind::SceneExited), Err(EngineError::UnexpectedEvent { .. })));
        let event = SessionEvent { seq: d.seq, sim_time_ms: t, scene: 12, kind: EventKind::SceneEntered };
        assert_eq!(
            d.scenario.advance(&d.state, &event),
            Err(EngineError::WrongSceneEvent { expected: 11, got: 12 })
        );
    }

    #[test]
    fn time_regression_is_rejected() {
        let mut d = Driver::new();
        d.send_at(5_000, EventKind::SceneEntered).unwrap();
        assert!(matches!(
            d.send_at(4_999, EventKind::TutorialCompleted),
            Err(EngineError::OutOfOrderEvent { .. })
        ));
    }

    #[test]
    fn stimulus_must_match_layout() {
        let mut d = Driver::new();
        d.skip_to(12);
        let t = d.time + 1;
        let wrong_side = EventKind::PosterSpotted { index: 0, kind: VisualKind::Target, side: crate::catalog::Side::Right };
        assert!(d.send_at(t, wrong_side).is_err());
        let ok = EventKind::PosterSpotted { index: 0, kind: VisualKind::Target, side: crate::catalog::Side::Left };
        d.send_at(t, ok.clone()).unwrap();
        assert!(d.send_at(t, ok).is_err());
    }

    #[test]
    fn full_walk_visits_every_scene_once() {
        let mut d = Driver::new();
        d.skip_to(22);
        d.finish_current();
        d.send(EventKind::SceneExited);
        assert_eq!(d.state.phase, Phase::Exited);
        assert!(d.state.is_complete());
        let t = d.time + 1;
        assert!(d.send_at(t, EventKind::NoteOpened).is_err());
    }
}
