//! Append-only session event log, its NDJSON codec, telemetry derivation and
//! the plain-text report.

mod codec;
mod report;
mod telemetry;

pub use codec::{deserialize_log, serialize_log};
pub use report::export_report;
pub use telemetry::{derive_telemetry, NoteViews, Telemetry};

use serde::{Deserialize, Serialize};

use crate::catalog::{AuditoryKind, Side, VisualKind};
use crate::scoring::CookingItem;

pub const LOG_FORMAT: &str = "vreal-session-log";
pub const SCHEMA_VERSION: u32 = 1;

/// Everything a participant (real or simulated) does, one variant per kind.
/// The scene's completion control (final button, the till, end of a car
/// ride) is `FinalButtonPressed` everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventKind {
    SceneEntered,
    SceneExited,
    TutorialCompleted,
    PracticeAttempt { targets_hit: u8, distractors_hit: u8 },
    ItemSelected { item: String },
    RouteUnitToggled { unit: u8 },
    RouteSubmitted { elapsed_ms: u64 },
    CookingItemPlaced { item: CookingItem, elapsed_ms: u64 },
    FinalButtonPressed,
    ExitAttempted,
    MedicationTaken,
    PieRemoved,
    NoteOpened,
    NoteClosed,
    NpcPromptAnswered { prompt: u8, affirmative: bool },
    NpcItemChosen { item: String },
    PosterSpotted { index: u16, kind: VisualKind, side: Side },
    SoundTriggered { index: u16, kind: AuditoryKind, side: Side, controller: Side },
    ShoppingCollected { item: String },
    KeysGiven,
    ItemStowed { item: String },
    NotesIntentAnswered { prompt: u8, intends: bool },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SceneEntered => "SceneEntered",
            EventKind::SceneExited => "SceneExited",
            EventKind::TutorialCompleted => "TutorialCompleted",
            EventKind::PracticeAttempt { .. } => "PracticeAttempt",
            EventKind::ItemSelected { .. } => "ItemSelected",
            EventKind::RouteUnitToggled { .. } => "RouteUnitToggled",
            EventKind::RouteSubmitted { .. } => "RouteSubmitted",
            EventKind::CookingItemPlaced { .. } => "CookingItemPlaced",
            EventKind::FinalButtonPressed => "FinalButtonPressed",
            EventKind::ExitAttempted => "ExitAttempted",
            EventKind::MedicationTaken => "MedicationTaken",
            EventKind::PieRemoved => "PieRemoved",
            EventKind::NoteOpened => "NoteOpened",
            EventKind::NoteClosed => "NoteClosed",
            EventKind::NpcPromptAnswered { .. } => "NpcPromptAnswered",
            EventKind::NpcItemChosen { .. } => "NpcItemChosen",
            EventKind::PosterSpotted { .. } => "PosterSpotted",
            EventKind::SoundTriggered { .. } => "SoundTriggered",
            EventKind::ShoppingCollected { .. } => "ShoppingCollected",
            EventKind::KeysGiven => "KeysGiven",
            EventKind::ItemStowed { .. } => "ItemStowed",
            EventKind::NotesIntentAnswered { .. } => "NotesIntentAnswered",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub seq: u64,
    pub sim_time_ms: u64,
    pub scene: u8,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// First line of every log file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub config_hash: Option<String>,
}

impl LogHeader {
    pub fn new(seed: Option<u64>, config_hash: Option<String>) -> Self {
        LogHeader { format: LOG_FORMAT.to_owned(), schema_version: SCHEMA_VERSION, seed, config_hash }
    }
}

impl Default for LogHeader {
    fn default() -> Self {
        LogHeader::new(None, None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("event seq {seq} at {sim_time_ms} ms does not follow seq {last_seq} at {last_time_ms} ms")]
    MonotonicityViolation { seq: u64, sim_time_ms: u64, last_seq: u64, last_time_ms: u64 },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("log schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("malformed log: {0}")]
    MalformedLog(String),
}

/// Ordered event history. Events can only be appended.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SessionLog {
    header: LogHeader,
    events: Vec<SessionEvent>,
}

impl SessionLog {
    pub fn new(header: LogHeader) -> Self {
        SessionLog { header, events: Vec::new() }
    }

    pub fn header(&self) -> &LogHeader {
        &self.header
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Appends `event`; seq must strictly increase and time must not go back.
    /// Equal timestamps are ordered by seq.
    pub fn append(&mut self, event: SessionEvent) -> Result<(), LogError> {
        if let Some(last) = self.events.last() {
            if event.seq <= last.seq || event.sim_time_ms < last.sim_time_ms {
                return Err(LogError::MonotonicityViolation {
                    seq: event.seq,
                    sim_time_ms: event.sim_time_ms,
                    last_seq: last.seq,
                    last_time_ms: last.sim_time_ms,
                });
            }
        }
        self.events.push(event);
        Ok(())
    }

    /// Appends with the next seq number.
    pub fn record(&mut self, scene: u8, sim_time_ms: u64, kind: EventKind) -> Result<&SessionEvent, LogError> {
        let seq = self.events.last().map_or(0, |e| e.seq + 1);
        self.append(SessionEvent { seq, sim_time_ms, scene, kind })?;
        Ok(self.events.last().expect("just pushed"))
    }
}
