use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EventKind, LogError, SessionLog};
use crate::scenario::{scene, SceneKind};

/// How often and for how long the PM notes were open in one scene.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteViews {
    pub opens: u32,
    pub open_ms: u64,
}

/// Timing and help-seeking measures derived from a log. Durations in ms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    pub tutorial_time_ms: BTreeMap<u8, u64>,
    pub practice_attempts: BTreeMap<u8, u32>,
    pub notes_views: BTreeMap<u8, NoteViews>,
    pub scene_time_ms: BTreeMap<u8, u64>,
    /// Storyline scenes: entry to the last task action, excluding the walk out.
    pub task_time_ms: BTreeMap<u8, u64>,
    pub notes_intent: Vec<bool>,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct OpenScene {
    id: u8,
    entered_ms: u64,
    last_action_ms: Option<u64>,
    note_opened_ms: Option<u64>,
}

/// Reads timings straight from the events; the log is not replayed.
pub fn derive_telemetry(log: &SessionLog) -> Result<Telemetry, LogError> {
    let mut t = Telemetry::default();
    for id in scene_ids(|s| s.gated_by_practice) {
        t.practice_attempts.insert(id, 0);
    }
    for id in scene_ids(|s| !s.pm_tasks.is_empty()) {
        t.notes_views.insert(id, NoteViews::default());
    }

    let mut current: Option<OpenScene> = None;
    for event in log.events() {
        let now = event.sim_time_ms;
        let malformed = |what: &str| LogError::MalformedLog(format!("seq {}: {what}", event.seq));
        if let EventKind::SceneEntered = event.kind {
            if let Some(open) = &current {
                return Err(malformed(&format!("scene {} entered while scene {} is open", event.scene, open.id)));
            }
            if scene(event.scene).is_none() {
                return Err(malformed(&format!("no scene {}", event.scene)));
            }
            current = Some(OpenScene { id: event.scene, entered_ms: now, ..OpenScene::default() });
            continue;
        }
        let open = match current.as_mut() {
            Some(open) if open.id == event.scene => open,
            _ => return Err(malformed(&format!("{} outside an entered scene", event.kind.name()))),
        };
        match &event.kind {
            EventKind::SceneExited => {
                let open = current.take().expect("checked above");
                if let Some(opened) = open.note_opened_ms {
                    t.warnings.push(format!("scene {}: notes still open at exit, closed at {} ms", open.id, now));
                    add_view(&mut t, open.id, now - opened);
                }
                let descriptor = scene(open.id).expect("validated on entry");
                let duration = now - open.entered_ms;
                t.scene_time_ms.insert(open.id, duration);
                match descriptor.kind {
                    SceneKind::Tutorial => {
                        t.tutorial_time_ms.insert(open.id, duration);
                    }
                    SceneKind::Storyline => {
                        let last = open.last_action_ms.unwrap_or(open.entered_ms);
                        t.task_time_ms.insert(open.id, last - open.entered_ms);
                    }
                }
            }
            EventKind::NoteOpened => {
                if open.note_opened_ms.is_some() {
                    return Err(malformed("notes opened twice"));
                }
                open.note_opened_ms = Some(now);
            }
            EventKind::NoteClosed => {
                let opened = open.note_opened_ms.take().ok_or_else(|| malformed("notes closed while not open"))?;
                add_view(&mut t, open.id, now - opened);
            }
            EventKind::PracticeAttempt { .. } => {
                *t.practice_attempts.entry(open.id).or_insert(0) += 1;
                open.last_action_ms = Some(now);
            }
            EventKind::NotesIntentAnswered { intends, .. } => {
                t.notes_intent.push(*intends);
                open.last_action_ms = Some(now);
            }
            // Handing over the keys happens after the scene's task has closed.
            EventKind::KeysGiven => {}
            _ => open.last_action_ms = Some(now),
        }
    }
    if let Some(open) = current {
        t.warnings.push(format!("scene {} was never exited", open.id));
    }
    Ok(t)
}

fn add_view(t: &mut Telemetry, scene_id: u8, duration_ms: u64) {
    let views = t.notes_views.entry(scene_id).or_default();
    views.opens += 1;
    views.open_ms += duration_ms;
}

fn scene_ids(pred: impl Fn(&crate::scenario::SceneDescriptor) -> bool) -> Vec<u8> {
    crate::scenario::scene_sequence().iter().filter(|s| pred(s)).map(|s| s.id).collect()
}
