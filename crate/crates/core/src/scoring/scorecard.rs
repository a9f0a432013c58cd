use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cooking::ms_to_centis;
use super::{
    score_auditory_attention, score_collection, score_cooking, score_npc_pm_negative, score_npc_pm_positive,
    score_planning, score_prompt_cascade, score_recognition, score_visual_attention, AuditoryScore,
    CollectionScore, CookingItem, CookingScore, CookingTimeline, NpcPmOutcome, PlanningScore, RouteSelection,
    ScoringError, CASCADE_NEVER_DONE,
};
use crate::config::ScoringConfig;
use crate::scenario::{CascadeTrigger, PmTask, Polarity, Scenario, SessionState};
use crate::session_log::SessionLog;

/// Every task score of one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskScorecard {
    pub pm_notes_intent: Vec<bool>,
    pub immediate_recognition: u32,
    pub planning: PlanningScore,
    pub cooking: CookingScore,
    pub pm_scores: BTreeMap<PmTask, i32>,
    /// Cascade tasks: prompts shown before the action (4 = never done).
    /// Conversations: prompt answered "yes" (0 = never).
    pub pm_prompt_depths: BTreeMap<PmTask, u8>,
    pub collection: CollectionScore,
    pub visual_attention: crate::scoring::VisualScore,
    pub delayed_recognition: u32,
    pub auditory_attention: AuditoryScore,
}

impl TaskScorecard {
    pub fn pm_total(&self) -> i32 {
        self.pm_scores.values().sum()
    }

    /// Sum of the two false-prompt deductions.
    pub fn pm_deductions(&self) -> i32 {
        self.pm_scores
            .iter()
            .filter(|(task, _)| task.spec().polarity == Polarity::NegativeFalsePrompt)
            .map(|(_, points)| points)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScorecardError {
    #[error("session did not reach the end of scene 22 (stopped in scene {scene})")]
    IncompleteSession { scene: u8 },
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("invalid scoring config: {0}")]
    InvalidConfig(String),
}

impl From<ScoringError> for ScorecardError {
    fn from(e: ScoringError) -> Self {
        ScorecardError::MalformedLog(e.to_string())
    }
}

/// Replays `log` through the scenario engine and scores the final state.
pub fn aggregate_scorecard(log: &SessionLog, config: &ScoringConfig) -> Result<TaskScorecard, ScorecardError> {
    config.validate().map_err(|e| ScorecardError::InvalidConfig(e.to_string()))?;
    let replay = Scenario::new(config)
        .replay(log.events())
        .map_err(|e| ScorecardError::MalformedLog(e.to_string()))?;
    score_state(&replay.state, config)
}

/// Scores a finished session state.
pub fn score_state(state: &SessionState, config: &ScoringConfig) -> Result<TaskScorecard, ScorecardError> {
    if !state.is_complete() {
        return Err(ScorecardError::IncompleteSession { scene: state.current_scene });
    }
    let rec = &state.record;
    let catalog = crate::catalog::RecognitionCatalog::default();
    let missing = |what: &str| ScorecardError::MalformedLog(format!("complete session without {what}"));

    let route_ms = rec.route_elapsed_ms.ok_or_else(|| missing("a submitted route"))?;
    let units: Vec<u8> = rec.route_units.iter().copied().collect();
    let route = RouteSelection::new(&units, route_ms as f64 / 1000.0)?;

    // Exact centisecond values so classification sees the half-up rounded time.
    let cooking_s = |item: CookingItem| -> Result<f64, ScorecardError> {
        let ms = rec.cooking_ms.get(&item).ok_or_else(|| missing(item.as_str()))?;
        Ok(ms_to_centis(*ms) as f64 / 100.0)
    };
    let timeline = CookingTimeline::new(
        cooking_s(CookingItem::Omelette)?,
        cooking_s(CookingItem::Sausages)?,
        cooking_s(CookingItem::Kettle)?,
    )?;

    let mut pm_scores = BTreeMap::new();
    let mut pm_prompt_depths = BTreeMap::new();
    for task in PmTask::ALL {
        let spec = task.spec();
        let (points, depth) = match (spec.cascade.trigger, spec.polarity) {
            (CascadeTrigger::NpcDialogue, polarity) => {
                let conv = rec.conversations.get(&task).ok_or_else(|| missing(task.as_str()))?;
                let yes = conv.yes_at_prompt.unwrap_or(0);
                let points = match polarity {
                    Polarity::Positive => {
                        let outcome = NpcPmOutcome::new(yes, conv.category)?;
                        score_npc_pm_positive(&outcome, &config.positive_matrix)
                    }
                    Polarity::NegativeFalsePrompt => score_npc_pm_negative(yes, &config.negative_deductions)?,
                };
                (points, yes)
            }
            _ => {
                let cascade = rec.cascades.get(&task).ok_or_else(|| missing(task.as_str()))?;
                let depth = cascade.done_at_depth.unwrap_or(CASCADE_NEVER_DONE);
                (score_prompt_cascade(depth)?, depth)
            }
        };
        pm_scores.insert(task, points);
        pm_prompt_depths.insert(task, depth);
    }

    Ok(TaskScorecard {
        pm_notes_intent: rec.notes_intent.clone(),
        immediate_recognition: score_recognition(rec.immediate_selection.iter().map(String::as_str), &catalog)?,
        planning: score_planning(&route, &config.planning_norms, &config.time_modifier),
        cooking: score_cooking(&timeline, &config.cooking_band_points),
        pm_scores,
        pm_prompt_depths,
        collection: score_collection(&rec.grabs)?,
        visual_attention: score_visual_attention(&rec.posters)?,
        delayed_recognition: score_recognition(rec.delayed_selection.iter().map(String::as_str), &catalog)?,
        auditory_attention: score_auditory_attention(&rec.sounds),
    })
}
