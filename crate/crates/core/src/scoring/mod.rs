//! Pure scoring functions for every task, and the session-level scorecard.

mod attention;
mod cooking;
mod planning;
mod pm;
mod recognition;
mod scorecard;

pub use attention::{
    score_auditory_attention, score_collection, score_visual_attention, AuditoryCounts,
    AuditoryResponse, AuditoryScore, CollectionScore, Grab, VisualCounts, VisualScore, VisualSpot,
};
pub use cooking::{
    band_lower_bounds_cs, classify_cooking_cs, classify_cooking_time, score_cooking, BandPoints,
    CookingBand, CookingItem, CookingScore, CookingTimeline,
};
pub use planning::{
    score_planning, time_modifier, NormativeTiming, PlanningScore, RouteSelection,
    TimeModifierSteps, IDEAL_ROUTE_UNITS, ROAD_UNITS,
};
pub use pm::{
    score_npc_pm_negative, score_npc_pm_positive, score_prompt_cascade, ItemPoints,
    NegativeDeductions, NpcPmOutcome, PositiveMatrix, CASCADE_NEVER_DONE,
};
pub use recognition::score_recognition;
pub use scorecard::{aggregate_scorecard, score_state, ScorecardError, TaskScorecard};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoringError {
    #[error("item `{0}` is not in the catalog")]
    UnknownItem(String),
    #[error("{selected} items selected but the list holds {capacity}")]
    SelectionTooLarge { selected: usize, capacity: usize },
    #[error("prompt depth {0} is outside 0..=4")]
    CascadeDepthOutOfRange(u8),
    #[error("prompt number {0} is outside 0..=3")]
    PromptOutOfRange(u8),
    #[error("item choice must be present exactly when a prompt was affirmed")]
    MalformedOutcome,
    #[error("stimulus {0} spotted more than once")]
    DuplicateSpot(u16),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
    #[error("invalid timing: {0}")]
    InvalidTiming(String),
}
