use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::catalog::{AuditoryKind, Side, Stimulus, VisualKind, COLLECTION_TARGETS};

/// One grab in the living room. Distractors fall and count as errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grab {
    TargetItem(String),
    DistractorGrabAttempt(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionScore {
    pub points: u32,
    pub errors: u32,
}

pub fn score_collection(grabs: &[Grab]) -> Result<CollectionScore, ScoringError> {
    let mut collected = BTreeSet::new();
    let mut errors = 0;
    for grab in grabs {
        match grab {
            Grab::TargetItem(id) => {
                if !COLLECTION_TARGETS.contains(&id.as_str()) {
                    return Err(ScoringError::UnknownItem(id.clone()));
                }
                collected.insert(id.as_str());
            }
            Grab::DistractorGrabAttempt(_) => errors += 1,
        }
    }
    Ok(CollectionScore { points: collected.len() as u32, errors })
}

pub type VisualSpot = Stimulus<VisualKind>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualCounts {
    pub targets: u32,
    pub shape_distractors: u32,
    pub color_distractors: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualScore {
    pub points: i32,
    pub left: VisualCounts,
    pub right: VisualCounts,
}

/// +1 per spotted target, -1 per spotted distractor.
pub fn score_visual_attention(spots: &[VisualSpot]) -> Result<VisualScore, ScoringError> {
    let mut seen = BTreeSet::new();
    let mut left = VisualCounts::default();
    let mut right = VisualCounts::default();
    let mut points = 0;
    for spot in spots {
        if !seen.insert(spot.index) {
            return Err(ScoringError::DuplicateSpot(spot.index));
        }
        let counts = match spot.side {
            Side::Left => &mut left,
            Side::Right => &mut right,
        };
        match spot.kind {
            VisualKind::Target => {
                counts.targets += 1;
                points += 1;
            }
            VisualKind::ShapeDistractor => {
                counts.shape_distractors += 1;
                points -= 1;
            }
            VisualKind::ColorDistractor => {
                counts.color_distractors += 1;
                points -= 1;
            }
        }
    }
    Ok(VisualScore { points, left, right })
}

/// A trigger press tied to the sound that was playing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditoryResponse {
    pub index: u16,
    pub kind: AuditoryKind,
    pub stimulus_side: Side,
    pub response_side: Side,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditoryCounts {
    pub targets: u32,
    pub high_pitch: u32,
    pub low_pitch: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditoryScore {
    pub points: i32,
    pub detected: AuditoryCounts,
    /// Detections by the side the sound came from.
    pub left: u32,
    pub right: u32,
    /// Targets answered with the controller on the opposite side.
    pub wrong_controller: u32,
}

/// Target on the matching controller +2, on the other controller +1; any
/// response to a distractor -1.
pub fn score_auditory_attention(responses: &[AuditoryResponse]) -> AuditoryScore {
    let mut score = AuditoryScore {
        points: 0,
        detected: AuditoryCounts::default(),
        left: 0,
        right: 0,
        wrong_controller: 0,
    };
    for r in responses {
        match r.stimulus_side {
            Side::Left => score.left += 1,
            Side::Right => score.right += 1,
        }
        match r.kind {
            AuditoryKind::Target => {
                score.detected.targets += 1;
                if r.response_side == r.stimulus_side {
                    score.points += 2;
                } else {
                    score.points += 1;
                    score.wrong_controller += 1;
                }
            }
            AuditoryKind::HighPitch => {
                score.detected.high_pitch += 1;
                score.points -= 1;
            }
            AuditoryKind::LowPitch => {
                score.detected.low_pitch += 1;
                score.points -= 1;
            }
        }
    }
    score
}
