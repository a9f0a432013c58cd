//! Prospective-memory scoring: prompt cascades (medication, pie), NPC
//! conversations with an item board, and false-prompt conversations.

use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::catalog::ItemCategory;

/// Depth value recorded when the action was never performed.
pub const CASCADE_NEVER_DONE: u8 = 4;

const CASCADE_POINTS: [i32; 5] = [6, 4, 2, 1, 0];

/// `depth_when_done` is the number of prompts shown before the action, or
/// [`CASCADE_NEVER_DONE`].
pub fn score_prompt_cascade(depth_when_done: u8) -> Result<i32, ScoringError> {
    CASCADE_POINTS
        .get(depth_when_done as usize)
        .copied()
        .ok_or(ScoringError::CascadeDepthOutOfRange(depth_when_done))
}

/// Result of a positive NPC conversation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpcPmOutcome {
    /// Prompt (1..=3) at which the participant said "yes"; 0 if never.
    pub yes_at_prompt: u8,
    pub item_choice: Option<ItemCategory>,
}

impl NpcPmOutcome {
    pub fn new(yes_at_prompt: u8, item_choice: Option<ItemCategory>) -> Result<Self, ScoringError> {
        if yes_at_prompt > 3 {
            return Err(ScoringError::PromptOutOfRange(yes_at_prompt));
        }
        if (yes_at_prompt == 0) != item_choice.is_none() {
            return Err(ScoringError::MalformedOutcome);
        }
        Ok(NpcPmOutcome { yes_at_prompt, item_choice })
    }

    pub fn never_affirmed() -> Self {
        NpcPmOutcome { yes_at_prompt: 0, item_choice: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemPoints {
    pub correct: i32,
    pub semantic_relative: i32,
    pub other_pm_task: i32,
    pub unrelated: i32,
}

impl ItemPoints {
    pub fn get(&self, category: ItemCategory) -> i32 {
        match category {
            ItemCategory::Correct => self.correct,
            ItemCategory::SemanticRelative => self.semantic_relative,
            ItemCategory::OtherPmTask => self.other_pm_task,
            ItemCategory::Unrelated => self.unrelated,
        }
    }

    fn from_base(base: i32) -> Self {
        ItemPoints {
            correct: base,
            semantic_relative: (base + 1) / 2,
            other_pm_task: 1,
            unrelated: 0,
        }
    }
}

/// Points for an affirmative answer at prompt 1, 2, 3 by chosen item category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveMatrix {
    pub by_prompt: [ItemPoints; 3],
}

impl Default for PositiveMatrix {
    fn default() -> Self {
        PositiveMatrix { by_prompt: [6, 4, 2].map(ItemPoints::from_base) }
    }
}

pub fn score_npc_pm_positive(outcome: &NpcPmOutcome, matrix: &PositiveMatrix) -> i32 {
    match (outcome.yes_at_prompt, outcome.item_choice) {
        (prompt @ 1..=3, Some(category)) => matrix.by_prompt[prompt as usize - 1].get(category),
        _ => 0,
    }
}

/// Deduction for affirming a false prompt at prompt 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NegativeDeductions(pub [i32; 3]);

impl Default for NegativeDeductions {
    fn default() -> Self {
        NegativeDeductions([-3, -2, -1])
    }
}

impl NegativeDeductions {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if self.0.iter().all(|d| (-3..=0).contains(d)) {
            Ok(())
        } else {
            Err(ScoringError::InvalidTiming(format!(
                "false-prompt deductions must lie in -3..=0, got {:?}",
                self.0
            )))
        }
    }
}

/// 0 means all three prompts were resisted.
pub fn score_npc_pm_negative(yes_at_prompt: u8, deductions: &NegativeDeductions) -> Result<i32, ScoringError> {
    match yes_at_prompt {
        0 => Ok(0),
        1..=3 => Ok(deductions.0[yes_at_prompt as usize - 1]),
        other => Err(ScoringError::PromptOutOfRange(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade_table() {
        let points: Vec<i32> = (0..=4).map(|d| score_prompt_cascade(d).unwrap()).collect();
        assert_eq!(points, vec![6, 4, 2, 1, 0]);
        assert_eq!(score_prompt_cascade(5), Err(ScoringError::CascadeDepthOutOfRange(5)));
    }

    #[test]
    fn default_positive_matrix() {
        let m = PositiveMatrix::default();
        let rows: Vec<[i32; 4]> = m
            .by_prompt
            .iter()
            .map(|r| [r.correct, r.semantic_relative, r.other_pm_task, r.unrelated])
            .collect();
        assert_eq!(rows, vec![[6, 3, 1, 0], [4, 2, 1, 0], [2, 1, 1, 0]]);
    }

    #[test]
    fn positive_examples() {
        let m = PositiveMatrix::default();
        assert_eq!(score_npc_pm_positive(&NpcPmOutcome::never_affirmed(), &m), 0);
        let first = NpcPmOutcome::new(1, Some(ItemCategory::Correct)).unwrap();
        assert_eq!(score_npc_pm_positive(&first, &m), 6);
        let unrelated = NpcPmOutcome::new(2, Some(ItemCategory::Unrelated)).unwrap();
        assert_eq!(score_npc_pm_positive(&unrelated, &m), 0);
    }

    #[test]
    fn outcome_invariant() {
        assert_eq!(NpcPmOutcome::new(0, Some(ItemCategory::Correct)), Err(ScoringError::MalformedOutcome));
        assert_eq!(NpcPmOutcome::new(2, None), Err(ScoringError::MalformedOutcome));
        assert_eq!(NpcPmOutcome::new(4, Some(ItemCategory::Correct)), Err(ScoringError::PromptOutOfRange(4)));
    }

    #[test]
    fn negative_examples() {
        let d = NegativeDeductions::default();
        assert_eq!(score_npc_pm_negative(0, &d), Ok(0));
        assert_eq!(score_npc_pm_negative(1, &d), Ok(-3));
        assert_eq!(score_npc_pm_negative(3, &d), Ok(-1));
        assert!(score_npc_pm_negative(4, &d).is_err());
        assert!(NegativeDeductions([-4, 0, 0]).validate().is_err());
    }
}
