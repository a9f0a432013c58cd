use serde::{Deserialize, Serialize};

use crate::scenario::PmDelay;

/// Probability of acting on a PM intention before any prompt, by delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayProbs {
    pub short: f64,
    pub medium: f64,
    pub long: f64,
}

impl DelayProbs {
    pub fn uniform(p: f64) -> Self {
        DelayProbs { short: p, medium: p, long: p }
    }

    pub fn get(&self, delay: PmDelay) -> f64 {
        match delay {
            PmDelay::Short => self.short,
            PmDelay::Medium => self.medium,
            PmDelay::Long => self.long,
        }
    }
}

/// Behavioral parameters of a simulated participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipantProfile {
    pub pm_hit_prob: DelayProbs,
    /// Chance of acting right after prompt 1, 2 and 3 respectively.
    pub prompt_yield_probs: [f64; 3],
    /// Chance of picking the right item once a conversation is affirmed.
    pub pm_item_correct_prob: f64,
    /// Chance of agreeing to each false prompt.
    pub false_prompt_yes_prob: f64,
    pub recognition_target_prob: f64,
    /// Applies to every non-target on the board, false items included.
    pub recognition_distractor_prob: f64,
    /// Route length is 15 plus a uniform draw from `-k..=k`, clamped to the map.
    pub planning_extra_units: u8,
    pub cooking_timing_sd_s: f64,
    pub attention_hit_prob: f64,
    pub attention_false_alarm_prob: f64,
    pub wrong_controller_prob: f64,
    pub notes_use_prob: f64,
    pub latency_mean_ms: f64,
    pub latency_sd_ms: f64,
    /// Target simulated session length.
    pub session_length_s: f64,
}

pub const DEFAULT_SESSION_LENGTH_S: f64 = 3732.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("{0} must be a probability in [0, 1], got {1}")]
    NotAProbability(&'static str, f64),
    #[error("{0} must be finite and non-negative, got {1}")]
    Negative(&'static str, f64),
    #[error("session length must be positive, got {0}")]
    SessionLength(f64),
}

impl ParticipantProfile {
    /// Every intention met before any prompt, no errors, no timing noise.
    pub fn perfect() -> Self {
        ParticipantProfile {
            pm_hit_prob: DelayProbs::uniform(1.0),
            prompt_yield_probs: [1.0; 3],
            pm_item_correct_prob: 1.0,
            false_prompt_yes_prob: 0.0,
            recognition_target_prob: 1.0,
            recognition_distractor_prob: 0.0,
            planning_extra_units: 0,
            cooking_timing_sd_s: 0.0,
            attention_hit_prob: 1.0,
            attention_false_alarm_prob: 0.0,
            wrong_controller_prob: 0.0,
            notes_use_prob: 0.0,
            latency_mean_ms: 1500.0,
            latency_sd_ms: 0.0,
            session_length_s: DEFAULT_SESSION_LENGTH_S,
        }
    }

    /// Never acts on anything optional.
    pub fn null() -> Self {
        ParticipantProfile {
            pm_hit_prob: DelayProbs::uniform(0.0),
            prompt_yield_probs: [0.0; 3],
            pm_item_correct_prob: 0.0,
            false_prompt_yes_prob: 0.0,
            recognition_target_prob: 0.0,
            recognition_distractor_prob: 0.0,
            planning_extra_units: 0,
            cooking_timing_sd_s: 0.0,
            attention_hit_prob: 0.0,
            attention_false_alarm_prob: 0.0,
            wrong_controller_prob: 0.0,
            notes_use_prob: 0.0,
            latency_mean_ms: 1500.0,
            latency_sd_ms: 0.0,
            session_length_s: DEFAULT_SESSION_LENGTH_S,
        }
    }

    /// A plausible healthy adult.
    pub fn typical() -> Self {
        ParticipantProfile {
            pm_hit_prob: DelayProbs { short: 0.8, medium: 0.7, long: 0.6 },
            prompt_yield_probs: [0.6, 0.7, 0.9],
            pm_item_correct_prob: 0.85,
            false_prompt_yes_prob: 0.15,
            recognition_target_prob: 0.8,
            recognition_distractor_prob: 0.1,
            planning_extra_units: 3,
            cooking_timing_sd_s: 2.5,
            attention_hit_prob: 0.85,
            attention_false_alarm_prob: 0.1,
            wrong_controller_prob: 0.1,
            notes_use_prob: 0.3,
            latency_mean_ms: 1500.0,
            latency_sd_ms: 500.0,
            session_length_s: DEFAULT_SESSION_LENGTH_S,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "perfect" => Some(Self::perfect()),
            "null" => Some(Self::null()),
            "typical" => Some(Self::typical()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let probs = [
            ("pm_hit_prob.short", self.pm_hit_prob.short),
            ("pm_hit_prob.medium", self.pm_hit_prob.medium),
            ("pm_hit_prob.long", self.pm_hit_prob.long),
            ("prompt_yield_probs[0]", self.prompt_yield_probs[0]),
            ("prompt_yield_probs[1]", self.prompt_yield_probs[1]),
            ("prompt_yield_probs[2]", self.prompt_yield_probs[2]),
            ("pm_item_correct_prob", self.pm_item_correct_prob),
            ("false_prompt_yes_prob", self.false_prompt_yes_prob),
            ("recognition_target_prob", self.recognition_target_prob),
            ("recognition_distractor_prob", self.recognition_distractor_prob),
            ("attention_hit_prob", self.attention_hit_prob),
            ("attention_false_alarm_prob", self.attention_false_alarm_prob),
            ("wrong_controller_prob", self.wrong_controller_prob),
            ("notes_use_prob", self.notes_use_prob),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProfileError::NotAProbability(name, p));
            }
        }
        for (name, v) in [
            ("cooking_timing_sd_s", self.cooking_timing_sd_s),
            ("latency_mean_ms", self.latency_mean_ms),
            ("latency_sd_ms", self.latency_sd_ms),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ProfileError::Negative(name, v));
            }
        }
        if !(self.session_length_s.is_finite() && self.session_length_s > 0.0) {
            return Err(ProfileError::SessionLength(self.session_length_s));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
