//! Scoring configuration document and its content hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::{layout, AuditoryKind, Stimulus, VisualKind};
use crate::scoring::{
    BandPoints, NegativeDeductions, NormativeTiming, PositiveMatrix, ScoringError, TimeModifierSteps,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualStimulusCounts {
    pub targets: u16,
    pub shape_distractors: u16,
    pub color_distractors: u16,
}

impl Default for VisualStimulusCounts {
    fn default() -> Self {
        VisualStimulusCounts { targets: 16, shape_distractors: 8, color_distractors: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditoryStimulusCounts {
    pub targets: u16,
    pub high_pitch: u16,
    pub low_pitch: u16,
}

impl Default for AuditoryStimulusCounts {
    fn default() -> Self {
        AuditoryStimulusCounts { targets: 16, high_pitch: 8, low_pitch: 8 }
    }
}

/// Everything the scorers need beyond the log itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoringConfig {
    #[serde(default)]
    pub cooking_band_points: BandPoints,
    #[serde(default)]
    pub positive_matrix: PositiveMatrix,
    #[serde(default)]
    pub negative_deductions: NegativeDeductions,
    #[serde(default)]
    pub planning_norms: NormativeTiming,
    #[serde(default)]
    pub time_modifier: TimeModifierSteps,
    #[serde(default)]
    pub visual_stimuli: VisualStimulusCounts,
    #[serde(default)]
    pub auditory_stimuli: AuditoryStimulusCounts,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ScoringError),
    #[error("stimulus counts must be even so both sides get the same number: {0}")]
    OddStimulusCount(&'static str),
}

impl ScoringConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ScoringConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.cooking_band_points.validate()?;
        self.negative_deductions.validate()?;
        self.planning_norms.validate()?;
        self.time_modifier.validate()?;
        let v = &self.visual_stimuli;
        let a = &self.auditory_stimuli;
        for (count, name) in [
            (v.targets, "visual targets"),
            (v.shape_distractors, "visual shape distractors"),
            (v.color_distractors, "visual color distractors"),
            (a.targets, "auditory targets"),
            (a.high_pitch, "auditory high-pitch distractors"),
            (a.low_pitch, "auditory low-pitch distractors"),
        ] {
            if count % 2 != 0 {
                return Err(ConfigError::OddStimulusCount(name));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        content_hash(self)
    }

    pub fn visual_layout(&self) -> Vec<Stimulus<VisualKind>> {
        let v = &self.visual_stimuli;
        layout(&[
            (VisualKind::Target, v.targets),
            (VisualKind::ShapeDistractor, v.shape_distractors),
            (VisualKind::ColorDistractor, v.color_distractors),
        ])
    }

    pub fn auditory_layout(&self) -> Vec<Stimulus<AuditoryKind>> {
        let a = &self.auditory_stimuli;
        layout(&[
            (AuditoryKind::Target, a.targets),
            (AuditoryKind::HighPitch, a.high_pitch),
            (AuditoryKind::LowPitch, a.low_pitch),
        ])
    }
}

/// Hex SHA-256 over the compact JSON serialization of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("value serializes");
    hex::encode(Sha256::digest(&bytes))
}
