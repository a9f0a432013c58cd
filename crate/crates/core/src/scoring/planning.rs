use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ScoringError;

/// Street units on the planning map.
pub const ROAD_UNITS: u8 = 23;
/// Length of the shortest route through all three destinations.
pub const IDEAL_ROUTE_UNITS: i32 = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSelection {
    units: BTreeSet<u8>,
    completion_time_s: f64,
}

impl RouteSelection {
    pub fn new(units: &[u8], completion_time_s: f64) -> Result<Self, ScoringError> {
        if !(completion_time_s.is_finite() && completion_time_s > 0.0) {
            return Err(ScoringError::InvalidRoute(format!(
                "completion time must be positive, got {completion_time_s}"
            )));
        }
        let mut set = BTreeSet::new();
        for &unit in units {
            if !(1..=ROAD_UNITS).contains(&unit) {
                return Err(ScoringError::InvalidRoute(format!("unit {unit} is not on the map")));
            }
            if !set.insert(unit) {
                return Err(ScoringError::InvalidRoute(format!("unit {unit} selected twice")));
            }
        }
        Ok(RouteSelection { units: set, completion_time_s })
    }

    pub fn units(&self) -> &BTreeSet<u8> {
        &self.units
    }

    pub fn completion_time_s(&self) -> f64 {
        self.completion_time_s
    }
}

/// Completion time of the normative sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormativeTiming {
    pub mean_s: f64,
    pub sd_s: f64,
}

impl NormativeTiming {
    pub fn new(mean_s: f64, sd_s: f64) -> Result<Self, ScoringError> {
        let timing = NormativeTiming { mean_s, sd_s };
        timing.validate()?;
        Ok(timing)
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(self.mean_s.is_finite() && self.mean_s > 0.0) {
            return Err(ScoringError::InvalidTiming(format!("mean_s must be positive, got {}", self.mean_s)));
        }
        if !(self.sd_s.is_finite() && self.sd_s > 0.0) {
            return Err(ScoringError::InvalidTiming(format!("sd_s must be positive, got {}", self.sd_s)));
        }
        Ok(())
    }

    pub fn z(&self, time_s: f64) -> f64 {
        (time_s - self.mean_s) / self.sd_s
    }
}

impl Default for NormativeTiming {
    fn default() -> Self {
        NormativeTiming { mean_s: 120.0, sd_s: 30.0 }
    }
}

/// z-score thresholds of the completion-time modifier. Fast completions earn
/// points, slow ones lose them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeModifierSteps {
    /// |z| at which the modifier becomes ±1.
    pub inner_z: f64,
    /// |z| at which the modifier becomes ±2.
    pub outer_z: f64,
}

impl Default for TimeModifierSteps {
    fn default() -> Self {
        TimeModifierSteps { inner_z: 1.0, outer_z: 2.0 }
    }
}

impl TimeModifierSteps {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(self.inner_z > 0.0 && self.outer_z > self.inner_z && self.outer_z.is_finite()) {
            return Err(ScoringError::InvalidTiming(format!(
                "time modifier steps need 0 < inner_z < outer_z, got {} and {}",
                self.inner_z, self.outer_z
            )));
        }
        Ok(())
    }
}

pub fn time_modifier(z: f64, steps: &TimeModifierSteps) -> i32 {
    if z <= -steps.outer_z {
        2
    } else if z <= -steps.inner_z {
        1
    } else if z < steps.inner_z {
        0
    } else if z < steps.outer_z {
        -1
    } else {
        -2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanningScore {
    pub route_score: i32,
    pub time_modifier: i32,
    pub total: i32,
}

pub fn score_planning(
    route: &RouteSelection,
    norms: &NormativeTiming,
    steps: &TimeModifierSteps,
) -> PlanningScore {
    let drawn = route.units.len() as i32;
    let route_score = (IDEAL_ROUTE_UNITS - (drawn - IDEAL_ROUTE_UNITS).abs()).max(0);
    let time_modifier = time_modifier(norms.z(route.completion_time_s), steps);
    PlanningScore { route_score, time_modifier, total: route_score + time_modifier }
}
