use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScoringError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CookingItem {
    Omelette,
    Sausages,
    Kettle,
}

impl CookingItem {
    pub const ALL: [CookingItem; 3] = [CookingItem::Omelette, CookingItem::Sausages, CookingItem::Kettle];

    pub fn as_str(self) -> &'static str {
        match self {
            CookingItem::Omelette => "omelette",
            CookingItem::Sausages => "sausages",
            CookingItem::Kettle => "kettle",
        }
    }

    /// Centre of the on-time window, in seconds.
    pub fn on_time_midpoint_s(self) -> f64 {
        let lower = band_lower_bounds_cs(self);
        let on_time = CookingBand::OnTime as usize;
        let hi = lower[on_time + 1] - 1;
        (lower[on_time] + hi) as f64 / 200.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CookingBand {
    VeryEarly,
    Early,
    SlightlyEarly,
    OnTime,
    SlightlyLate,
    Late,
    VeryLate,
}

impl CookingBand {
    pub const ALL: [CookingBand; 7] = [
        CookingBand::VeryEarly,
        CookingBand::Early,
        CookingBand::SlightlyEarly,
        CookingBand::OnTime,
        CookingBand::SlightlyLate,
        CookingBand::Late,
        CookingBand::VeryLate,
    ];
}

/// Lower bound of each band in centiseconds, `VeryEarly` first. Each band
/// ends one centisecond before the next begins; `VeryLate` is open-ended.
pub fn band_lower_bounds_cs(item: CookingItem) -> [u64; 7] {
    match item {
        CookingItem::Omelette => [0, 1400, 1600, 1800, 2201, 2400, 2601],
        CookingItem::Sausages => [0, 1800, 2000, 2200, 2601, 2800, 3001],
        CookingItem::Kettle => [0, 1100, 1300, 1500, 1701, 1900, 2101],
    }
}

pub fn classify_cooking_cs(item: CookingItem, centis: u64) -> CookingBand {
    let lower = band_lower_bounds_cs(item);
    let idx = lower.iter().rposition(|&lo| lo <= centis).unwrap_or(0);
    CookingBand::ALL[idx]
}

/// Rounds `t_s` half-up to centiseconds, then looks up the band. Negative or
/// NaN times classify as time zero.
pub fn classify_cooking_time(item: CookingItem, t_s: f64) -> CookingBand {
    let centis = if t_s.is_nan() || t_s <= 0.0 {
        0
    } else {
        (t_s * 100.0 + 0.5).floor() as u64
    };
    classify_cooking_cs(item, centis)
}

pub(crate) fn ms_to_centis(ms: u64) -> u64 {
    (ms + 5) / 10
}

/// Points per band. Must cover all seven bands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BandPoints(pub BTreeMap<CookingBand, i32>);

impl Default for BandPoints {
    fn default() -> Self {
        use CookingBand::*;
        BandPoints(BTreeMap::from([
            (VeryEarly, 0),
            (Early, 1),
            (SlightlyEarly, 2),
            (OnTime, 3),
            (SlightlyLate, 2),
            (Late, 1),
            (VeryLate, 0),
        ]))
    }
}

impl BandPoints {
    pub fn validate(&self) -> Result<(), ScoringError> {
        match CookingBand::ALL.iter().find(|b| !self.0.contains_key(b)) {
            Some(missing) => Err(ScoringError::InvalidTiming(format!("no points defined for band {missing:?}"))),
            None => Ok(()),
        }
    }

    pub fn get(&self, band: CookingBand) -> i32 {
        self.0.get(&band).copied().unwrap_or(0)
    }
}

/// Seconds at which each item was placed on the worktop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CookingTimeline {
    pub omelette_removed_s: f64,
    pub sausages_removed_s: f64,
    pub kettle_removed_s: f64,
}

impl CookingTimeline {
    pub fn new(omelette_s: f64, sausages_s: f64, kettle_s: f64) -> Result<Self, ScoringError> {
        for t in [omelette_s, sausages_s, kettle_s] {
            if !(t.is_finite() && t >= 0.0) {
                return Err(ScoringError::InvalidTiming(format!("cooking time {t} must be finite and >= 0")));
            }
        }
        Ok(CookingTimeline { omelette_removed_s: omelette_s, sausages_removed_s: sausages_s, kettle_removed_s: kettle_s })
    }

    pub fn time_of(&self, item: CookingItem) -> f64 {
        match item {
            CookingItem::Omelette => self.omelette_removed_s,
            CookingItem::Sausages => self.sausages_removed_s,
            CookingItem::Kettle => self.kettle_removed_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CookingScore {
    pub bands: BTreeMap<CookingItem, CookingBand>,
    pub points: BTreeMap<CookingItem, i32>,
    pub total: i32,
}

pub fn score_cooking(timeline: &CookingTimeline, band_points: &BandPoints) -> CookingScore {
    let mut bands = BTreeMap::new();
    let mut points = BTreeMap::new();
    for item in CookingItem::ALL {
        let band = classify_cooking_time(item, timeline.time_of(item));
        bands.insert(item, band);
        points.insert(item, band_points.get(band));
    }
    let total = points.values().sum();
    CookingScore { bands, points, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CookingBand::*;
    use CookingItem::*;

    #[test]
    fn printed_examples() {
        assert_eq!(classify_cooking_time(Omelette, 19.0), OnTime);
        assert_eq!(classify_cooking_time(Kettle, 10.0), VeryEarly);
        assert_eq!(classify_cooking_time(Sausages, 31.0), VeryLate);
        assert_eq!(classify_cooking_time(Omelette, 23.5), SlightlyLate);
    }

    #[test]
    fn gap_between_printed_endpoints_closes_by_rounding() {
        assert_eq!(classify_cooking_time(Omelette, 22.004), OnTime);
        assert_eq!(classify_cooking_time(Omelette, 22.006), SlightlyLate);
        assert_eq!(classify_cooking_time(Omelette, 13.996), Early);
        assert_eq!(classify_cooking_time(Kettle, -1.0), VeryEarly);
    }

    #[test]
    fn millisecond_rounding_is_half_up() {
        assert_eq!(ms_to_centis(22_004), 2200);
        assert_eq!(ms_to_centis(22_005), 2201);
        assert_eq!(ms_to_centis(0), 0);
    }

    #[test]
    fn on_time_midpoints() {
        assert_eq!(Omelette.on_time_midpoint_s(), 20.0);
        assert_eq!(Sausages.on_time_midpoint_s(), 24.0);
        assert_eq!(Kettle.on_time_midpoint_s(), 16.0);
    }

    #[test]
    fn default_mapping_sums() {
        let points = BandPoints::default();
        let all_on_time = CookingTimeline::new(20.0, 24.0, 16.0).unwrap();
        assert_eq!(score_cooking(&all_on_time, &points).total, 9);
        let all_late = CookingTimeline::new(40.0, 40.0, 40.0).unwrap();
        assert_eq!(score_cooking(&all_late, &points).total, 0);
        // omelette on time, sausages slightly late, kettle early
        let mixed = CookingTimeline::new(19.0, 27.0, 12.0).unwrap();
        let score = score_cooking(&mixed, &points);
        assert_eq!(score.bands[&Sausages], SlightlyLate);
        assert_eq!(score.bands[&Kettle], Early);
        assert_eq!(score.total, 6);
    }

    #[test]
    fn incomplete_band_map_is_rejected() {
        let mut points = BandPoints::default();
        points.0.remove(&Late);
        assert!(points.validate().is_err());
        assert!(CookingTimeline::new(f64::NAN, 1.0, 1.0).is_err());
    }
}
