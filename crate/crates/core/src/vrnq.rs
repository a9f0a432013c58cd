//! VR Neuroscience Questionnaire: scoring, robust cohort statistics and the
//! minimum / parsimonious cut-off gates.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

pub const ITEM_COUNT: usize = 20;
pub const ITEMS_PER_DOMAIN: usize = 5;
pub const LIKERT_MIN: u8 = 1;
pub const LIKERT_MAX: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    UserExperience,
    GameMechanics,
    InGameAssistance,
    Vrise,
}

impl Domain {
    pub const ALL: [Domain; 4] = [Domain::UserExperience, Domain::GameMechanics, Domain::InGameAssistance, Domain::Vrise];

    pub fn key(self) -> ScoreKey {
        match self {
            Domain::UserExperience => ScoreKey::UserExperience,
            Domain::GameMechanics => ScoreKey::GameMechanics,
            Domain::InGameAssistance => ScoreKey::InGameAssistance,
            Domain::Vrise => ScoreKey::Vrise,
        }
    }
}

/// The four sub-scores plus the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKey {
    UserExperience,
    GameMechanics,
    InGameAssistance,
    Vrise,
    Total,
}

impl ScoreKey {
    pub const ALL: [ScoreKey; 5] = [
        ScoreKey::UserExperience,
        ScoreKey::GameMechanics,
        ScoreKey::InGameAssistance,
        ScoreKey::Vrise,
        ScoreKey::Total,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKey::UserExperience => "user_experience",
            ScoreKey::GameMechanics => "game_mechanics",
            ScoreKey::InGameAssistance => "in_game_assistance",
            ScoreKey::Vrise => "vrise",
            ScoreKey::Total => "total",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VrnqError {
    #[error("expected {ITEM_COUNT} items, got {0}")]
    WrongItemCount(usize),
    #[error("participant `{participant}`: item q{item} = {value} is outside 1..=7")]
    ItemOutOfRange { participant: String, item: usize, value: i64 },
    #[error("cohort is empty")]
    EmptyCohort,
    #[error("invalid domain map: {0}")]
    InvalidDomainMap(String),
    #[error("CSV line {line}: {message}")]
    Csv { line: u64, message: String },
}

/// Which questionnaire items (1-based) belong to each domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainMap {
    pub user_experience: Vec<u8>,
    pub game_mechanics: Vec<u8>,
    pub in_game_assistance: Vec<u8>,
    pub vrise: Vec<u8>,
}

impl DomainMap {
    /// Must be a partition of 1..=20 into four groups of five.
    pub fn new(
        user_experience: Vec<u8>,
        game_mechanics: Vec<u8>,
        in_game_assistance: Vec<u8>,
        vrise: Vec<u8>,
    ) -> Result<Self, VrnqError> {
        let map = DomainMap { user_experience, game_mechanics, in_game_assistance, vrise };
        map.validate()?;
        Ok(map)
    }

    pub fn from_json(text: &str) -> Result<Self, VrnqError> {
        let map: DomainMap = serde_json::from_str(text).map_err(|e| VrnqError::InvalidDomainMap(e.to_string()))?;
        map.validate()?;
        Ok(map)
    }

    pub fn items(&self, domain: Domain) -> &[u8] {
        match domain {
            Domain::UserExperience => &self.user_experience,
            Domain::GameMechanics => &self.game_mechanics,
            Domain::InGameAssistance => &self.in_game_assistance,
            Domain::Vrise => &self.vrise,
        }
    }

    pub fn validate(&self) -> Result<(), VrnqError> {
        let mut seen = BTreeSet::new();
        for domain in Domain::ALL {
            let items = self.items(domain);
            if items.len() != ITEMS_PER_DOMAIN {
                return Err(VrnqError::InvalidDomainMap(format!(
                    "{} has {} items, expected {ITEMS_PER_DOMAIN}",
                    domain.key().as_str(),
                    items.len()
                )));
            }
            for &item in items {
                if !(1..=ITEM_COUNT as u8).contains(&item) {
                    return Err(VrnqError::InvalidDomainMap(format!("item {item} is not in 1..=20")));
                }
                if !seen.insert(item) {
                    return Err(VrnqError::InvalidDomainMap(format!("item {item} is assigned twice")));
                }
            }
        }
        Ok(())
    }
}

/// One respondent's answers, q1..q20 in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrnqResponseSet {
    pub participant_id: String,
    items: Vec<u8>,
    /// Free-text feedback, kept verbatim and not analyzed.
    pub feedback: Option<String>,
}

impl VrnqResponseSet {
    pub fn new(participant_id: impl Into<String>, items: &[i64], feedback: Option<String>) -> Result<Self, VrnqError> {
        let participant_id = participant_id.into();
        if items.len() != ITEM_COUNT {
            return Err(VrnqError::WrongItemCount(items.len()));
        }
        let mut checked = Vec::with_capacity(ITEM_COUNT);
        for (i, &value) in items.iter().enumerate() {
            if !(i64::from(LIKERT_MIN)..=i64::from(LIKERT_MAX)).contains(&value) {
                return Err(VrnqError::ItemOutOfRange { participant: participant_id, item: i + 1, value });
            }
            checked.push(value as u8);
        }
        Ok(VrnqResponseSet { participant_id, items: checked, feedback })
    }

    pub fn items(&self) -> &[u8] {
        &self.items
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrnqScores {
    pub domains: BTreeMap<Domain, u32>,
    pub total: u32,
}

impl VrnqScores {
    pub fn get(&self, key: ScoreKey) -> u32 {
        match key {
            ScoreKey::Total => self.total,
            _ => Domain::ALL.iter().find(|d| d.key() == key).map_or(0, |d| self.domains[d]),
        }
    }
}

pub fn score_vrnq(responses: &VrnqResponseSet, map: &DomainMap) -> VrnqScores {
    let domains: BTreeMap<Domain, u32> = Domain::ALL
        .iter()
        .map(|&d| (d, map.items(d).iter().map(|&q| u32::from(responses.items[q as usize - 1])).sum()))
        .collect();
    let total = domains.values().sum();
    VrnqScores { domains, total }
}

/// Sample median; the midpoint of the two central values for even n.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 })
}

/// Median absolute deviation from the median (unscaled).
pub fn mad(values: &[f64]) -> Option<f64> {
    let m = median(values)?;
    let deviations: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    median(&deviations)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustStat {
    pub median: f64,
    pub mad: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortAggregate {
    pub stats: BTreeMap<ScoreKey, RobustStat>,
}

impl CohortAggregate {
    /// An aggregate known only by its medians, e.g. a published table row.
    /// Order: the four domains, then the total.
    pub fn from_medians(medians: [f64; 5]) -> Self {
        let stats = ScoreKey::ALL
            .iter()
            .zip(medians)
            .map(|(&k, median)| (k, RobustStat { median, mad: 0.0, n: 0 }))
            .collect();
        CohortAggregate { stats }
    }

    pub fn median(&self, key: ScoreKey) -> f64 {
        self.stats[&key].median
    }
}

pub fn aggregate_cohort(sets: &[VrnqResponseSet], map: &DomainMap) -> Result<CohortAggregate, VrnqError> {
    if sets.is_empty() {
        return Err(VrnqError::EmptyCohort);
    }
    let scores: Vec<VrnqScores> = sets.iter().map(|s| score_vrnq(s, map)).collect();
    let stats = ScoreKey::ALL
        .iter()
        .map(|&key| {
            let values: Vec<f64> = scores.iter().map(|s| f64::from(s.get(key))).collect();
            let stat = RobustStat {
                median: median(&values).expect("non-empty"),
                mad: mad(&values).expect("non-empty"),
                n: values.len(),
            };
            (key, stat)
        })
        .collect();
    Ok(CohortAggregate { stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Minimum,
    Parsimonious,
}

impl Tier {
    /// (per-domain, total) thresholds; both inclusive.
    pub fn thresholds(self) -> (f64, f64) {
        match self {
            Tier::Minimum => (25.0, 100.0),
            Tier::Parsimonious => (30.0, 120.0),
        }
    }

    pub fn threshold(self, key: ScoreKey) -> f64 {
        let (domain, total) = self.thresholds();
        if key == ScoreKey::Total {
            total
        } else {
            domain
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffVerdict {
    pub tier: Tier,
    pub passes: BTreeMap<ScoreKey, bool>,
    pub overall: bool,
}

pub fn check_cutoffs(agg: &CohortAggregate, tier: Tier) -> CutoffVerdict {
    let passes: BTreeMap<ScoreKey, bool> =
        ScoreKey::ALL.iter().map(|&k| (k, agg.median(k) >= tier.threshold(k))).collect();
    let overall = passes.values().all(|p| *p);
    CutoffVerdict { tier, passes, overall }
}

/// Reads `participant_id,q1,...,q20[,feedback]` rows.
pub fn read_responses_csv<R: Read>(reader: R) -> Result<Vec<VrnqResponseSet>, VrnqError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        VrnqError::Csv { line, message: e.to_string() }
    };
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let expected: Vec<String> =
        std::iter::once("participant_id".to_owned()).chain((1..=ITEM_COUNT).map(|i| format!("q{i}"))).collect();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    let has_feedback = names.len() == ITEM_COUNT + 2 && names[ITEM_COUNT + 1] == "feedback";
    if names[..names.len().min(ITEM_COUNT + 1)] != expected[..] || !(names.len() == ITEM_COUNT + 1 || has_feedback) {
        return Err(VrnqError::Csv {
            line: 1,
            message: format!("header must be `{}` with an optional `feedback` column", expected.join(",")),
        });
    }
    let mut sets = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let id = record[0].trim().to_owned();
        let mut items = Vec::with_capacity(ITEM_COUNT);
        for (i, field) in record.iter().skip(1).take(ITEM_COUNT).enumerate() {
            let value: i64 = field.trim().parse().map_err(|_| VrnqError::Csv {
                line,
                message: format!("q{} = `{field}` is not an integer", i + 1),
            })?;
            items.push(value);
        }
        let feedback = if has_feedback { Some(record[ITEM_COUNT + 1].to_owned()).filter(|f| !f.is_empty()) } else { None };
        let set = VrnqResponseSet::new(id, &items, feedback).map_err(|e| VrnqError::Csv { line, message: e.to_string() })?;
        sets.push(set);
    }
    Ok(sets)
}
