//! Fixed item and stimulus content used by the scenes.
//!
//! The recognition array, the living-room collection, the NPC item boards and
//! the attention stimulus layouts all live here so that the engine, the
//! scorers and the simulator agree on a single source of item ids.

use serde::{Deserialize, Serialize};

use crate::scenario::PmTask;

/// Class of an item on the shopping (recognition) array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RecognitionClass {
    Target,
    QualitativeDistractor,
    QuantitativeDistractor,
    FalseItem,
}

impl RecognitionClass {
    pub fn points(self) -> u32 {
        match self {
            RecognitionClass::Target => 2,
            RecognitionClass::QualitativeDistractor | RecognitionClass::QuantitativeDistractor => 1,
            RecognitionClass::FalseItem => 0,
        }
    }
}

/// The recognition item universe: 10 targets, 5 + 5 distractors, 10 false items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecognitionCatalog {
    pub targets: Vec<String>,
    pub qualitative_distractors: Vec<String>,
    pub quantitative_distractors: Vec<String>,
    pub false_items: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("recognition catalog needs 10/5/5/10 items, got {0}/{1}/{2}/{3}")]
    WrongCardinality(usize, usize, usize, usize),
    #[error("item `{0}` appears more than once in the recognition catalog")]
    DuplicateItem(String),
}

const TARGETS: [&str; 10] = [
    "semi_skimmed_milk",
    "cheddar_cheese",
    "orange_juice",
    "white_rice",
    "tomatoes",
    "potatoes_1kg",
    "eggs_6",
    "cornflakes_500g",
    "chicken_breast_500g",
    "butter_250g",
];
const QUALITATIVE: [&str; 5] = [
    "skimmed_milk",
    "mozzarella_cheese",
    "apple_juice",
    "brown_rice",
    "cherry_tomatoes",
];
const QUANTITATIVE: [&str; 5] = [
    "potatoes_2kg",
    "eggs_12",
    "cornflakes_1kg",
    "chicken_breast_1kg",
    "butter_500g",
];
const FALSE_ITEMS: [&str; 10] = [
    "bread",
    "bananas",
    "coffee",
    "pasta",
    "yoghurt",
    "onions",
    "carrots",
    "ham",
    "biscuits",
    "tea_bags",
];

fn owned(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| (*s).to_owned()).collect()
}

impl Default for RecognitionCatalog {
    fn default() -> Self {
        RecognitionCatalog {
            targets: owned(&TARGETS),
            qualitative_distractors: owned(&QUALITATIVE),
            quantitative_distractors: owned(&QUANTITATIVE),
            false_items: owned(&FALSE_ITEMS),
        }
    }
}

impl RecognitionCatalog {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let counts = (
            self.targets.len(),
            self.qualitative_distractors.len(),
            self.quantitative_distractors.len(),
            self.false_items.len(),
        );
        if counts != (10, 5, 5, 10) {
            return Err(CatalogError::WrongCardinality(counts.0, counts.1, counts.2, counts.3));
        }
        let mut seen = std::collections::BTreeSet::new();
        for item in self.universe() {
            if !seen.insert(item) {
                return Err(CatalogError::DuplicateItem(item.to_owned()));
            }
        }
        Ok(())
    }

    pub fn classify(&self, item: &str) -> Option<RecognitionClass> {
        let has = |v: &[String]| v.iter().any(|s| s == item);
        if has(&self.targets) {
            Some(RecognitionClass::Target)
        } else if has(&self.qualitative_distractors) {
            Some(RecognitionClass::QualitativeDistractor)
        } else if has(&self.quantitative_distractors) {
            Some(RecognitionClass::QuantitativeDistractor)
        } else if has(&self.false_items) {
            Some(RecognitionClass::FalseItem)
        } else {
            None
        }
    }

    /// Most items a shopping list or basket can hold: one per target.
    pub fn list_capacity(&self) -> usize {
        self.targets.len()
    }

    /// All 30 items, targets first.
    pub fn universe(&self) -> impl Iterator<Item = &str> {
        self.targets
            .iter()
            .chain(&self.qualitative_distractors)
            .chain(&self.quantitative_distractors)
            .chain(&self.false_items)
            .map(String::as_str)
    }
}

/// The six living-room items that attach to the snap-drop-zones.
pub const COLLECTION_TARGETS: [&str; 6] = [
    "red_book",
    "twenty_pounds",
    "smartphone",
    "library_card",
    "flat_keys",
    "car_keys",
];

/// Living-room objects that fall when grabbed.
pub const COLLECTION_DISTRACTORS: [&str; 7] = [
    "magazine",
    "book",
    "remote_control",
    "notebook",
    "pencil",
    "chessboard",
    "wine_bottle",
];

/// How an item on the second NPC board relates to the pending PM task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ItemCategory {
    Correct,
    SemanticRelative,
    OtherPmTask,
    Unrelated,
}

impl ItemCategory {
    pub const ALL: [ItemCategory; 4] = [
        ItemCategory::Correct,
        ItemCategory::SemanticRelative,
        ItemCategory::OtherPmTask,
        ItemCategory::Unrelated,
    ];
}

/// Eight-item board shown after an affirmative answer in an NPC scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NpcBoard {
    pub correct: &'static str,
    pub semantic_relative: &'static str,
    pub other_pm_tasks: [&'static str; 3],
    pub unrelated: [&'static str; 3],
}

const UNRELATED: [&str; 3] = ["ice_cream", "umbrella", "sunglasses"];

impl NpcBoard {
    pub fn for_task(task: PmTask) -> Option<NpcBoard> {
        let board = match task {
            PmTask::CallRose => NpcBoard {
                correct: "smartphone",
                semantic_relative: "tablet_computer",
                other_pm_tasks: ["red_book", "carrot_cake", "flat_keys"],
                unrelated: UNRELATED,
            },
            PmTask::CarrotCake => NpcBoard {
                correct: "carrot_cake",
                semantic_relative: "chocolate_cake",
                other_pm_tasks: ["red_book", "smartphone", "flat_keys"],
                unrelated: UNRELATED,
            },
            PmTask::ReturnLibraryBook => NpcBoard {
                correct: "red_book",
                semantic_relative: "blue_book",
                other_pm_tasks: ["carrot_cake", "smartphone", "flat_keys"],
                unrelated: UNRELATED,
            },
            PmTask::SpareKeys => NpcBoard {
                correct: "flat_keys",
                semantic_relative: "car_keys",
                other_pm_tasks: ["red_book", "carrot_cake", "smartphone"],
                unrelated: UNRELATED,
            },
            _ => return None,
        };
        Some(board)
    }

    pub fn categorize(&self, item: &str) -> Option<ItemCategory> {
        if item == self.correct {
            Some(ItemCategory::Correct)
        } else if item == self.semantic_relative {
            Some(ItemCategory::SemanticRelative)
        } else if self.other_pm_tasks.contains(&item) {
            Some(ItemCategory::OtherPmTask)
        } else if self.unrelated.contains(&item) {
            Some(ItemCategory::Unrelated)
        } else {
            None
        }
    }

    pub fn items(&self) -> impl Iterator<Item = &'static str> {
        std::iter::once(self.correct)
            .chain(std::iter::once(self.semantic_relative))
            .chain(self.other_pm_tasks)
            .chain(self.unrelated)
    }

    pub fn items_in(&self, category: ItemCategory) -> Vec<&'static str> {
        match category {
            ItemCategory::Correct => vec![self.correct],
            ItemCategory::SemanticRelative => vec![self.semantic_relative],
            ItemCategory::OtherPmTask => self.other_pm_tasks.to_vec(),
            ItemCategory::Unrelated => self.unrelated.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VisualKind {
    Target,
    ShapeDistractor,
    ColorDistractor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AuditoryKind {
    Target,
    HighPitch,
    LowPitch,
}

/// A poster or speaker placed along the road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stimulus<K> {
    pub index: u16,
    pub kind: K,
    pub side: Side,
}

/// Lays out `counts` stimuli per kind in kind order, alternating Left/Right
/// within each kind so every kind is split evenly between the two sides.
pub fn layout<K: Copy>(counts: &[(K, u16)]) -> Vec<Stimulus<K>> {
    let mut out = Vec::new();
    let mut index = 0u16;
    for &(kind, count) in counts {
        for i in 0..count {
            let side = if i % 2 == 0 { Side::Left } else { Side::Right };
            out.push(Stimulus { index, kind, side });
            index += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_recognition_catalog_is_valid() {
        let catalog = RecognitionCatalog::default();
        catalog.validate().unwrap();
        assert_eq!(catalog.universe().count(), 30);
    }

    #[test]
    fn duplicate_across_sets_is_rejected() {
        let mut catalog = RecognitionCatalog::default();
        catalog.false_items[0] = "skimmed_milk".into();
        assert_eq!(
            catalog.validate(),
            Err(CatalogError::DuplicateItem("skimmed_milk".into()))
        );
    }

    #[test]
    fn npc_boards_have_eight_distinct_items() {
        for task in [
            PmTask::CallRose,
            PmTask::CarrotCake,
            PmTask::ReturnLibraryBook,
            PmTask::SpareKeys,
        ] {
            let board = NpcBoard::for_task(task).unwrap();
            let items: std::collections::BTreeSet<_> = board.items().collect();
            assert_eq!(items.len(), 8, "{task:?}");
            for item in items {
                assert!(board.categorize(item).is_some());
            }
        }
        assert!(NpcBoard::for_task(PmTask::MedicationBreakfast).is_none());
    }

    #[test]
    fn layout_splits_each_kind_by_side() {
        let stimuli = layout(&[
            (VisualKind::Target, 16),
            (VisualKind::ShapeDistractor, 8),
            (VisualKind::ColorDistractor, 8),
        ]);
        assert_eq!(stimuli.len(), 32);
        let left_targets = stimuli
            .iter()
            .filter(|s| s.kind == VisualKind::Target && s.side == Side::Left)
            .count();
        assert_eq!(left_targets, 8);
        assert!(stimuli.iter().enumerate().all(|(i, s)| s.index as usize == i));
    }
}
