use std::collections::BTreeSet;

use super::ScoringError;
use crate::catalog::RecognitionCatalog;

/// 2 points per target, 1 per qualitative or quantitative distractor, 0 per
/// false item. Repeated ids count once.
pub fn score_recognition<'a, I>(selected: I, catalog: &RecognitionCatalog) -> Result<u32, ScoringError>
where
    I: IntoIterator<Item = &'a str>,
{
    let unique: BTreeSet<&str> = selected.into_iter().collect();
    if unique.len() > catalog.list_capacity() {
        return Err(ScoringError::SelectionTooLarge { selected: unique.len(), capacity: catalog.list_capacity() });
    }
    unique.into_iter().try_fold(0, |acc, item| {
        catalog
            .classify(item)
            .map(|class| acc + class.points())
            .ok_or_else(|| ScoringError::UnknownItem(item.to_owned()))
    })
}
