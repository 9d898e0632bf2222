use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{RadioId, SourceId};

/// A many-to-many assignment between sources and relay radios.
///
/// Both directions are stored so that loads are O(1); constructors keep them
/// mutually consistent. `from_raw_parts` skips every check so externally
/// supplied data can be audited with [`is_feasible`](super::is_feasible).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    by_source: Vec<Vec<RadioId>>,
    by_radio: Vec<Vec<SourceId>>,
}

impl Matching {
    pub fn empty(num_sources: usize, num_radios: usize) -> Self {
        Self {
            by_source: vec![Vec::new(); num_sources],
            by_radio: vec![Vec::new(); num_radios],
        }
    }

    /// Builds a matching from per-source radio lists. Lists are sorted;
    /// duplicates and out-of-range radios are rejected.
    pub fn from_assignments(num_radios: usize, assignments: Vec<Vec<RadioId>>) -> Result<Self> {
        let mut m = Self::empty(assignments.len(), num_radios);
        for (n, strategy) in assignments.into_iter().enumerate() {
            let strategy = normalize_strategy(strategy, num_radios)?;
            m.set_strategy(SourceId(n), &strategy);
        }
        Ok(m)
    }

    /// Unchecked constructor.
    pub fn from_raw_parts(by_source: Vec<Vec<RadioId>>, by_radio: Vec<Vec<SourceId>>) -> Self {
        Self {
            by_source,
            by_radio,
        }
    }

    pub fn num_sources(&self) -> usize {
        self.by_source.len()
    }

    pub fn num_radios(&self) -> usize {
        self.by_radio.len()
    }

    /// Radios held by `source`, sorted.
    pub fn strategy(&self, source: SourceId) -> &[RadioId] {
        &self.by_source[source.0]
    }

    /// Sources on `radio`, sorted.
    pub fn sources_on(&self, radio: RadioId) -> &[SourceId] {
        &self.by_radio[radio.0]
    }

    /// Number of sources sharing `radio`.
    pub fn load(&self, radio: RadioId) -> usize {
        self.by_radio[radio.0].len()
    }

    pub(crate) fn by_source(&self) -> &[Vec<RadioId>] {
        &self.by_source
    }

    pub(crate) fn by_radio(&self) -> &[Vec<SourceId>] {
        &self.by_radio
    }

    /// Replaces the radio set of `source`. `strategy` must be sorted, unique
    /// and in range.
    pub fn set_strategy(&mut self, source: SourceId, strategy: &[RadioId]) {
        debug_assert!(strategy.windows(2).all(|w| w[0] < w[1]));
        for r in std::mem::take(&mut self.by_source[source.0]) {
            let list = &mut self.by_radio[r.0];
            if let Ok(pos) = list.binary_search(&source) {
                list.remove(pos);
            }
        }
        for &r in strategy {
            let list = &mut self.by_radio[r.0];
            if let Err(pos) = list.binary_search(&source) {
                list.insert(pos, source);
            }
        }
        self.by_source[source.0] = strategy.to_vec();
    }

    /// A copy of this matching with `source` moved to `strategy`.
    pub fn with_strategy(&self, source: SourceId, strategy: &[RadioId]) -> Self {
        let mut next = self.clone();
        next.set_strategy(source, strategy);
        next
    }

    pub fn to_document(&self) -> MatchingDocument {
        MatchingDocument {
            num_radios: self.num_radios(),
            assignments: self
                .by_source
                .iter()
                .enumerate()
                .map(|(n, rs)| (n, rs.iter().map(|r| r.0).collect()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<MatchingDocument>(text)?.into_matching()
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// JSON form of a matching: an adjacency list from source id to its sorted
/// radio ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingDocument {
    pub num_radios: usize,
    pub assignments: BTreeMap<usize, Vec<usize>>,
}

impl MatchingDocument {
    pub fn into_matching(self) -> Result<Matching> {
        let num_sources = self.assignments.keys().next_back().map_or(0, |k| k + 1);
        if self.assignments.len() != num_sources {
            return Err(Error::InvalidArgument(
                "matching document must list every source id".into(),
            ));
        }
        let lists = self
            .assignments
            .into_values()
            .map(|rs| rs.into_iter().map(RadioId).collect())
            .collect();
        Matching::from_assignments(self.num_radios, lists)
    }
}

/// Sorts a candidate radio set, rejecting duplicates and unknown radios.
pub fn normalize_strategy(mut strategy: Vec<RadioId>, num_radios: usize) -> Result<Vec<RadioId>> {
    strategy.sort_unstable();
    if let Some(r) = strategy.iter().find(|r| r.0 >= num_radios) {
        return Err(Error::UnknownRadio(r.0));
    }
    if strategy.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "radio listed twice in one strategy".into(),
        ));
    }
    Ok(strategy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(ids: &[usize]) -> Vec<RadioId> {
        ids.iter().copied().map(RadioId).collect()
    }

    #[test]
    fn both_sides_stay_consistent() {
        let mut m = Matching::from_assignments(3, vec![r(&[0, 2]), r(&[2]), vec![]]).unwrap();
        assert_eq!(m.load(RadioId(2)), 2);
        assert_eq!(m.sources_on(RadioId(2)), &[SourceId(0), SourceId(1)]);
        m.set_strategy(SourceId(0), &r(&[1]));
        assert_eq!(m.load(RadioId(2)), 1);
        assert_eq!(m.load(RadioId(0)), 0);
        assert_eq!(m.sources_on(RadioId(1)), &[SourceId(0)]);
        m.set_strategy(SourceId(2), &r(&[1, 2]));
        assert_eq!(m.sources_on(RadioId(1)), &[SourceId(0), SourceId(2)]);
    }

    #[test]
    fn duplicates_and_unknown_radios_rejected() {
        assert!(Matching::from_assignments(3, vec![r(&[1, 1])]).is_err());
        assert!(matches!(
            Matching::from_assignments(3, vec![r(&[3])]),
            Err(Error::UnknownRadio(3))
        ));
    }

    #[test]
    fn json_is_adjacency_list() {
        let m = Matching::from_assignments(4, vec![r(&[3, 1]), vec![], r(&[0])]).unwrap();
        let json = serde_json::to_value(m.to_document()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"num_radios": 4, "assignments": {"0": [1, 3], "1": [], "2": [0]}})
        );
        assert_eq!(Matching::from_json(&m.to_json().unwrap()).unwrap(), m);
    }

    #[test]
    fn gaps_in_source_ids_rejected() {
        let text = r#"{"num_radios": 2, "assignments": {"0": [0], "2": [1]}}"#;
        assert!(Matching::from_json(text).is_err());
    }
}
