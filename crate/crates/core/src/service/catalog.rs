use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::process_sim::{
    default_level_set, generate_trajectory, qualifier_level, tolerance_onset_times, Criterion, CriterionFrame, Level,
    SimError, MAIN_LEVEL_COUNT,
};

/// Which level of a session a request is about: a qualifier attempt or a
/// position in the session's main level order. Written `q<n>` or `<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelKey {
    Qualifier(u32),
    Main(usize),
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelKey::Qualifier(n) => write!(f, "q{n}"),
            LevelKey::Main(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad level key `{0}`; expected q<attempt> or 0..9")]
pub struct BadLevelKey(pub String);

impl FromStr for LevelKey {
    type Err = BadLevelKey;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadLevelKey(s.to_string());
        match s.strip_prefix(['q', 'Q']) {
            Some(n) => n.parse().map(LevelKey::Qualifier).map_err(|_| bad()),
            None => match s.parse::<usize>() {
                Ok(i) if i < MAIN_LEVEL_COUNT => Ok(LevelKey::Main(i)),
                _ => Err(bad()),
            },
        }
    }
}

impl Serialize for LevelKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevelKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A level together with its frames and tolerance onsets.
#[derive(Debug, Clone)]
pub struct PreparedLevel {
    pub level: Level,
    pub frames: Vec<CriterionFrame>,
    pub onsets: BTreeMap<Criterion, f64>,
}

impl PreparedLevel {
    pub fn new(level: Level, frame_rate: f64) -> Result<Self, SimError> {
        let frames = generate_trajectory(&level, frame_rate)?;
        let onsets = tolerance_onset_times(&level, &frames);
        Ok(Self { level, frames, onsets })
    }
}

/// Every level the experiment can present, derived from one seed. The
/// service and the robot participant build identical catalogues from the
/// same seed.
#[derive(Debug, Clone)]
pub struct LevelCatalog {
    pub seed: u64,
    pub frame_rate: f64,
    main: Vec<Arc<PreparedLevel>>,
}

impl LevelCatalog {
    pub fn new(seed: u64, frame_rate: f64) -> Result<Self, SimError> {
        let main = default_level_set(seed)
            .into_iter()
            .map(|l| PreparedLevel::new(l, frame_rate).map(Arc::new))
            .collect::<Result<_, _>>()?;
        Ok(Self { seed, frame_rate, main })
    }

    /// Main levels in canonical (unshuffled) order.
    pub fn main(&self) -> &[Arc<PreparedLevel>] {
        &self.main
    }

    pub fn qualifier(&self, attempt: u32) -> PreparedLevel {
        PreparedLevel::new(qualifier_level(self.seed, attempt), self.frame_rate)
            .expect("qualifier levels are valid by construction")
    }

    /// Finds a level by id: `L01..L10` or `Q01..`.
    pub fn by_id(&self, id: &str) -> Option<Arc<PreparedLevel>> {
        if let Some(l) = self.main.iter().find(|l| l.level.id == id) {
            return Some(l.clone());
        }
        let n: u32 = id.strip_prefix('Q')?.parse().ok()?;
        let attempt = n.checked_sub(1)?;
        Some(Arc::new(self.qualifier(attempt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_keys_round_trip() {
        for (s, k) in [("q0", LevelKey::Qualifier(0)), ("q12", LevelKey::Qualifier(12)), ("9", LevelKey::Main(9))] {
            assert_eq!(s.parse::<LevelKey>().unwrap(), k);
            assert_eq!(k.to_string(), s);
        }
        for s in ["10", "x", "q", "-1", ""] {
            assert!(s.parse::<LevelKey>().is_err(), "{s}");
        }
    }

    #[test]
    fn lookup_by_id() {
        let c = LevelCatalog::new(3, 10.0).unwrap();
        assert_eq!(c.main().len(), MAIN_LEVEL_COUNT);
        assert_eq!(c.by_id("L04").unwrap().level, c.main()[3].level);
        assert_eq!(c.by_id("Q02").unwrap().level, c.qualifier(1).level);
        assert!(c.by_id("Q00").is_none());
        assert!(c.by_id("Z1").is_none());
    }
}
