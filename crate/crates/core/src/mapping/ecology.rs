use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::process_sim::CriterionGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stimulus {
    Arpeggio,
    Drone,
    Jingle,
    Bell,
    Droplets,
    Birds,
    Water,
    Sizzle,
}

impl Stimulus {
    pub const ALL: [Stimulus; 8] = [
        Stimulus::Arpeggio,
        Stimulus::Drone,
        Stimulus::Jingle,
        Stimulus::Bell,
        Stimulus::Droplets,
        Stimulus::Birds,
        Stimulus::Water,
        Stimulus::Sizzle,
    ];

    /// The criterion group this stimulus conveys.
    pub fn group(self) -> CriterionGroup {
        match self {
            Stimulus::Arpeggio | Stimulus::Droplets => CriterionGroup::Wpd,
            Stimulus::Drone | Stimulus::Birds => CriterionGroup::Ph,
            Stimulus::Jingle | Stimulus::Water => CriterionGroup::Wpt,
            Stimulus::Bell | Stimulus::Sizzle => CriterionGroup::Pt,
        }
    }

    /// Checkbox label shown to participants.
    pub fn label(self) -> &'static str {
        match self {
            Stimulus::Arpeggio => "Arpeggio",
            Stimulus::Drone => "Drone",
            Stimulus::Jingle => "Jingle",
            Stimulus::Bell => "Bell",
            Stimulus::Droplets => "Droplets",
            Stimulus::Birds => "Birds",
            Stimulus::Water => "Water",
            Stimulus::Sizzle => "Sizzle",
        }
    }

    /// Directory name under an asset root.
    pub fn asset_dir(self) -> &'static str {
        match self {
            Stimulus::Arpeggio => "arpeggio",
            Stimulus::Drone => "drone",
            Stimulus::Jingle => "jingle",
            Stimulus::Bell => "bell",
            Stimulus::Droplets => "droplets",
            Stimulus::Birds => "birds",
            Stimulus::Water => "water",
            Stimulus::Sizzle => "sizzle",
        }
    }
}

impl fmt::Display for Stimulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Stimulus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stimulus::ALL
            .into_iter()
            .find(|x| x.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown stimulus `{s}`"))
    }
}

/// A themed set of four concurrent stimuli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ecology {
    Mixed,
    Synth,
    Nature,
}

impl Ecology {
    pub const ALL: [Ecology; 3] = [Ecology::Mixed, Ecology::Synth, Ecology::Nature];

    /// Stimuli ordered by group: WPD, PH, WPT, PT.
    pub fn stimuli(self) -> [Stimulus; 4] {
        match self {
            Ecology::Mixed => [Stimulus::Arpeggio, Stimulus::Drone, Stimulus::Water, Stimulus::Sizzle],
            Ecology::Synth => [Stimulus::Arpeggio, Stimulus::Drone, Stimulus::Jingle, Stimulus::Bell],
            Ecology::Nature => [Stimulus::Droplets, Stimulus::Birds, Stimulus::Water, Stimulus::Sizzle],
        }
    }

    pub fn stimulus_for(self, group: CriterionGroup) -> Stimulus {
        self.stimuli()[group as usize]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ecology::Mixed => "MIXED",
            Ecology::Synth => "SYNTH",
            Ecology::Nature => "NATURE",
        }
    }
}

impl fmt::Display for Ecology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown ecology `{0}` (expected MIXED, SYNTH or NATURE)")]
pub struct UnknownEcology(pub String);

impl FromStr for Ecology {
    type Err = UnknownEcology;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ecology::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownEcology(s.to_string()))
    }
}
