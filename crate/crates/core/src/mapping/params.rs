use serde::{Deserialize, Serialize};

use super::ecology::Stimulus;

/// Texture or species selected by a stimulus with discrete variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Selection {
    Silent,
    Crackling,
    Boiling,
    Misc,
    Ducks,
    Crows,
}

impl Selection {
    /// File stem under `assets/<stimulus>/`.
    pub fn asset_name(self) -> &'static str {
        match self {
            Selection::Silent => "silent",
            Selection::Crackling => "crackling",
            Selection::Boiling => "boiling",
            Selection::Misc => "misc",
            Selection::Ducks => "ducks",
            Selection::Crows => "crows",
        }
    }
}

/// Sound-control parameters for one stimulus at one frame.
///
/// Fields that do not apply to a stimulus are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StimulusParams {
    pub stimulus: Stimulus,
    pub pitch_hz: Option<f64>,
    pub loudness: f64,
    pub interval_s: Option<f64>,
    pub selection: Option<Selection>,
    pub trigger: bool,
    pub playback_rate: Option<f64>,
}

impl StimulusParams {
    pub(crate) fn bare(stimulus: Stimulus, loudness: f64) -> Self {
        Self {
            stimulus,
            pitch_hz: None,
            loudness,
            interval_s: None,
            selection: None,
            trigger: false,
            playback_rate: None,
        }
    }

    /// Whether this stream produces sound for the frame.
    ///
    /// The birdsong bed is always present; alarms only sound on their trigger.
    pub fn is_audible(&self) -> bool {
        match self.stimulus {
            Stimulus::Birds => true,
            Stimulus::Bell | Stimulus::Sizzle => self.trigger,
            _ => self.loudness > 0.0,
        }
    }

    /// Equality up to floating-point noise, used to detect parameter changes.
    pub fn approx_eq(&self, other: &Self) -> bool {
        fn close(a: Option<f64>, b: Option<f64>) -> bool {
            match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0),
                (None, None) => true,
                _ => false,
            }
        }
        self.stimulus == other.stimulus
            && close(self.pitch_hz, other.pitch_hz)
            && close(Some(self.loudness), Some(other.loudness))
            && close(self.interval_s, other.interval_s)
            && self.selection == other.selection
            && self.trigger == other.trigger
            && close(self.playback_rate, other.playback_rate)
    }
}
