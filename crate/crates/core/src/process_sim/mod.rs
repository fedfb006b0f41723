//! Synthetic process logs: the four monitored criteria over scripted levels.
//!
//! Everything here is a pure function of its inputs. The same level, seed and
//! frame rate always yield bit-identical frames.

mod criteria;
mod format;
mod level;
mod levels;
mod trajectory;

pub use criteria::{
    Criterion, CriterionGroup, CriterionKind, CriterionRegistry, CriterionSpec, DEFAULT_LAYER_HEIGHT_MM,
    PT_THRESHOLD,
};
pub use format::{read_frame_log, write_frame_log, Scenario};
pub use level::{AnomalyEvent, Level, DEFAULT_LEVEL_DURATION_S};
pub use levels::{default_level_set, qualifier_level, MAIN_LEVEL_COUNT};
pub use trajectory::{
    frame_count, generate_trajectory, generate_trajectory_with, tolerance_onset_times,
    tolerance_onset_times_with, CriterionFrame, DEFAULT_FRAME_RATE, IDLE_JITTER_FRACTION,
    PT_IDLE_RANGE, PT_OVERSHOOT_PER_SEVERITY,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("level `{level}`: {reason}")]
    InvalidLevel { level: String, reason: String },
    #[error("level `{level}`: overlapping events on {criterion}")]
    OverlappingEvents { level: String, criterion: Criterion },
    #[error("frame rate must be positive, got {0}")]
    InvalidFrameRate(f64),
    #[error("malformed document: {0}")]
    Format(#[source] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
