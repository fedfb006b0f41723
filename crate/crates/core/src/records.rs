//! Session records shared by the experiment service, the robot participant
//! and the analysis: what a participant did, and the export document built
//! from it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mapping::{Ecology, Stimulus};
use crate::process_sim::{Criterion, Level};

/// Bumped whenever the export layout changes incompatibly.
pub const EXPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    TrainingTask,
    TrainingStimuli,
    TrainingQualify,
    Main,
    Survey,
    Done,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::TrainingTask => "TRAINING_TASK",
            Phase::TrainingStimuli => "TRAINING_STIMULI",
            Phase::TrainingQualify => "TRAINING_QUALIFY",
            Phase::Main => "MAIN",
            Phase::Survey => "SURVEY",
            Phase::Done => "DONE",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Action {
    Check,
    Uncheck,
}

/// A checkbox toggle, timed in seconds from the start of level audio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationEvent {
    pub id: String,
    pub level_id: String,
    pub stimulus: Stimulus,
    pub action: Action,
    pub t: f64,
    /// Server receive time, milliseconds since the Unix epoch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received_at_ms: Option<u64>,
}

/// One copied sequence of the primary task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEvent {
    pub id: String,
    pub level_id: String,
    pub sequence_len: u32,
    pub completed_at: f64,
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received_at_ms: Option<u64>,
}

/// Client event body, distinguished by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClientEvent {
    Annotation(AnnotationEvent),
    Sequence(SequenceEvent),
}

impl ClientEvent {
    pub fn id(&self) -> &str {
        match self {
            ClientEvent::Annotation(e) => &e.id,
            ClientEvent::Sequence(e) => &e.id,
        }
    }

    pub fn level_id(&self) -> &str {
        match self {
            ClientEvent::Annotation(e) => &e.level_id,
            ClientEvent::Sequence(e) => &e.level_id,
        }
    }

    /// The level-relative time used for ordering.
    pub fn t(&self) -> f64 {
        match self {
            ClientEvent::Annotation(e) => e.t,
            ClientEvent::Sequence(e) => e.completed_at,
        }
    }

    pub fn set_received_at(&mut self, ms: u64) {
        match self {
            ClientEvent::Annotation(e) => e.received_at_ms = Some(ms),
            ClientEvent::Sequence(e) => e.received_at_ms = Some(ms),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Answer {
    Disagree,
    Somewhat,
    Agree,
}

impl Answer {
    /// Agreement value on the 0/50/100 scale.
    pub fn value(self) -> f64 {
        match self {
            Answer::Disagree => 0.0,
            Answer::Somewhat => 50.0,
            Answer::Agree => 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown answer {0:?}; expected DISAGREE, SOMEWHAT or AGREE")]
pub struct UnknownAnswer(pub String);

impl FromStr for Answer {
    type Err = UnknownAnswer;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "DISAGREE" => Ok(Answer::Disagree),
            "SOMEWHAT" | "SOMEWHAT_AGREE" => Ok(Answer::Somewhat),
            "AGREE" => Ok(Answer::Agree),
            _ => Err(UnknownAnswer(s.to_string())),
        }
    }
}

/// The end-of-experiment statements, in presentation order.
pub const SURVEY_STATEMENTS: [&str; 7] = [
    "Easy to distinguish sounds",
    "Sounds distract from task",
    "Sounds are stressful",
    "Task is stressful",
    "Task is fun",
    "Task is difficult",
    "Task distracts from sounds",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyResponse {
    #[serde(default)]
    pub age: Option<u32>,
    #[serde(default)]
    pub gender: Option<String>,
    /// One answer per entry of [`SURVEY_STATEMENTS`], same order.
    pub answers: Vec<Answer>,
    #[serde(default)]
    pub comment: String,
}

impl SurveyResponse {
    pub fn is_complete(&self) -> bool {
        self.answers.len() == SURVEY_STATEMENTS.len()
    }
}

/// A presented main level with everything needed to score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelLog {
    pub position: usize,
    pub level: Level,
    /// Tolerance-crossing time per anomalous criterion.
    pub onsets: BTreeMap<Criterion, f64>,
    pub completed: bool,
    pub annotations: Vec<AnnotationEvent>,
    pub sequences: Vec<SequenceEvent>,
}

impl LevelLog {
    /// Anomaly onset as heard through `stimulus`: the earliest crossing among
    /// the criteria it displays, if any.
    pub fn stimulus_onset(&self, stimulus: Stimulus) -> Option<f64> {
        stimulus
            .group()
            .members()
            .iter()
            .filter_map(|c| self.onsets.get(c).copied())
            .reduce(f64::min)
    }

    /// Annotations for one checkbox, in time order.
    pub fn annotations_for(&self, stimulus: Stimulus) -> Vec<&AnnotationEvent> {
        let mut v: Vec<_> = self.annotations.iter().filter(|a| a.stimulus == stimulus).collect();
        v.sort_by(|a, b| a.t.total_cmp(&b.t));
        v
    }
}

/// The exported record of one participant run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub session_id: String,
    pub ecology: Ecology,
    pub phase: Phase,
    pub created_at_ms: u64,
    pub qualify_attempts: u32,
    pub qualify_passes: u32,
    /// Main levels in presentation order, as far as the participant got.
    pub levels: Vec<LevelLog>,
    pub survey: Option<SurveyResponse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Export {
    pub schema_version: u32,
    pub sessions: Vec<SessionLog>,
}

impl Export {
    pub fn new(sessions: Vec<SessionLog>) -> Self {
        Self {
            schema_version: EXPORT_SCHEMA_VERSION,
            sessions,
        }
    }
}
