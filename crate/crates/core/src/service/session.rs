//! Per-session state machine. Every mutation is a [`Record`]; the same
//! `apply` runs for live requests and for replay from disk.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::catalog::{LevelCatalog, LevelKey, PreparedLevel};
use crate::analysis::{classify_trial, Outcome};
use crate::mapping::Ecology;
use crate::process_sim::MAIN_LEVEL_COUNT;
use crate::records::{ClientEvent, LevelLog, Phase, SessionLog, SurveyResponse, SURVEY_STATEMENTS};

pub const QUALIFY_PASSES_REQUIRED: u32 = 2;
pub const QUALIFY_MAX_FALSE_ALARMS: usize = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("cannot {action} in phase {phase}")]
    WrongPhase { action: &'static str, phase: Phase },
    #[error("level {requested} is not the active level (active: {active})")]
    NotActiveLevel { requested: String, active: String },
    #[error("event time {t} outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("event time {t} precedes the previous event at {last}")]
    TimeNotMonotone { t: f64, last: f64 },
    #[error("stimulus {0:?} is not part of this session's ecology")]
    ForeignStimulus(crate::mapping::Stimulus),
    #[error("invalid sequence: {0}")]
    BadSequence(String),
    #[error("survey needs {expected} answers, got {got}")]
    IncompleteSurvey { expected: usize, got: usize },
    #[error("empty event id")]
    EmptyEventId,
    #[error("first record of a session must be `created`")]
    NotCreated,
}

/// One line of a session's append-only store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Created {
        session_id: String,
        ecology: Ecology,
        seed: u64,
        level_order: Vec<usize>,
        created_at_ms: u64,
    },
    Advanced {
        from: Phase,
    },
    Event {
        event: ClientEvent,
    },
    Completed {
        key: LevelKey,
    },
    Survey {
        response: SurveyResponse,
    },
}

/// What a successfully applied record changed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Applied {
    Created,
    Advanced { phase: Phase },
    Stored,
    Duplicate,
    Qualifier { passed: bool, passes: u32, phase: Phase },
    LevelDone { completed: usize, phase: Phase },
    SurveyStored,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub ecology: Ecology,
    pub seed: u64,
    /// Indices into the catalogue's main levels, in presentation order.
    pub level_order: Vec<usize>,
    pub created_at_ms: u64,
    pub phase: Phase,
    pub qualify_attempts: u32,
    pub qualify_passes: u32,
    /// The qualifier currently being played, with its events.
    qualifier: Option<LevelLog>,
    /// Main levels in presentation order, as far as reached.
    levels: Vec<LevelLog>,
    pub survey: Option<SurveyResponse>,
    seen_ids: HashSet<String>,
}

fn empty_log(position: usize, prepared: &PreparedLevel) -> LevelLog {
    LevelLog {
        position,
        level: prepared.level.clone(),
        onsets: prepared.onsets.clone(),
        completed: false,
        annotations: Vec::new(),
        sequences: Vec::new(),
    }
}

impl Session {
    pub fn new(id: String, ecology: Ecology, seed: u64, level_order: Vec<usize>, created_at_ms: u64) -> Self {
        Self {
            id,
            ecology,
            seed,
            level_order,
            created_at_ms,
            phase: Phase::TrainingTask,
            qualify_attempts: 0,
            qualify_passes: 0,
            qualifier: None,
            levels: Vec::new(),
            survey: None,
            seen_ids: HashSet::new(),
        }
    }

    /// Rebuilds a session from its records.
    pub fn replay(records: &[Record], catalog: &LevelCatalog) -> Result<Self, SessionError> {
        let Some(Record::Created {
            session_id,
            ecology,
            seed,
            level_order,
            created_at_ms,
        }) = records.first()
        else {
            return Err(SessionError::NotCreated);
        };
        let mut s = Session::new(session_id.clone(), *ecology, *seed, level_order.clone(), *created_at_ms);
        for r in &records[1..] {
            s.apply(r, catalog)?;
        }
        Ok(s)
    }

    pub fn main_completed(&self) -> usize {
        self.levels.iter().filter(|l| l.completed).count()
    }

    /// The level a participant may currently fetch, annotate or complete.
    pub fn active_key(&self) -> Option<LevelKey> {
        match self.phase {
            Phase::TrainingQualify => Some(LevelKey::Qualifier(self.qualify_attempts)),
            Phase::Main => Some(LevelKey::Main(self.main_completed())),
            _ => None,
        }
    }

    /// Resolves `key` to a level if it is the active one.
    pub fn active_level(&self, key: LevelKey, catalog: &LevelCatalog) -> Result<PreparedLevel, SessionError> {
        let active = self.active_key();
        if active != Some(key) {
            return Err(SessionError::NotActiveLevel {
                requested: key.to_string(),
                active: active.map_or_else(|| "none".to_string(), |k| k.to_string()),
            });
        }
        Ok(match key {
            LevelKey::Qualifier(n) => catalog.qualifier(n),
            LevelKey::Main(i) => (*catalog.main()[self.level_order[i]]).clone(),
        })
    }

    fn active_log(&mut self, catalog: &LevelCatalog) -> Result<&mut LevelLog, SessionError> {
        let key = self.active_key().ok_or(SessionError::WrongPhase {
            action: "record events",
            phase: self.phase,
        })?;
        match key {
            LevelKey::Qualifier(n) => {
                if self.qualifier.is_none() {
                    self.qualifier = Some(empty_log(n as usize, &catalog.qualifier(n)));
                }
                Ok(self.qualifier.as_mut().unwrap())
            }
            LevelKey::Main(i) => {
                if self.levels.len() == i {
                    let prepared = catalog.main()[self.level_order[i]].clone();
                    self.levels.push(empty_log(i, &prepared));
                }
                Ok(&mut self.levels[i])
            }
        }
    }

    /// Validates and applies one record. On error the session is unchanged.
    pub fn apply(&mut self, record: &Record, catalog: &LevelCatalog) -> Result<Applied, SessionError> {
        match record {
            Record::Created { .. } => Ok(Applied::Created),
            Record::Advanced { from } => self.advance(*from),
            Record::Event { event } => self.record_event(event, catalog),
            Record::Completed { key } => self.complete(*key, catalog),
            Record::Survey { response } => self.submit_survey(response),
        }
    }

    fn advance(&mut self, from: Phase) -> Result<Applied, SessionError> {
        let next = match (self.phase, from) {
            (Phase::TrainingTask, Phase::TrainingTask) => Phase::TrainingStimuli,
            (Phase::TrainingStimuli, Phase::TrainingStimuli) => Phase::TrainingQualify,
            _ => {
                return Err(SessionError::WrongPhase {
                    action: "advance",
                    phase: self.phase,
                })
            }
        };
        self.phase = next;
        Ok(Applied::Advanced { phase: next })
    }

    fn record_event(&mut self, event: &ClientEvent, catalog: &LevelCatalog) -> Result<Applied, SessionError> {
        if event.id().is_empty() {
            return Err(SessionError::EmptyEventId);
        }
        if self.seen_ids.contains(event.id()) {
            return Ok(Applied::Duplicate);
        }
        let ecology = self.ecology;
        let log = self.active_log(catalog)?;
        if event.level_id() != log.level.id {
            return Err(SessionError::NotActiveLevel {
                requested: event.level_id().to_string(),
                active: log.level.id.clone(),
            });
        }
        let t = event.t();
        let duration = log.level.duration;
        if !(t.is_finite() && (0.0..=duration).contains(&t)) {
            return Err(SessionError::TimeOutOfRange { t, duration });
        }
        let last = log
            .annotations
            .iter()
            .map(|a| a.t)
            .chain(log.sequences.iter().map(|s| s.completed_at))
            .fold(f64::NEG_INFINITY, f64::max);
        if t < last {
            return Err(SessionError::TimeNotMonotone { t, last });
        }
        match event {
            ClientEvent::Annotation(a) => {
                if !ecology.stimuli().contains(&a.stimulus) {
                    return Err(SessionError::ForeignStimulus(a.stimulus));
                }
                log.annotations.push(a.clone());
            }
            ClientEvent::Sequence(s) => {
                if !(s.duration.is_finite() && s.duration > 0.0) {
                    return Err(SessionError::BadSequence(format!("duration {} must be positive", s.duration)));
                }
                if s.sequence_len == 0 {
                    return Err(SessionError::BadSequence("empty sequence".into()));
                }
                log.sequences.push(s.clone());
            }
        }
        self.seen_ids.insert(event.id().to_string());
        Ok(Applied::Stored)
    }

    fn complete(&mut self, key: LevelKey, catalog: &LevelCatalog) -> Result<Applied, SessionError> {
        self.active_level(key, catalog)?;
        let ecology = self.ecology;
        let log = self.active_log(catalog)?;
        match key {
            LevelKey::Qualifier(_) => {
                let passed = qualifier_passed(log, ecology);
                self.qualifier = None;
                self.qualify_attempts += 1;
                if passed {
                    self.qualify_passes += 1;
                }
                if self.qualify_passes >= QUALIFY_PASSES_REQUIRED {
                    self.phase = Phase::Main;
                }
                Ok(Applied::Qualifier {
                    passed,
                    passes: self.qualify_passes,
                    phase: self.phase,
                })
            }
            LevelKey::Main(_) => {
                log.completed = true;
                let completed = self.main_completed();
                if completed == MAIN_LEVEL_COUNT {
                    self.phase = Phase::Survey;
                }
                Ok(Applied::LevelDone {
                    completed,
                    phase: self.phase,
                })
            }
        }
    }

    fn submit_survey(&mut self, response: &SurveyResponse) -> Result<Applied, SessionError> {
        if self.phase != Phase::Survey {
            return Err(SessionError::WrongPhase {
                action: "submit the survey",
                phase: self.phase,
            });
        }
        if !response.is_complete() {
            return Err(SessionError::IncompleteSurvey {
                expected: SURVEY_STATEMENTS.len(),
                got: response.answers.len(),
            });
        }
        self.survey = Some(response.clone());
        self.phase = Phase::Done;
        Ok(Applied::SurveyStored)
    }

    /// The exported view: main levels reached, events in time order.
    pub fn to_log(&self) -> SessionLog {
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.annotations.sort_by(|a, b| a.t.total_cmp(&b.t));
                l.sequences.sort_by(|a, b| a.completed_at.total_cmp(&b.completed_at));
                l
            })
            .collect();
        SessionLog {
            session_id: self.id.clone(),
            ecology: self.ecology,
            phase: self.phase,
            created_at_ms: self.created_at_ms,
            qualify_attempts: self.qualify_attempts,
            qualify_passes: self.qualify_passes,
            levels,
            survey: self.survey.clone(),
        }
    }
}

/// A qualifier passes when every anomaly was hit, at most one false alarm
/// was raised and at least one sequence was copied.
pub fn qualifier_passed(log: &LevelLog, ecology: Ecology) -> bool {
    let mut false_alarms = 0;
    for stimulus in ecology.stimuli() {
        let toggles: Vec<_> = log.annotations_for(stimulus).iter().map(|a| (a.t, a.action)).collect();
        match classify_trial(log.stimulus_onset(stimulus), &toggles).outcome {
            Outcome::Miss => return false,
            Outcome::FalseAlarm if log.stimulus_onset(stimulus).is_some() => return false,
            Outcome::FalseAlarm => false_alarms += 1,
            Outcome::Hit | Outcome::CorrectRejection => {}
        }
    }
    false_alarms <= QUALIFY_MAX_FALSE_ALARMS && !log.sequences.is_empty()
}
