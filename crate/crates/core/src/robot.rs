//! A scripted participant that plays complete sessions over HTTP.
//!
//! The robot is given the level seed, so it rebuilds the level catalogue
//! and knows when each anomaly crosses tolerance. It answers at
//! `onset + delay`; the sloppy profile also misses and false-alarms at
//! fixed probabilities. Qualifiers are always played perfectly.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::mapping::{Ecology, Stimulus};
use crate::process_sim::{MAIN_LEVEL_COUNT, SimError};
use crate::records::{Action, AnnotationEvent, Answer, ClientEvent, Export, Phase, SequenceEvent, SurveyResponse, SURVEY_STATEMENTS};
use crate::service::{CreatedSession, LevelCatalog, LevelPlan, PreparedLevel, SessionStatus};

/// First sequence length of the copy task.
pub const SEQUENCE_START_LEN: u32 = 4;
/// The length grows by one after this many completions.
pub const SEQUENCE_GROWTH_EVERY: u32 = 2;
pub const SEQUENCE_MAX_LEN: u32 = 10;
/// Robot copy speed: a fixed pause plus a time per symbol.
pub const COPY_BASE_S: f64 = 0.5;
pub const COPY_PER_SYMBOL_S: f64 = 0.25;
const MAX_QUALIFY_ATTEMPTS: u32 = 10;

#[derive(Debug, thiserror::Error)]
pub enum RobotError {
    #[error("request to {url} failed: {source}")]
    Http { url: String, source: reqwest::Error },
    #[error("{method} {url} returned {status}: {body}")]
    Status {
        method: &'static str,
        url: String,
        status: u16,
        body: String,
    },
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("level generation: {0}")]
    Levels(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    Perfect { delay: f64 },
    Sloppy { pmiss: f64, pfa: f64, delay: f64 },
}

impl Profile {
    pub fn delay(&self) -> f64 {
        match *self {
            Profile::Perfect { delay } | Profile::Sloppy { delay, .. } => delay,
        }
    }

    fn miss_and_false_alarm(&self) -> (f64, f64) {
        match *self {
            Profile::Perfect { .. } => (0.0, 0.0),
            Profile::Sloppy { pmiss, pfa, .. } => (pmiss, pfa),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RobotOptions {
    /// Service root, e.g. `http://127.0.0.1:8080`.
    pub base_url: String,
    pub sessions: usize,
    pub profile: Profile,
    pub level_seed: u64,
    pub frame_rate: f64,
    pub seed: u64,
    /// Download level audio as a real client would.
    pub fetch_audio: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSession {
    pub session_id: String,
    pub ecology: Ecology,
    pub qualify_attempts: u32,
    pub levels: usize,
    pub annotations: usize,
    pub sequences: usize,
    pub audio_bytes: u64,
}

/// The sequence lengths copied during one level, with their completion
/// times and durations.
pub fn sequence_schedule(duration: f64) -> Vec<(u32, f64, f64)> {
    let mut out = Vec::new();
    let mut t = 0.0;
    for n in 0.. {
        let len = (SEQUENCE_START_LEN + n / SEQUENCE_GROWTH_EVERY).min(SEQUENCE_MAX_LEN);
        let d = COPY_BASE_S + COPY_PER_SYMBOL_S * len as f64;
        t += d;
        if t > duration {
            break;
        }
        out.push((len, t, d));
    }
    out
}

/// Earliest tolerance crossing among the criteria a stimulus displays.
pub fn stimulus_onset(level: &PreparedLevel, stimulus: Stimulus) -> Option<f64> {
    stimulus
        .group()
        .members()
        .iter()
        .filter_map(|c| level.onsets.get(c).copied())
        .reduce(f64::min)
}

/// The events the robot emits for one level, in time order.
pub fn level_events(
    level: &PreparedLevel,
    ecology: Ecology,
    profile: Profile,
    rng: &mut impl Rng,
    id_prefix: &str,
) -> Vec<ClientEvent> {
    let (pmiss, pfa) = profile.miss_and_false_alarm();
    let duration = level.level.duration;
    let level_id = &level.level.id;
    let mut timed: Vec<(f64, ClientEvent)> = Vec::new();
    for (i, (len, at, d)) in sequence_schedule(duration).into_iter().enumerate() {
        timed.push((
            at,
            ClientEvent::Sequence(SequenceEvent {
                id: format!("{id_prefix}-seq{i}"),
                level_id: level_id.clone(),
                sequence_len: len,
                completed_at: at,
                duration: d,
                received_at_ms: None,
            }),
        ));
    }
    for stimulus in ecology.stimuli() {
        // Draw both numbers for every stimulus so profiles share a stream.
        let (miss_draw, fa_draw, fa_time): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let t = match stimulus_onset(level, stimulus) {
            Some(onset) if miss_draw >= pmiss => Some((onset + profile.delay()).min(duration)),
            Some(_) => None,
            None if fa_draw < pfa => Some(fa_time * duration),
            None => None,
        };
        if let Some(t) = t {
            timed.push((
                t,
                ClientEvent::Annotation(AnnotationEvent {
                    id: format!("{id_prefix}-{}", stimulus.label()),
                    level_id: level_id.clone(),
                    stimulus,
                    action: Action::Check,
                    t,
                    received_at_ms: None,
                }),
            ));
        }
    }
    timed.sort_by(|a, b| a.0.total_cmp(&b.0));
    timed.into_iter().map(|(_, e)| e).collect()
}

struct Client {
    http: reqwest::Client,
    base: String,
}

impl Client {
    async fn send(&self, method: &'static str, path: &str, body: Option<&serde_json::Value>) -> Result<reqwest::Response, RobotError> {
        let url = format!("{}{path}", self.base);
        let mut last_err = None;
        // Bodies carry stable ids, so resending after a dropped connection is safe.
        for attempt in 0..3 {
            if attempt > 0 {
                tokio::time::sleep(Duration::from_millis(100 * attempt)).await;
            }
            let req = match method {
                "GET" => self.http.get(&url),
                _ => self.http.post(&url),
            };
            let req = match body {
                Some(b) => req.json(b),
                None => req,
            };
            match req.send().await {
                Ok(resp) if resp.status().is_success() => return Ok(resp),
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    let body = resp.text().await.unwrap_or_default();
                    return Err(RobotError::Status { method, url, status, body });
                }
                Err(source) => last_err = Some(source),
            }
        }
        Err(RobotError::Http {
            url,
            source: last_err.expect("at least one attempt"),
        })
    }

    async fn json<T: DeserializeOwned>(&self, method: &'static str, path: &str, body: Option<serde_json::Value>) -> Result<T, RobotError> {
        let resp = self.send(method, path, body.as_ref()).await?;
        let url = resp.url().to_string();
        resp.json().await.map_err(|source| RobotError::Http { url, source })
    }

    async fn bytes(&self, path: &str) -> Result<Vec<u8>, RobotError> {
        let resp = self.send("GET", path, None).await?;
        let url = resp.url().to_string();
        Ok(resp.bytes().await.map_err(|source| RobotError::Http { url, source })?.to_vec())
    }
}

pub struct Robot {
    client: Client,
    catalog: LevelCatalog,
    options: RobotOptions,
}

impl Robot {
    pub fn new(options: RobotOptions) -> Result<Self, RobotError> {
        Ok(Self {
            client: Client {
                http: reqwest::Client::new(),
                base: options.base_url.trim_end_matches('/').to_string(),
            },
            catalog: LevelCatalog::new(options.level_seed, options.frame_rate)?,
            options,
        })
    }

    /// Plays every session to the end, one after another.
    pub async fn run(&self) -> Result<Vec<RobotSession>, RobotError> {
        let mut out = Vec::with_capacity(self.options.sessions);
        for i in 0..self.options.sessions {
            out.push(self.play_session(i as u64).await?);
        }
        Ok(out)
    }

    pub async fn export(&self) -> Result<Export, RobotError> {
        self.client.json("GET", "/api/export", None).await
    }

    async fn play_session(&self, index: u64) -> Result<RobotSession, RobotError> {
        let created: CreatedSession = self.client.json("POST", "/api/session", None).await?;
        let id = created.session_id.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
        let mut summary = RobotSession {
            session_id: id.clone(),
            ecology: created.ecology,
            qualify_attempts: 0,
            levels: 0,
            annotations: 0,
            sequences: 0,
            audio_bytes: 0,
        };
        let base = format!("/api/session/{id}");
        for _ in 0..2 {
            self.client.send("POST", &format!("{base}/advance"), None).await?;
        }
        let perfect = Profile::Perfect {
            delay: self.options.profile.delay(),
        };
        loop {
            let status: SessionStatus = self.client.json("GET", &base, None).await?;
            let Some(key) = status.active_level.clone() else {
                return Err(RobotError::Protocol(format!("no active level in phase {}", status.phase)));
            };
            match status.phase {
                Phase::TrainingQualify if status.qualify_attempts < MAX_QUALIFY_ATTEMPTS => {
                    self.play_level(&base, &key, created.ecology, perfect, &mut rng, &mut summary).await?;
                    summary.qualify_attempts += 1;
                }
                Phase::TrainingQualify => {
                    return Err(RobotError::Protocol(format!("still not qualified after {MAX_QUALIFY_ATTEMPTS} attempts")))
                }
                Phase::Main => {
                    self.play_level(&base, &key, created.ecology, self.options.profile, &mut rng, &mut summary)
                        .await?;
                    summary.levels += 1;
                    if summary.levels == MAIN_LEVEL_COUNT {
                        break;
                    }
                }
                other => return Err(RobotError::Protocol(format!("unexpected phase {other}"))),
            }
        }
        let answers = (0..SURVEY_STATEMENTS.len())
            .map(|_| [Answer::Disagree, Answer::Somewhat, Answer::Agree][rng.gen_range(0..3)])
            .collect();
        let response = SurveyResponse {
            age: None,
            gender: None,
            answers,
            comment: String::new(),
        };
        let status: serde_json::Value = self
            .client
            .json("POST", &format!("{base}/survey"), Some(serde_json::to_value(response).unwrap()))
            .await?;
        if status["status"]["phase"] != "DONE" {
            return Err(RobotError::Protocol(format!("survey did not finish the session: {status}")));
        }
        tracing::info!(session = %id, ecology = %created.ecology, "robot session done");
        Ok(summary)
    }

    async fn play_level(
        &self,
        base: &str,
        key: &str,
        ecology: Ecology,
        profile: Profile,
        rng: &mut ChaCha8Rng,
        summary: &mut RobotSession,
    ) -> Result<(), RobotError> {
        let plan: LevelPlan = self.client.json("GET", &format!("{base}/level/{key}/plan"), None).await?;
        let level = self
            .catalog
            .by_id(&plan.level_id)
            .ok_or_else(|| RobotError::Protocol(format!("unknown level {}; is the level seed right?", plan.level_id)))?;
        if (level.level.duration - plan.duration).abs() > 1e-9 {
            return Err(RobotError::Protocol(format!("level {} duration mismatch", plan.level_id)));
        }
        if self.options.fetch_audio {
            let wav = self.client.bytes(&format!("{base}/level/{key}/audio")).await?;
            if wav.len() < 44 || &wav[..4] != b"RIFF" {
                return Err(RobotError::Protocol(format!("level {key} audio is not a WAV")));
            }
            summary.audio_bytes += wav.len() as u64;
        }
        let prefix = format!("{}-{key}", summary.session_id);
        for event in level_events(&level, ecology, profile, rng, &prefix) {
            match &event {
                ClientEvent::Annotation(_) => summary.annotations += 1,
                ClientEvent::Sequence(_) => summary.sequences += 1,
            }
            self.client
                .send("POST", &format!("{base}/event"), Some(&serde_json::to_value(&event).unwrap()))
                .await?;
        }
        self.client.send("POST", &format!("{base}/level/{key}/complete"), None).await?;
        Ok(())
    }
}
