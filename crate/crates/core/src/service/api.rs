use std::sync::Arc;

use axum::body::Body;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use super::catalog::LevelKey;
use super::session::{Applied, Record, Session, SessionError};
use super::{now_ms, AppState, ServiceError};
use crate::mapping::{Ecology, Stimulus};
use crate::records::{ClientEvent, Export, Phase, SurveyResponse};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Session(SessionError::WrongPhase { .. } | SessionError::NotActiveLevel { .. }) => {
                StatusCode::CONFLICT
            }
            ServiceError::Session(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ServiceError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusLabel {
    pub stimulus: Stimulus,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub ecology: Ecology,
    pub phase: Phase,
    /// Checkbox labels in group order: WPD, PH, WPT, PT.
    pub stimulus_labels: Vec<StimulusLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStatus {
    pub session_id: String,
    pub ecology: Ecology,
    pub phase: Phase,
    pub qualify_attempts: u32,
    pub qualify_passes: u32,
    pub main_completed: usize,
    /// Key of the level to play next, `q<n>` or `0..9`.
    pub active_level: Option<String>,
}

impl From<&Session> for SessionStatus {
    fn from(s: &Session) -> Self {
        Self {
            session_id: s.id.clone(),
            ecology: s.ecology,
            phase: s.phase,
            qualify_attempts: s.qualify_attempts,
            qualify_passes: s.qualify_passes,
            main_completed: s.main_completed(),
            active_level: s.active_key().map(|k| k.to_string()),
        }
    }
}

/// What a client needs to play a level. Never includes anomaly timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPlan {
    pub key: String,
    pub level_id: String,
    pub duration: f64,
    pub sequence_seed: u64,
    pub frame_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    #[serde(flatten)]
    pub applied: serde_json::Value,
    pub status: SessionStatus,
}

fn ack(applied: Applied, session: &Session) -> Json<Ack> {
    Json(Ack {
        applied: serde_json::to_value(applied).expect("serializable"),
        status: session.into(),
    })
}

fn parse_key(k: &str) -> ApiResult<LevelKey> {
    k.parse().map_err(|e: super::BadLevelKey| ServiceError::BadRequest(e.to_string()))
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "sessions": state.session_count(),
        "completed": state.completed_counts(),
    }))
}

async fn create_session(State(state): State<Arc<AppState>>) -> ApiResult<(StatusCode, Json<CreatedSession>)> {
    let s = state.create_session()?;
    Ok((
        StatusCode::CREATED,
        Json(CreatedSession {
            session_id: s.id.clone(),
            ecology: s.ecology,
            phase: s.phase,
            stimulus_labels: s
                .ecology
                .stimuli()
                .into_iter()
                .map(|stimulus| StimulusLabel {
                    stimulus,
                    label: stimulus.label().to_string(),
                })
                .collect(),
        }),
    ))
}

async fn status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionStatus>> {
    Ok(Json((&state.session(&id).await?).into()))
}

async fn advance(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Ack>> {
    let from = state.session(&id).await?.phase;
    let (applied, s) = state.submit(&id, Record::Advanced { from }).await?;
    Ok(ack(applied, &s))
}

async fn plan(State(state): State<Arc<AppState>>, Path((id, k)): Path<(String, String)>) -> ApiResult<Json<LevelPlan>> {
    let key = parse_key(&k)?;
    let (session, level) = state.level(&id, key).await?;
    let salt = match key {
        LevelKey::Qualifier(n) => 0x5100_0000 ^ n as u64,
        LevelKey::Main(i) => i as u64,
    };
    Ok(Json(LevelPlan {
        key: key.to_string(),
        level_id: level.level.id,
        duration: level.level.duration,
        sequence_seed: session.seed.rotate_left(17) ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        frame_rate: state.catalog().frame_rate,
    }))
}

async fn audio(State(state): State<Arc<AppState>>, Path((id, k)): Path<(String, String)>) -> ApiResult<Response> {
    let key = parse_key(&k)?;
    let (session, level) = state.level(&id, key).await?;
    let headers = [(header::CONTENT_TYPE, "audio/wav"), (header::CACHE_CONTROL, "no-store")];
    if state.config().live_audio {
        let body = Body::from_stream(state.audio().stream(session.ecology, &level));
        return Ok((headers, body).into_response());
    }
    let wav = state.audio().wav(session.ecology, &level).await;
    Ok((headers, wav).into_response())
}

async fn complete(State(state): State<Arc<AppState>>, Path((id, k)): Path<(String, String)>) -> ApiResult<Json<Ack>> {
    let key = parse_key(&k)?;
    let (applied, s) = state.submit(&id, Record::Completed { key }).await?;
    Ok(ack(applied, &s))
}

async fn event(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(mut event): Json<ClientEvent>,
) -> ApiResult<Json<Ack>> {
    event.set_received_at(now_ms());
    let (applied, s) = state.submit(&id, Record::Event { event }).await?;
    Ok(ack(applied, &s))
}

async fn survey(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(response): Json<SurveyResponse>,
) -> ApiResult<Json<Ack>> {
    let (applied, s) = state.submit(&id, Record::Survey { response }).await?;
    Ok(ack(applied, &s))
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    ecology: Option<String>,
}

async fn export(State(state): State<Arc<AppState>>, Query(q): Query<ExportQuery>) -> ApiResult<Json<Export>> {
    let ecology = match q.ecology.as_deref().filter(|s| !s.is_empty()) {
        Some(s) => Some(s.parse::<Ecology>().map_err(|e| ServiceError::BadRequest(e.to_string()))?),
        None => None,
    };
    Ok(Json(state.export(ecology).await))
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/session", post(create_session))
        .route("/api/session/:id", get(status))
        .route("/api/session/:id/advance", post(advance))
        .route("/api/session/:id/event", post(event))
        .route("/api/session/:id/survey", post(survey))
        .route("/api/session/:id/level/:k/plan", get(plan))
        .route("/api/session/:id/level/:k/audio", get(audio))
        .route("/api/session/:id/level/:k/complete", post(complete))
        .route("/api/export", get(export));
    let app = match &state.config().static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.with_state(state)
}
