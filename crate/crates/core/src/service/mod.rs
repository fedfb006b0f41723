//! The experiment service: sessions, training gates, level sequencing with
//! balanced ecology assignment, audio delivery, event logging and export.
//!
//! State lives in memory and every change is first appended to the
//! session's line-delimited store, so a restart replays to the same state.

mod api;
mod audio;
mod catalog;
mod session;
mod store;

use std::collections::{BTreeMap, HashMap};
use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use api::{router, CreatedSession, LevelPlan, SessionStatus};
pub use audio::AudioCache;
pub use catalog::{BadLevelKey, LevelCatalog, LevelKey, PreparedLevel};
pub use session::{qualifier_passed, Applied, Record, Session, SessionError, QUALIFY_MAX_FALSE_ALARMS, QUALIFY_PASSES_REQUIRED};
pub use store::{read_session, session_files, SessionFile, StoreError};

use crate::config::Config;
use crate::mapping::Ecology;
use crate::process_sim::{SimError, MAIN_LEVEL_COUNT};
use crate::records::{Export, Phase};
use crate::synth::AssetLibrary;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    BadRequest(String),
    #[error("level generation: {0}")]
    Levels(#[from] SimError),
    #[error("cannot listen on {addr}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

struct Entry {
    session: Session,
    file: SessionFile,
}

struct Balancer {
    done: BTreeMap<Ecology, usize>,
    rng: ChaCha8Rng,
}

pub struct AppState {
    config: Config,
    catalog: LevelCatalog,
    audio: AudioCache,
    sessions_dir: PathBuf,
    sessions: RwLock<HashMap<String, Arc<tokio::sync::Mutex<Entry>>>>,
    balancer: Mutex<Balancer>,
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

impl AppState {
    /// Builds the level catalogue and replays every stored session.
    pub fn open(config: Config) -> Result<Arc<Self>, ServiceError> {
        let catalog = LevelCatalog::new(config.level_seed, config.frame_rate)?;
        let assets = config.asset_dir.as_deref().map_or_else(AssetLibrary::empty, AssetLibrary::load);
        let sessions_dir = config.data_dir.join("sessions");
        let mut sessions = HashMap::new();
        let mut done: BTreeMap<Ecology, usize> = config.enabled_ecologies.iter().map(|&e| (e, 0)).collect();
        for path in session_files(&sessions_dir)? {
            let (records, file) = read_session(&path)?;
            if records.is_empty() {
                continue;
            }
            let session = Session::replay(&records, &catalog)
                .map_err(|e| ServiceError::BadRequest(format!("{}: {e}", path.display())))?;
            if session.phase == Phase::Done {
                *done.entry(session.ecology).or_default() += 1;
            }
            sessions.insert(session.id.clone(), Arc::new(tokio::sync::Mutex::new(Entry { session, file })));
        }
        tracing::info!(sessions = sessions.len(), dir = %sessions_dir.display(), "store replayed");
        // Offset the stream by the number of stored sessions so a restart
        // does not repeat earlier draws.
        let rng = ChaCha8Rng::seed_from_u64(config.session_seed ^ (sessions.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Ok(Arc::new(Self {
            audio: AudioCache::new(config.sample_rate, Arc::new(assets)),
            catalog,
            sessions_dir,
            sessions: RwLock::new(sessions),
            balancer: Mutex::new(Balancer { done, rng }),
            config,
        }))
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn catalog(&self) -> &LevelCatalog {
        &self.catalog
    }

    /// Completed-session counts per enabled ecology.
    pub fn completed_counts(&self) -> BTreeMap<Ecology, usize> {
        self.balancer.lock().unwrap().done.clone()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    /// Opens a session on the enabled ecology with the fewest completed
    /// sessions; ties are broken by the seeded generator.
    pub fn create_session(&self) -> Result<Session, ServiceError> {
        let mut b = self.balancer.lock().unwrap();
        let enabled = &self.config.enabled_ecologies;
        let min = enabled.iter().map(|e| b.done.get(e).copied().unwrap_or(0)).min().unwrap_or(0);
        let tied: Vec<Ecology> = enabled
            .iter()
            .copied()
            .filter(|e| b.done.get(e).copied().unwrap_or(0) == min)
            .collect();
        let ecology = *tied.choose(&mut b.rng).expect("at least one ecology is enabled");
        let seed: u64 = b.rng.gen();
        let id = loop {
            let id = format!("{:016x}", b.rng.gen::<u64>());
            if !self.sessions.read().unwrap().contains_key(&id) {
                break id;
            }
        };
        let mut level_order: Vec<usize> = (0..MAIN_LEVEL_COUNT).collect();
        level_order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let created_at_ms = now_ms();
        let mut file = SessionFile::create(&self.sessions_dir, &id)?;
        file.append(&Record::Created {
            session_id: id.clone(),
            ecology,
            seed,
            level_order: level_order.clone(),
            created_at_ms,
        })?;
        let session = Session::new(id.clone(), ecology, seed, level_order, created_at_ms);
        self.sessions.write().unwrap().insert(
            id,
            Arc::new(tokio::sync::Mutex::new(Entry {
                session: session.clone(),
                file,
            })),
        );
        tracing::info!(session = %session.id, %ecology, "session created");
        Ok(session)
    }

    fn entry(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Entry>>, ServiceError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub async fn session(&self, id: &str) -> Result<Session, ServiceError> {
        Ok(self.entry(id)?.lock().await.session.clone())
    }

    /// Validates `record` against the session, persists it, then applies it.
    /// Duplicates are acknowledged without being written again.
    pub async fn submit(&self, id: &str, record: Record) -> Result<(Applied, Session), ServiceError> {
        let entry = self.entry(id)?;
        let mut entry = entry.lock().await;
        let mut next = entry.session.clone();
        let applied = next.apply(&record, &self.catalog)?;
        if applied == Applied::Duplicate {
            return Ok((applied, next));
        }
        if next.phase == Phase::Done && entry.session.phase != Phase::Done {
            // Completion is counted under the balancing lock.
            let mut b = self.balancer.lock().unwrap();
            entry.file.append(&record)?;
            *b.done.entry(next.ecology).or_default() += 1;
        } else {
            entry.file.append(&record)?;
        }
        entry.session = next.clone();
        Ok((applied, next))
    }

    /// The active level of a session, if `key` names it.
    pub async fn level(&self, id: &str, key: LevelKey) -> Result<(Session, PreparedLevel), ServiceError> {
        let session = self.session(id).await?;
        let level = session.active_level(key, &self.catalog)?;
        Ok((session, level))
    }

    pub async fn export(&self, ecology: Option<Ecology>) -> Export {
        let entries: Vec<_> = self.sessions.read().unwrap().values().cloned().collect();
        let mut logs = Vec::new();
        for e in entries {
            let e = e.lock().await;
            if ecology.is_none_or(|eco| eco == e.session.ecology) {
                logs.push(e.session.to_log());
            }
        }
        logs.sort_by(|a, b| a.created_at_ms.cmp(&b.created_at_ms).then_with(|| a.session_id.cmp(&b.session_id)));
        Export::new(logs)
    }

    pub fn audio(&self) -> &AudioCache {
        &self.audio
    }
}

/// Binds the configured address, with a clear error when it is taken.
pub async fn bind(config: &Config) -> Result<tokio::net::TcpListener, ServiceError> {
    let addr = format!("{}:{}", config.bind, config.port);
    tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })
}

/// Serves until `shutdown` resolves, then finishes in-flight requests.
pub async fn serve(
    state: Arc<AppState>,
    listener: tokio::net::TcpListener,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(?addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServiceError::Serve)
}
