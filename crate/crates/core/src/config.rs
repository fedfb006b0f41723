//! Runtime configuration: built-in defaults, then an optional TOML file,
//! then `SONOSCAPE_*` environment variables.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::mapping::Ecology;
use crate::process_sim::DEFAULT_FRAME_RATE;
use crate::synth::DEFAULT_SAMPLE_RATE;

pub const ENV_PREFIX: &str = "SONOSCAPE_";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("environment variable {var}: {message}")]
    Env { var: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data_dir: PathBuf,
    pub bind: String,
    pub port: u16,
    pub enabled_ecologies: Vec<Ecology>,
    /// Seeds the main level set and the qualifier levels.
    pub level_seed: u64,
    /// Seeds ecology tie-breaks and per-session level orders.
    pub session_seed: u64,
    pub frame_rate: f64,
    pub sample_rate: u32,
    pub asset_dir: Option<PathBuf>,
    /// Stream level audio block by block instead of sending a cached WAV.
    pub live_audio: bool,
    /// Static files (the participant UI) served under `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            bind: "127.0.0.1".into(),
            port: 8080,
            enabled_ecologies: vec![Ecology::Synth, Ecology::Nature],
            level_seed: 1,
            session_seed: 0,
            frame_rate: DEFAULT_FRAME_RATE,
            sample_rate: DEFAULT_SAMPLE_RATE,
            asset_dir: None,
            live_audio: false,
            static_dir: None,
        }
    }
}

impl Config {
    /// Defaults, overridden by `file` if given, overridden by the process environment.
    pub fn load(file: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match file {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        cfg.apply_env(std::env::vars())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Applies `SONOSCAPE_<FIELD>` overrides from `vars`. Unrelated variables are ignored.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
        for (key, value) in vars {
            let Some(field) = key.strip_prefix(ENV_PREFIX) else { continue };
            let bad = |message: String| ConfigError::Env {
                var: key.clone(),
                message,
            };
            let num = |v: &str| v.trim().parse::<u64>().map_err(|e| bad(e.to_string()));
            match field {
                "DATA_DIR" => self.data_dir = value.into(),
                "BIND" => self.bind = value,
                "PORT" => self.port = u16::try_from(num(&value)?).map_err(|e| bad(e.to_string()))?,
                "ENABLED_ECOLOGIES" => {
                    self.enabled_ecologies = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.parse::<Ecology>().map_err(|e| bad(e.to_string())))
                        .collect::<Result<_, _>>()?
                }
                "LEVEL_SEED" => self.level_seed = num(&value)?,
                "SESSION_SEED" => self.session_seed = num(&value)?,
                "FRAME_RATE" => self.frame_rate = value.trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                "SAMPLE_RATE" => self.sample_rate = u32::try_from(num(&value)?).map_err(|e| bad(e.to_string()))?,
                "ASSET_DIR" => self.asset_dir = (!value.is_empty()).then(|| value.into()),
                "STATIC_DIR" => self.static_dir = (!value.is_empty()).then(|| value.into()),
                "LIVE_AUDIO" => {
                    self.live_audio = match value.trim().to_ascii_lowercase().as_str() {
                        "1" | "true" | "yes" | "on" => true,
                        "0" | "false" | "no" | "off" | "" => false,
                        other => return Err(bad(format!("expected a boolean, got `{other}`"))),
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.enabled_ecologies.is_empty() {
            return Err(ConfigError::Invalid("no ecology enabled".into()));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(ConfigError::Invalid(format!("frame_rate must be positive, got {}", self.frame_rate)));
        }
        if self.sample_rate < 8000 {
            return Err(ConfigError::Invalid(format!("sample_rate {} is too low", self.sample_rate)));
        }
        Ok(())
    }
}
