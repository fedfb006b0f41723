//! Level audio: rendered once per (ecology, level) and cached as WAV bytes,
//! or streamed block by block when live audio is enabled.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use futures::{Stream, StreamExt};
use tokio::sync::OnceCell;

use super::catalog::PreparedLevel;
use crate::mapping::Ecology;
use crate::synth::{level_sample_count, mix_level, pcm16_bytes, stream_level, wav_header, AssetLibrary, DEFAULT_BLOCK_SIZE};

type Slot = Arc<OnceCell<Bytes>>;

pub struct AudioCache {
    sample_rate: u32,
    assets: Arc<AssetLibrary>,
    slots: Mutex<HashMap<(Ecology, String), Slot>>,
}

impl AudioCache {
    pub fn new(sample_rate: u32, assets: Arc<AssetLibrary>) -> Self {
        Self {
            sample_rate,
            assets,
            slots: Mutex::new(HashMap::new()),
        }
    }

    /// The level's WAV, rendering it on a blocking thread the first time.
    /// Concurrent requests for the same level wait for one render.
    pub async fn wav(&self, ecology: Ecology, level: &PreparedLevel) -> Bytes {
        let slot = self
            .slots
            .lock()
            .unwrap()
            .entry((ecology, level.level.id.clone()))
            .or_default()
            .clone();
        slot.get_or_init(|| {
            let level = level.clone();
            let assets = self.assets.clone();
            let sr = self.sample_rate;
            async move {
                tokio::task::spawn_blocking(move || {
                    let mix = mix_level(&level.level, &level.frames, ecology, level.level.seed, sr, &assets);
                    Bytes::from(mix.mix.to_wav_bytes())
                })
                .await
                .expect("render task panicked")
            }
        })
        .await
        .clone()
    }

    /// Streams the level as a WAV: the header, then PCM blocks as the live
    /// renderer produces them.
    pub fn stream(&self, ecology: Ecology, level: &PreparedLevel) -> impl Stream<Item = Result<Bytes, std::io::Error>> {
        let total = level_sample_count(level.level.duration, self.sample_rate);
        let header = Bytes::copy_from_slice(&wav_header(total as u32, self.sample_rate));
        let (tx, rx) = tokio::sync::mpsc::channel::<Bytes>(8);
        let level = level.clone();
        let assets = self.assets.clone();
        let sr = self.sample_rate;
        tokio::task::spawn_blocking(move || {
            let renderer = stream_level(
                &level.level,
                level.frames.clone(),
                ecology,
                level.level.seed,
                sr,
                &assets,
                DEFAULT_BLOCK_SIZE,
            );
            for block in renderer {
                if tx.blocking_send(Bytes::from(pcm16_bytes(&block))).is_err() {
                    break;
                }
            }
        });
        let body = futures::stream::unfold(rx, |mut rx| async move { rx.recv().await.map(|b| (b, rx)) });
        futures::stream::once(async move { header }).chain(body).map(Ok)
    }
}
