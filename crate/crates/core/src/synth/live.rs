//! Block-wise rendering fed by a queue of parameter updates.

use std::collections::VecDeque;
use std::sync::mpsc::{self, Receiver};
use std::thread;

use crate::mapping::{Ecology, StimulusParams};
use crate::process_sim::{CriterionFrame, Level};

use super::{level_sample_count, level_updates, AssetLibrary, Engine};

pub const DEFAULT_BLOCK_SIZE: usize = 1024;

/// Parameters for all four stimuli, effective from `at_sample`.
#[derive(Debug, Clone, Copy)]
pub struct ParamUpdate {
    pub at_sample: u64,
    pub params: [StimulusParams; 4],
}

/// Pulls updates from a channel and yields fixed-size blocks of mixed audio.
///
/// Before rendering a block the renderer waits until it has seen an update
/// at or beyond the end of that block, or until the sender hangs up. This
/// keeps output independent of producer timing, so a live stream is
/// bit-identical to the offline render of the same updates.
pub struct LiveRenderer {
    engine: Engine,
    rx: Option<Receiver<ParamUpdate>>,
    pending: VecDeque<ParamUpdate>,
    pos: u64,
    total: u64,
    block_size: usize,
}

impl LiveRenderer {
    pub fn new(
        ecology: Ecology,
        seed: u64,
        sample_rate: u32,
        assets: &AssetLibrary,
        total_samples: u64,
        block_size: usize,
        rx: Receiver<ParamUpdate>,
    ) -> Self {
        Self {
            engine: Engine::new(ecology, seed, sample_rate, assets),
            rx: Some(rx),
            pending: VecDeque::new(),
            pos: 0,
            total: total_samples,
            block_size: block_size.max(1),
        }
    }

    pub fn total_samples(&self) -> u64 {
        self.total
    }

    fn fill_until(&mut self, end: u64) {
        while self.pending.back().map_or(true, |u| u.at_sample < end) {
            let Some(rx) = &self.rx else { return };
            match rx.recv() {
                Ok(u) => self.pending.push_back(u),
                Err(_) => self.rx = None,
            }
        }
    }

    /// The next block, or `None` once the level is fully rendered.
    pub fn next_block(&mut self) -> Option<Vec<f32>> {
        if self.pos >= self.total {
            return None;
        }
        let end = (self.pos + self.block_size as u64).min(self.total);
        self.fill_until(end);
        let mut block = Vec::with_capacity((end - self.pos) as usize);
        let mut cursor = self.pos;
        while let Some(u) = self.pending.front().copied() {
            if u.at_sample >= end {
                break;
            }
            if u.at_sample > cursor {
                self.engine.render((u.at_sample - cursor) as usize, &mut block, None);
                cursor = u.at_sample;
            }
            self.engine.apply(&u.params);
            self.pending.pop_front();
        }
        if end > cursor {
            self.engine.render((end - cursor) as usize, &mut block, None);
        }
        self.pos = end;
        Some(block)
    }
}

impl Iterator for LiveRenderer {
    type Item = Vec<f32>;

    fn next(&mut self) -> Option<Vec<f32>> {
        self.next_block()
    }
}

/// Streams a level: a producer thread maps frames and queues updates while
/// the returned renderer yields audio blocks.
pub fn stream_level(
    level: &Level,
    frames: Vec<CriterionFrame>,
    ecology: Ecology,
    seed: u64,
    sample_rate: u32,
    assets: &AssetLibrary,
    block_size: usize,
) -> LiveRenderer {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for u in level_updates(&frames, ecology, sample_rate) {
            if tx.send(u).is_err() {
                break;
            }
        }
    });
    LiveRenderer::new(
        ecology,
        seed,
        sample_rate,
        assets,
        level_sample_count(level.duration, sample_rate),
        block_size,
        rx,
    )
}
