//! Procedural rendering of the eight stimuli and of whole levels.
//!
//! A [`Voice`] turns a stream of [`StimulusParams`] updates into samples.
//! The [`Engine`] drives the four voices of an ecology and mixes them with a
//! soft limiter. Offline rendering ([`mix_level`]) and live block streaming
//! ([`LiveRenderer`]) share the engine, so both produce identical samples.

mod assets;
pub mod dsp;
mod live;
mod musical;
mod natural;
mod wav;

use crate::mapping::{map_frame, AlarmState, Ecology, Stimulus, StimulusParams};
use crate::process_sim::{CriterionFrame, Level};

pub use assets::{AssetLibrary, Sample};
pub use live::{stream_level, LiveRenderer, ParamUpdate, DEFAULT_BLOCK_SIZE};
pub use musical::{
    bell_partials, bell_strike, ArpeggioVoice, DroneVoice, JingleVoice, OneShotVoice, ARPEGGIO_ATTACK_S,
    ARPEGGIO_DECAY_S, BELL_LENGTH_S, BELL_MAIN_HZ, BELL_PARTIAL_RANGE, DRONE_GLIDE_S, DRONE_Q, GRAIN_LENGTH_S,
    MOTIVE_SEMITONES,
};
pub use natural::{
    droplet_sample, sizzle_burst, BirdsVoice, DropletsVoice, WaterVoice, BED_BAND_HZ, BIRD_CROSSFADE_S,
    CROW_BAND_HZ, DROPLET_BAND_HZ, DUCK_BAND_HZ, SIZZLE_LENGTH_S,
};
pub use wav::{pcm16_bytes, read_wav, read_wav_bytes, wav_bytes, wav_header, write_wav};

pub const DEFAULT_SAMPLE_RATE: u32 = 44_100;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Mono audio in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, samples: Vec<f32>) -> Self {
        Self { sample_rate, samples }
    }

    pub fn silent(sample_rate: u32, len: usize) -> Self {
        Self::new(sample_rate, vec![0.0; len])
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }

    pub fn is_silent(&self) -> bool {
        self.samples.iter().all(|&s| s == 0.0)
    }

    pub fn to_wav_bytes(&self) -> Vec<u8> {
        wav_bytes(self)
    }
}

/// One stimulus stream. Parameters apply from the next rendered sample.
pub trait Voice: Send {
    fn set_params(&mut self, params: &StimulusParams);
    /// Overwrites `out` with the next `out.len()` samples.
    fn render(&mut self, out: &mut [f32]);
}

fn voice_seed(seed: u64, stimulus: Stimulus) -> u64 {
    seed ^ (stimulus as u64 + 1).wrapping_mul(0xA24B_AED4_963E_E407)
}

/// Builds the voice for a stimulus.
pub fn make_voice(stimulus: Stimulus, seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Box<dyn Voice> {
    let seed = voice_seed(seed, stimulus);
    match stimulus {
        Stimulus::Arpeggio => Box::new(ArpeggioVoice::new(sample_rate)),
        Stimulus::Drone => Box::new(DroneVoice::new(sample_rate)),
        Stimulus::Jingle => Box::new(JingleVoice::new(sample_rate)),
        Stimulus::Bell => {
            let mut strikes = 0u64;
            Box::new(OneShotVoice::new(move || {
                strikes += 1;
                bell_strike(seed.wrapping_add(strikes - 1), sample_rate)
            }))
        }
        Stimulus::Droplets => Box::new(DropletsVoice::new(seed, sample_rate, assets)),
        Stimulus::Birds => Box::new(BirdsVoice::new(seed, sample_rate, assets)),
        Stimulus::Water => Box::new(WaterVoice::new(seed, sample_rate, assets)),
        Stimulus::Sizzle => {
            let burst = natural::sizzle_sample(seed, sample_rate, assets);
            Box::new(OneShotVoice::new(move || burst.clone()))
        }
    }
}

/// The four voices of an ecology plus a soft-limited mix bus.
pub struct Engine {
    stimuli: [Stimulus; 4],
    voices: Vec<Box<dyn Voice>>,
    scratch: Vec<f32>,
}

impl Engine {
    pub fn new(ecology: Ecology, seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Self {
        let stimuli = ecology.stimuli();
        Self {
            stimuli,
            voices: stimuli.iter().map(|&s| make_voice(s, seed, sample_rate, assets)).collect(),
            scratch: Vec::new(),
        }
    }

    pub fn stimuli(&self) -> [Stimulus; 4] {
        self.stimuli
    }

    pub fn apply(&mut self, params: &[StimulusParams; 4]) {
        for (v, p) in self.voices.iter_mut().zip(params) {
            v.set_params(p);
        }
    }

    /// Renders `n` samples, appending the limited mix and, if given, each stem.
    pub fn render(&mut self, n: usize, mix: &mut Vec<f32>, mut stems: Option<&mut [Vec<f32>; 4]>) {
        let start = mix.len();
        mix.resize(start + n, 0.0);
        let mut sum = vec![0.0f64; n];
        self.scratch.resize(n, 0.0);
        for (k, v) in self.voices.iter_mut().enumerate() {
            v.render(&mut self.scratch[..n]);
            for (acc, &s) in sum.iter_mut().zip(&self.scratch[..n]) {
                *acc += s as f64;
            }
            if let Some(stems) = stems.as_deref_mut() {
                stems[k].extend_from_slice(&self.scratch[..n]);
            }
        }
        for (m, s) in mix[start..].iter_mut().zip(sum) {
            *m = dsp::soft_clip(s) as f32;
        }
    }
}

/// Sample index at which a frame's parameters take effect.
pub fn frame_start_sample(t: f64, sample_rate: u32) -> u64 {
    (t * sample_rate as f64).round() as u64
}

pub fn level_sample_count(duration: f64, sample_rate: u32) -> u64 {
    (duration * sample_rate as f64).round() as u64
}

/// A rendered level: the mix and the per-stimulus stems before limiting.
#[derive(Debug, Clone)]
pub struct LevelMix {
    pub mix: AudioBuffer,
    pub stems: Vec<(Stimulus, AudioBuffer)>,
}

impl LevelMix {
    pub fn stem(&self, stimulus: Stimulus) -> Option<&AudioBuffer> {
        self.stems.iter().find(|(s, _)| *s == stimulus).map(|(_, b)| b)
    }
}

/// Parameter updates for every frame of a level, in time order.
pub fn level_updates(frames: &[CriterionFrame], ecology: Ecology, sample_rate: u32) -> Vec<ParamUpdate> {
    let mut alarm = AlarmState::default();
    frames
        .iter()
        .map(|f| ParamUpdate {
            at_sample: frame_start_sample(f.t, sample_rate),
            params: map_frame(f, ecology, &mut alarm),
        })
        .collect()
}

/// Renders a whole level offline: frames drive the mapping, the mapping drives the voices.
pub fn mix_level(
    level: &Level,
    frames: &[CriterionFrame],
    ecology: Ecology,
    seed: u64,
    sample_rate: u32,
    assets: &AssetLibrary,
) -> LevelMix {
    let total = level_sample_count(level.duration, sample_rate) as usize;
    let mut engine = Engine::new(ecology, seed, sample_rate, assets);
    let mut mix = Vec::with_capacity(total);
    let mut stems: [Vec<f32>; 4] = Default::default();
    let updates = level_updates(frames, ecology, sample_rate);
    for (i, u) in updates.iter().enumerate() {
        let start = (u.at_sample as usize).min(total);
        if mix.len() < start {
            engine.render(start - mix.len(), &mut mix, Some(&mut stems));
        }
        engine.apply(&u.params);
        let end = updates
            .get(i + 1)
            .map_or(total, |next| (next.at_sample as usize).min(total));
        if end > mix.len() {
            engine.render(end - mix.len(), &mut mix, Some(&mut stems));
        }
    }
    if mix.len() < total {
        engine.render(total - mix.len(), &mut mix, Some(&mut stems));
    }
    let stimuli = engine.stimuli();
    LevelMix {
        mix: AudioBuffer::new(sample_rate, mix),
        stems: stimuli
            .into_iter()
            .zip(stems)
            .map(|(s, v)| (s, AudioBuffer::new(sample_rate, v)))
            .collect(),
    }
}

/// Renders one voice under a timed list of parameter updates.
pub fn render_schedule(
    stimulus: Stimulus,
    updates: &[(f64, StimulusParams)],
    duration: f64,
    seed: u64,
    sample_rate: u32,
    assets: &AssetLibrary,
) -> AudioBuffer {
    let total = level_sample_count(duration, sample_rate) as usize;
    let mut voice = make_voice(stimulus, seed, sample_rate, assets);
    let mut out = vec![0.0f32; total];
    let mut pos = 0usize;
    for (k, (t, p)) in updates.iter().enumerate() {
        let start = (frame_start_sample(*t, sample_rate) as usize).clamp(pos, total);
        voice.render(&mut out[pos..start]);
        pos = start;
        voice.set_params(p);
        let end = updates
            .get(k + 1)
            .map_or(total, |(nt, _)| (frame_start_sample(*nt, sample_rate) as usize).clamp(pos, total));
        voice.render(&mut out[pos..end]);
        pos = end;
    }
    voice.render(&mut out[pos..]);
    for s in &mut out {
        *s = dsp::soft_clip(*s as f64) as f32;
    }
    AudioBuffer::new(sample_rate, out)
}

fn render_constant(stimulus: Stimulus, params: &StimulusParams, duration: f64, seed: u64, sample_rate: u32, assets: &AssetLibrary) -> AudioBuffer {
    render_schedule(stimulus, &[(0.0, *params)], duration, seed, sample_rate, assets)
}

pub fn render_arpeggio(params: &StimulusParams, duration: f64, sample_rate: u32) -> AudioBuffer {
    render_constant(Stimulus::Arpeggio, params, duration, 0, sample_rate, &AssetLibrary::empty())
}

pub fn render_drone(params: &StimulusParams, duration: f64, sample_rate: u32) -> AudioBuffer {
    render_constant(Stimulus::Drone, params, duration, 0, sample_rate, &AssetLibrary::empty())
}

pub fn render_jingle(params: &StimulusParams, duration: f64, sample_rate: u32) -> AudioBuffer {
    render_constant(Stimulus::Jingle, params, duration, 0, sample_rate, &AssetLibrary::empty())
}

/// One bell strike at unit loudness.
pub fn render_bell(seed: u64, sample_rate: u32) -> AudioBuffer {
    AudioBuffer::new(sample_rate, bell_strike(seed, sample_rate))
}

/// Renders Droplets, Birds, Water or Sizzle under constant parameters.
///
/// Sizzle sounds only if `params.trigger` is set.
pub fn render_natural(
    stimulus: Stimulus,
    params: &StimulusParams,
    duration: f64,
    seed: u64,
    sample_rate: u32,
    assets: &AssetLibrary,
) -> AudioBuffer {
    debug_assert!(matches!(
        stimulus,
        Stimulus::Droplets | Stimulus::Birds | Stimulus::Water | Stimulus::Sizzle
    ));
    render_constant(stimulus, params, duration, seed, sample_rate, assets)
}
