//! Auditory-icon stimuli: Droplets, Birds, Water and Sizzle.
//!
//! Each has a procedural generator. A user-supplied recording from the asset
//! library replaces the generator when present.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::assets::{AssetLibrary, Sample};
use super::dsp::{attack_decay, read_interp, seconds, seeded_rng, sine, trapezoid, white, Biquad, Slew};
use super::Voice;
use crate::mapping::{Selection, Stimulus, StimulusParams, BIRDS_BED_LOUDNESS};

/// Droplet resonance sweep at playback rate 1.0.
pub const DROPLET_BAND_HZ: (f64, f64) = (850.0, 1150.0);
pub const BED_BAND_HZ: (f64, f64) = (2000.0, 6000.0);
pub const DUCK_BAND_HZ: (f64, f64) = (300.0, 1500.0);
pub const CROW_BAND_HZ: (f64, f64) = (600.0, 1700.0);
/// Emergent species fade in or out within this time.
pub const BIRD_CROSSFADE_S: f64 = 0.5;
pub const SIZZLE_LENGTH_S: f64 = 2.0;

/// An endless stream of mono samples.
pub trait Source: Send {
    fn next_sample(&mut self) -> f64;
}

struct Looped {
    sample: Arc<Sample>,
    pos: f64,
    step: f64,
}

impl Looped {
    fn new(sample: Arc<Sample>, sample_rate: u32) -> Self {
        let step = sample.sample_rate as f64 / sample_rate as f64;
        Self { sample, pos: 0.0, step }
    }
}

impl Source for Looped {
    fn next_sample(&mut self) -> f64 {
        let len = self.sample.samples.len() as f64;
        let v = read_interp(&self.sample.samples, self.pos);
        self.pos += self.step;
        if self.pos >= len - 1.0 {
            self.pos -= len - 1.0;
        }
        v
    }
}

fn source_or(assets: &AssetLibrary, stimulus: Stimulus, name: &str, sample_rate: u32, fallback: impl FnOnce() -> Box<dyn Source>) -> Box<dyn Source> {
    match assets.get(stimulus, name) {
        Some(s) => Box::new(Looped::new(s, sample_rate)),
        None => fallback(),
    }
}

/// One water drop at rate 1.0: a noise click into a rising resonant sine.
pub fn droplet_sample(seed: u64, sample_rate: u32) -> Vec<f32> {
    let sr = sample_rate as f64;
    let mut rng = seeded_rng(seed, 0xD20B);
    let len = seconds(0.16, sr);
    let sweep = seconds(0.06, sr) as f64;
    let click_len = seconds(0.002, sr);
    let mut click = Biquad::bandpass(1000.0, 4.0, sr);
    let mut phase = 0.0;
    (0..len)
        .map(|i| {
            let frac = (i as f64 / sweep).min(1.0);
            let f = DROPLET_BAND_HZ.0 + (DROPLET_BAND_HZ.1 - DROPLET_BAND_HZ.0) * frac;
            phase = (phase + f / sr).fract();
            let tone = attack_decay(i, seconds(0.002, sr).max(1), 0.03 * sr) * sine(phase);
            let noise = if i < click_len { white(&mut rng) } else { 0.0 };
            (0.85 * tone + 0.5 * click.process(noise)) as f32
        })
        .collect()
}

struct Play {
    pos: f64,
    step: f64,
    amp: f64,
}

/// Drop occurrences spaced by `interval_s`, each resampled by `playback_rate`.
pub struct DropletsVoice {
    sr: f64,
    sample: Arc<Sample>,
    params: Option<StimulusParams>,
    until_next: usize,
    plays: Vec<Play>,
}

impl DropletsVoice {
    pub fn new(seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Self {
        let sample = assets.get(Stimulus::Droplets, "default").unwrap_or_else(|| {
            Arc::new(Sample {
                sample_rate,
                samples: droplet_sample(seed, sample_rate),
            })
        });
        Self {
            sr: sample_rate as f64,
            sample,
            params: None,
            until_next: 0,
            plays: Vec::new(),
        }
    }
}

impl Voice for DropletsVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        self.params = Some(*p);
    }

    fn render(&mut self, out: &mut [f32]) {
        let base_step = self.sample.sample_rate as f64 / self.sr;
        let len = self.sample.samples.len() as f64;
        for s in out.iter_mut() {
            if let Some(p) = &self.params {
                if self.until_next == 0 {
                    self.plays.push(Play {
                        pos: 0.0,
                        step: base_step * p.playback_rate.unwrap_or(1.0),
                        amp: p.loudness,
                    });
                    self.until_next = seconds(p.interval_s.unwrap_or(1.5), self.sr).max(1);
                }
                self.until_next -= 1;
            }
            let mut acc = 0.0;
            for play in &mut self.plays {
                acc += play.amp * read_interp(&self.sample.samples, play.pos);
                play.pos += play.step;
            }
            self.plays.retain(|p| p.pos < len - 1.0);
            *s = acc as f32;
        }
    }
}

/// Overlapping short chirps, so the stream never falls silent.
struct Song {
    rng: ChaCha8Rng,
    sr: f64,
    band: (f64, f64),
    chirps: Vec<Chirp>,
    until_next: usize,
}

struct Chirp {
    f0: f64,
    f1: f64,
    len: usize,
    age: usize,
    phase: f64,
    amp: f64,
}

impl Song {
    fn new(rng: ChaCha8Rng, sample_rate: u32, band: (f64, f64)) -> Self {
        Self {
            rng,
            sr: sample_rate as f64,
            band,
            chirps: Vec::new(),
            until_next: 0,
        }
    }
}

impl Source for Song {
    fn next_sample(&mut self) -> f64 {
        if self.until_next == 0 {
            let len = seconds(self.rng.gen_range(0.06..0.18), self.sr);
            let (lo, hi) = self.band;
            self.chirps.push(Chirp {
                f0: self.rng.gen_range(lo..hi),
                f1: self.rng.gen_range(lo..hi),
                len,
                age: 0,
                phase: 0.0,
                amp: self.rng.gen_range(0.5..1.0),
            });
            self.until_next = (len as f64 * self.rng.gen_range(0.5..0.8)) as usize;
        }
        self.until_next -= 1;
        let attack = seconds(0.008, self.sr);
        let release = seconds(0.015, self.sr);
        let mut acc = 0.0;
        for c in &mut self.chirps {
            let frac = c.age as f64 / c.len as f64;
            let f = c.f0 + (c.f1 - c.f0) * frac;
            acc += c.amp * trapezoid(c.age, c.len, attack, release) * sine(c.phase);
            c.phase = (c.phase + f / self.sr).fract();
            c.age += 1;
        }
        self.chirps.retain(|c| c.age < c.len);
        acc
    }
}

struct MiscBed(Vec<Song>);

impl Source for MiscBed {
    fn next_sample(&mut self) -> f64 {
        self.0.iter_mut().map(Song::next_sample).sum::<f64>() / 2.0
    }
}

/// Groups of harmonic calls with amplitude roughness: quacks or caws.
struct Calls {
    rng: ChaCha8Rng,
    sr: f64,
    kind: CallKind,
    until_next: usize,
    left_in_group: u32,
    call: Option<Call>,
    noise_filter: Biquad,
}

#[derive(Clone, Copy)]
enum CallKind {
    Duck,
    Crow,
}

struct Call {
    f0: f64,
    len: usize,
    age: usize,
    phase: f64,
}

impl Calls {
    fn new(rng: ChaCha8Rng, sample_rate: u32, kind: CallKind) -> Self {
        let sr = sample_rate as f64;
        Self {
            rng,
            sr,
            kind,
            until_next: 0,
            left_in_group: 0,
            call: None,
            noise_filter: Biquad::bandpass(1100.0, 1.5, sr),
        }
    }

    fn harmonics(&self) -> (f64, std::ops::Range<f64>, f64) {
        match self.kind {
            // (formant center, band, roughness rate)
            CallKind::Duck => (900.0, DUCK_BAND_HZ.0..DUCK_BAND_HZ.1, 38.0),
            CallKind::Crow => (1100.0, CROW_BAND_HZ.0..CROW_BAND_HZ.1, 55.0),
        }
    }
}

impl Source for Calls {
    fn next_sample(&mut self) -> f64 {
        if self.until_next == 0 {
            let (len_s, f0, gap) = match self.kind {
                CallKind::Duck => (self.rng.gen_range(0.12..0.2), self.rng.gen_range(290.0..340.0), 0.22..0.28),
                CallKind::Crow => (self.rng.gen_range(0.25..0.4), self.rng.gen_range(600.0..660.0), 0.42..0.52),
            };
            if self.left_in_group == 0 {
                self.left_in_group = match self.kind {
                    CallKind::Duck => self.rng.gen_range(2..=5),
                    CallKind::Crow => self.rng.gen_range(2..=4),
                };
            }
            self.left_in_group -= 1;
            let len = seconds(len_s, self.sr);
            self.call = Some(Call { f0, len, age: 0, phase: 0.0 });
            let pause = if self.left_in_group == 0 {
                self.rng.gen_range(0.4..0.9)
            } else {
                self.rng.gen_range(gap)
            };
            self.until_next = len.max(seconds(pause, self.sr)) + seconds(0.02, self.sr);
        }
        self.until_next -= 1;
        let noise = white(&mut self.rng);
        let filtered = self.noise_filter.process(noise);
        let (formant, band, rough) = self.harmonics();
        let sr = self.sr;
        let kind = self.kind;
        let Some(call) = self.call.as_mut() else { return 0.0 };
        if call.age >= call.len {
            return 0.0;
        }
        let t = call.age as f64 / sr;
        // Caws droop in pitch.
        let droop = match kind {
            CallKind::Duck => 1.0,
            CallKind::Crow => 1.0 - 0.1 * call.age as f64 / call.len as f64,
        };
        let f = call.f0 * droop;
        let mut tone = 0.0;
        let mut k = 1.0;
        while k * f < band.end {
            if k * f >= band.start {
                let w = (-((k * f - formant) / 500.0).powi(2)).exp();
                tone += w * sine(call.phase * k);
            }
            k += 1.0;
        }
        let rasp = 0.6 + 0.4 * sine(rough * t);
        let env = trapezoid(call.age, call.len, seconds(0.015, sr), seconds(0.05, sr));
        let body = match kind {
            CallKind::Duck => tone,
            CallKind::Crow => 0.7 * tone + 0.6 * filtered,
        };
        call.phase = (call.phase + f / sr).fract();
        call.age += 1;
        env * rasp * body
    }
}

/// Birdsong bed with duck or crow calls cross-faded over it.
pub struct BirdsVoice {
    bed: Box<dyn Source>,
    ducks: Box<dyn Source>,
    crows: Box<dyn Source>,
    duck_gain: Slew,
    crow_gain: Slew,
    started: bool,
}

impl BirdsVoice {
    pub fn new(seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Self {
        let sr = sample_rate as f64;
        let bed = source_or(assets, Stimulus::Birds, "misc", sample_rate, || {
            Box::new(MiscBed(
                (0..3)
                    .map(|k| Song::new(seeded_rng(seed, 0xB1D0 + k), sample_rate, BED_BAND_HZ))
                    .collect(),
            ))
        });
        let ducks = source_or(assets, Stimulus::Birds, "ducks", sample_rate, || {
            Box::new(Calls::new(seeded_rng(seed, 0xD0C), sample_rate, CallKind::Duck))
        });
        let crows = source_or(assets, Stimulus::Birds, "crows", sample_rate, || {
            Box::new(Calls::new(seeded_rng(seed, 0xC20), sample_rate, CallKind::Crow))
        });
        Self {
            bed,
            ducks,
            crows,
            duck_gain: Slew::new(BIRD_CROSSFADE_S, sr),
            crow_gain: Slew::new(BIRD_CROSSFADE_S, sr),
            started: false,
        }
    }
}

impl Voice for BirdsVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        let (d, c) = match p.selection {
            Some(Selection::Ducks) => (p.loudness, 0.0),
            Some(Selection::Crows) => (0.0, p.loudness),
            _ => (0.0, 0.0),
        };
        if self.started {
            self.duck_gain.set_target(d);
            self.crow_gain.set_target(c);
        } else {
            self.started = true;
            self.duck_gain.reset(d);
            self.crow_gain.reset(c);
        }
    }

    fn render(&mut self, out: &mut [f32]) {
        for s in out.iter_mut() {
            let bed = BIRDS_BED_LOUDNESS * self.bed.next_sample();
            let d = self.duck_gain.next() * self.ducks.next_sample();
            let c = self.crow_gain.next() * self.crows.next_sample();
            *s = (bed + d + c) as f32;
        }
    }
}

/// Cloud of short rising bubbles over a low rumble.
struct Boiling {
    rng: ChaCha8Rng,
    sr: f64,
    bubbles: Vec<(f64, usize, usize, f64, f64)>,
    rumble: Biquad,
}

impl Boiling {
    fn new(rng: ChaCha8Rng, sample_rate: u32) -> Self {
        let sr = sample_rate as f64;
        Self {
            rng,
            sr,
            bubbles: Vec::new(),
            rumble: Biquad::lowpass(250.0, 0.7, sr),
        }
    }
}

impl Source for Boiling {
    fn next_sample(&mut self) -> f64 {
        const RATE: f64 = 90.0;
        if self.rng.gen::<f64>() < RATE / self.sr {
            let f0 = self.rng.gen_range(350.0..1400.0);
            let len = seconds(self.rng.gen_range(0.008..0.03), self.sr);
            let amp = self.rng.gen_range(0.2..1.0);
            self.bubbles.push((f0, len, 0, 0.0, amp));
        }
        let noise = white(&mut self.rng);
        let mut acc = 0.4 * self.rumble.process(noise);
        let sr = self.sr;
        for (f0, len, age, phase, amp) in &mut self.bubbles {
            let frac = *age as f64 / *len as f64;
            let env = attack_decay(*age, seconds(0.001, sr).max(1), *len as f64 / 3.0);
            acc += *amp * env * sine(*phase);
            *phase = (*phase + *f0 * (1.0 + 0.8 * frac) / sr).fract();
            *age += 1;
        }
        self.bubbles.retain(|b| b.2 < b.1);
        acc * 0.8
    }
}

/// Sparse broadband ice crackles.
struct Crackling {
    rng: ChaCha8Rng,
    sr: f64,
    pops: Vec<(usize, usize, f64)>,
    bright: Biquad,
}

impl Crackling {
    fn new(rng: ChaCha8Rng, sample_rate: u32) -> Self {
        let sr = sample_rate as f64;
        Self {
            rng,
            sr,
            pops: Vec::new(),
            bright: Biquad::highpass(700.0, 0.7, sr),
        }
    }
}

impl Source for Crackling {
    fn next_sample(&mut self) -> f64 {
        const RATE: f64 = 35.0;
        if self.rng.gen::<f64>() < RATE / self.sr {
            let len = seconds(self.rng.gen_range(0.001..0.006), self.sr).max(2);
            let u: f64 = self.rng.gen();
            self.pops.push((len, 0, 0.2 + 0.8 * u * u * u));
        }
        let noise = white(&mut self.rng);
        let mut acc = 0.0;
        for (len, age, amp) in &mut self.pops {
            acc += *amp * attack_decay(*age, 1, *len as f64 / 2.5) * noise;
            *age += 1;
        }
        self.pops.retain(|p| p.1 < p.0 * 6);
        1.6 * self.bright.process(acc)
    }
}

/// Water: silent, crackling or boiling at a tier loudness.
pub struct WaterVoice {
    boiling: Box<dyn Source>,
    crackling: Box<dyn Source>,
    boil_gain: Slew,
    crackle_gain: Slew,
    started: bool,
}

impl WaterVoice {
    pub fn new(seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Self {
        let sr = sample_rate as f64;
        Self {
            boiling: source_or(assets, Stimulus::Water, "boiling", sample_rate, || {
                Box::new(Boiling::new(seeded_rng(seed, 0xB011), sample_rate))
            }),
            crackling: source_or(assets, Stimulus::Water, "crackling", sample_rate, || {
                Box::new(Crackling::new(seeded_rng(seed, 0xC2AC), sample_rate))
            }),
            boil_gain: Slew::new(0.05, sr),
            crackle_gain: Slew::new(0.05, sr),
            started: false,
        }
    }
}

impl Voice for WaterVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        let (b, c) = match p.selection {
            Some(Selection::Boiling) => (p.loudness, 0.0),
            Some(Selection::Crackling) => (0.0, p.loudness),
            _ => (0.0, 0.0),
        };
        if self.started {
            self.boil_gain.set_target(b);
            self.crackle_gain.set_target(c);
        } else {
            self.started = true;
            self.boil_gain.reset(b);
            self.crackle_gain.reset(c);
        }
    }

    fn render(&mut self, out: &mut [f32]) {
        for s in out.iter_mut() {
            let b = self.boil_gain.next() * self.boiling.next_sample();
            let c = self.crackle_gain.next() * self.crackling.next_sample();
            *s = (b + c) as f32;
        }
    }
}

/// Violent evaporation burst: high-passed noise, fast attack, quick decay.
pub fn sizzle_burst(seed: u64, sample_rate: u32) -> Vec<f32> {
    let sr = sample_rate as f64;
    let mut rng = seeded_rng(seed, 0x5122);
    let mut hp = Biquad::highpass(3000.0, 0.7, sr);
    let mut flutter = Biquad::lowpass(30.0, 0.7, sr);
    let attack = seconds(0.005, sr).max(1);
    (0..seconds(SIZZLE_LENGTH_S, sr))
        .map(|i| {
            let n = white(&mut rng);
            let f = 1.0 + 4.0 * flutter.process(white(&mut rng));
            (2.0 * hp.process(n) * attack_decay(i, attack, 0.45 * sr) * f.clamp(0.3, 1.7)) as f32
        })
        .collect()
}

/// Recorded sizzle if available, else the procedural burst.
pub fn sizzle_sample(seed: u64, sample_rate: u32, assets: &AssetLibrary) -> Vec<f32> {
    match assets.get(Stimulus::Sizzle, "default") {
        Some(s) => {
            let step = s.sample_rate as f64 / sample_rate as f64;
            let n = (s.samples.len() as f64 / step) as usize;
            (0..n).map(|i| read_interp(&s.samples, i as f64 * step) as f32).collect()
        }
        None => sizzle_burst(seed, sample_rate),
    }
}
