//! Synthetic stimuli: Arpeggio, Drone, Jingle and Bell.

use rand::Rng;

use super::dsp::{attack_decay, poly_blep, seconds, seeded_rng, sine, trapezoid, Biquad, Slew};
use super::Voice;
use crate::mapping::StimulusParams;

/// Major-triad motive: tonic, third, fifth.
pub const MOTIVE_SEMITONES: [f64; 3] = [0.0, 4.0, 7.0];
pub const ARPEGGIO_ATTACK_S: f64 = 0.010;
pub const ARPEGGIO_DECAY_S: f64 = 0.4;
pub const DRONE_Q: f64 = 2.0;
pub const DRONE_GLIDE_S: f64 = 0.1;
pub const GRAIN_LENGTH_S: f64 = 0.06;
pub const BELL_MAIN_HZ: f64 = 440.0;
pub const BELL_PARTIAL_RANGE: (f64, f64) = (220.0, 880.0);
pub const BELL_LENGTH_S: f64 = 3.0;

/// Piano-ish partial weights of an arpeggio note.
const NOTE_HARMONICS: [f64; 3] = [1.0, 0.35, 0.12];

struct Note {
    freq: f64,
    amp: f64,
    phase: f64,
    age: usize,
}

/// Looping three-note motive; any parameter change restarts the motive.
pub struct ArpeggioVoice {
    sr: f64,
    params: Option<StimulusParams>,
    step: usize,
    until_next: usize,
    notes: Vec<Note>,
    attack: usize,
    tau: f64,
}

impl ArpeggioVoice {
    pub fn new(sample_rate: u32) -> Self {
        let sr = sample_rate as f64;
        Self {
            sr,
            params: None,
            step: 0,
            until_next: 0,
            notes: Vec::new(),
            attack: seconds(ARPEGGIO_ATTACK_S, sr).max(1),
            tau: ARPEGGIO_DECAY_S * sr,
        }
    }
}

impl Voice for ArpeggioVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        if self.params.map_or(true, |old| !old.approx_eq(p)) {
            self.params = Some(*p);
            self.step = 0;
            self.until_next = 0;
        }
    }

    fn render(&mut self, out: &mut [f32]) {
        let norm = 1.0 / NOTE_HARMONICS.iter().sum::<f64>();
        let max_age = (self.tau * 10.0) as usize + self.attack;
        for s in out.iter_mut() {
            if let Some(p) = &self.params {
                if self.until_next == 0 {
                    let tonic = p.pitch_hz.unwrap_or(crate::mapping::C5_HZ);
                    let semis = MOTIVE_SEMITONES[self.step % MOTIVE_SEMITONES.len()];
                    self.notes.push(Note {
                        freq: tonic * (semis / 12.0).exp2(),
                        amp: p.loudness,
                        phase: 0.0,
                        age: 0,
                    });
                    self.step += 1;
                    self.until_next = seconds(p.interval_s.unwrap_or(1.5), self.sr).max(1);
                }
                self.until_next -= 1;
            }
            let mut acc = 0.0;
            for n in &mut self.notes {
                let env = attack_decay(n.age, self.attack, self.tau);
                let tone: f64 = NOTE_HARMONICS
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * sine(n.phase * (k + 1) as f64))
                    .sum();
                acc += n.amp * env * tone * norm;
                n.phase = (n.phase + n.freq / self.sr).fract();
                n.age += 1;
            }
            self.notes.retain(|n| n.age < max_age);
            *s = acc as f32;
        }
    }
}

/// Band-passed sawtooth with gliding pitch.
pub struct DroneVoice {
    sr: f64,
    started: bool,
    log_freq: Slew,
    gain: Slew,
    phase: f64,
    tuned_to: f64,
    filter: Biquad,
}

/// Roughly unit peak for a band-passed saw at loudness 1.
const DRONE_NORM: f64 = 1.4;

impl DroneVoice {
    pub fn new(sample_rate: u32) -> Self {
        let sr = sample_rate as f64;
        Self {
            sr,
            started: false,
            log_freq: Slew::new(DRONE_GLIDE_S, sr),
            gain: Slew::new(DRONE_GLIDE_S, sr),
            phase: 0.0,
            tuned_to: 0.0,
            filter: Biquad::default(),
        }
    }
}

impl Voice for DroneVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        let lf = p.pitch_hz.unwrap_or(crate::mapping::A3_HZ).ln();
        if self.started {
            self.log_freq.set_target(lf);
            self.gain.set_target(p.loudness);
        } else {
            self.started = true;
            self.log_freq.reset(lf);
            self.gain.reset(p.loudness);
        }
    }

    fn render(&mut self, out: &mut [f32]) {
        if !self.started {
            out.fill(0.0);
            return;
        }
        for s in out.iter_mut() {
            let freq = self.log_freq.next().exp();
            if freq != self.tuned_to {
                self.filter = std::mem::take(&mut self.filter).retuned_bandpass(freq, DRONE_Q, self.sr);
                self.tuned_to = freq;
            }
            let inc = freq / self.sr;
            let saw = 2.0 * self.phase - 1.0 - poly_blep(self.phase, inc);
            self.phase += inc;
            if self.phase >= 1.0 {
                self.phase -= 1.0;
            }
            *s = (self.filter.process(saw) * DRONE_NORM * self.gain.next()) as f32;
        }
    }
}

struct Grain {
    amp: f64,
    age: usize,
}

/// Repeating short sine bursts; silent at zero loudness.
///
/// Grains gate one free-running oscillator instead of restarting a sine,
/// so the spectrum has a line at the carrier rather than only at multiples
/// of the grain rate.
pub struct JingleVoice {
    sr: f64,
    phase: f64,
    params: Option<StimulusParams>,
    until_next: usize,
    grains: Vec<Grain>,
    len: usize,
    attack: usize,
    release: usize,
}

impl JingleVoice {
    pub fn new(sample_rate: u32) -> Self {
        let sr = sample_rate as f64;
        Self {
            sr,
            phase: 0.0,
            params: None,
            until_next: 0,
            grains: Vec::new(),
            len: seconds(GRAIN_LENGTH_S, sr),
            attack: seconds(0.004, sr).max(1),
            release: seconds(0.008, sr).max(1),
        }
    }
}

impl Voice for JingleVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        self.params = Some(*p);
    }

    fn render(&mut self, out: &mut [f32]) {
        for s in out.iter_mut() {
            match &self.params {
                Some(p) if p.loudness > 0.0 => {
                    if self.until_next == 0 {
                        self.grains.push(Grain { amp: p.loudness, age: 0 });
                        self.until_next = seconds(p.interval_s.unwrap_or(0.125), self.sr).max(1);
                    }
                    self.until_next -= 1;
                }
                _ => self.until_next = 0,
            }
            let freq = self
                .params
                .and_then(|p| p.pitch_hz)
                .unwrap_or(crate::mapping::JINGLE_HIGH_HZ);
            let carrier = sine(self.phase);
            self.phase = (self.phase + freq / self.sr).fract();
            let mut acc = 0.0;
            for g in &mut self.grains {
                acc += g.amp * trapezoid(g.age, self.len, self.attack, self.release) * carrier;
                g.age += 1;
            }
            let len = self.len;
            self.grains.retain(|g| g.age < len);
            *s = acc as f32;
        }
    }
}

/// The partials of one bell strike: `(frequency, weight, decay seconds)`.
///
/// The first is always the 440 Hz main frequency; the other three are drawn
/// from the seed in [220, 880] Hz, kept at least 20 Hz apart so each stays
/// a distinct spectral line.
pub fn bell_partials(seed: u64) -> [(f64, f64, f64); 4] {
    let mut rng = seeded_rng(seed, 0xBE11);
    let mut partials = [(BELL_MAIN_HZ, 1.0, 1.6); 4];
    let mut chosen = vec![BELL_MAIN_HZ];
    for slot in partials.iter_mut().skip(1) {
        let f = loop {
            let f: f64 = rng.gen_range(BELL_PARTIAL_RANGE.0..=BELL_PARTIAL_RANGE.1);
            if chosen.iter().all(|c| (c - f).abs() >= 20.0) {
                break f;
            }
        };
        chosen.push(f);
        *slot = (f, rng.gen_range(0.35..0.7), rng.gen_range(0.8..1.4));
    }
    partials
}

/// Renders one bell strike at unit loudness.
pub fn bell_strike(seed: u64, sample_rate: u32) -> Vec<f32> {
    let sr = sample_rate as f64;
    let partials = bell_partials(seed);
    let norm = 1.0 / partials.iter().map(|p| p.1).sum::<f64>();
    let attack = seconds(0.005, sr).max(1);
    (0..seconds(BELL_LENGTH_S, sr))
        .map(|i| {
            let t = i as f64 / sr;
            let v: f64 = partials
                .iter()
                .map(|&(f, w, tau)| w * attack_decay(i, attack, tau * sr) * sine(f * t))
                .sum();
            (v * norm) as f32
        })
        .collect()
}

/// Plays a pre-rendered one-shot each time the alarm triggers.
pub struct OneShotVoice {
    strike: Box<dyn FnMut() -> Vec<f32> + Send>,
    playing: Vec<(Vec<f32>, usize, f64)>,
}

impl OneShotVoice {
    pub fn new(strike: impl FnMut() -> Vec<f32> + Send + 'static) -> Self {
        Self {
            strike: Box::new(strike),
            playing: Vec::new(),
        }
    }
}

impl Voice for OneShotVoice {
    fn set_params(&mut self, p: &StimulusParams) {
        if p.trigger {
            let buf = (self.strike)();
            self.playing.push((buf, 0, p.loudness));
        }
    }

    fn render(&mut self, out: &mut [f32]) {
        out.fill(0.0);
        for (buf, pos, amp) in &mut self.playing {
            for s in out.iter_mut() {
                let Some(v) = buf.get(*pos) else { break };
                *s += (*v as f64 * *amp) as f32;
                *pos += 1;
            }
        }
        self.playing.retain(|(buf, pos, _)| *pos < buf.len());
    }
}
