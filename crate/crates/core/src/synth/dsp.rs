//! Small DSP building blocks shared by the voices.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct-form I biquad with RBJ cookbook coefficients.
#[derive(Debug, Clone, Default)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl Biquad {
    fn with_coeffs(mut self, b: [f64; 3], a: [f64; 3]) -> Self {
        self.b0 = b[0] / a[0];
        self.b1 = b[1] / a[0];
        self.b2 = b[2] / a[0];
        self.a1 = a[1] / a[0];
        self.a2 = a[2] / a[0];
        self
    }

    fn omega(freq: f64, sample_rate: f64) -> (f64, f64) {
        let w = TAU * (freq / sample_rate).min(0.49);
        (w.cos(), w.sin())
    }

    /// Band-pass with 0 dB gain at the center frequency.
    pub fn bandpass(freq: f64, q: f64, sample_rate: f64) -> Self {
        Self::default().retuned_bandpass(freq, q, sample_rate)
    }

    /// Recomputes band-pass coefficients while keeping the filter state.
    pub fn retuned_bandpass(self, freq: f64, q: f64, sample_rate: f64) -> Self {
        let (cos, sin) = Self::omega(freq, sample_rate);
        let alpha = sin / (2.0 * q);
        self.with_coeffs([alpha, 0.0, -alpha], [1.0 + alpha, -2.0 * cos, 1.0 - alpha])
    }

    pub fn highpass(freq: f64, q: f64, sample_rate: f64) -> Self {
        let (cos, sin) = Self::omega(freq, sample_rate);
        let alpha = sin / (2.0 * q);
        Self::default().with_coeffs(
            [(1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0],
            [1.0 + alpha, -2.0 * cos, 1.0 - alpha],
        )
    }

    pub fn lowpass(freq: f64, q: f64, sample_rate: f64) -> Self {
        let (cos, sin) = Self::omega(freq, sample_rate);
        let alpha = sin / (2.0 * q);
        Self::default().with_coeffs(
            [(1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0],
            [1.0 + alpha, -2.0 * cos, 1.0 - alpha],
        )
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.b1 * self.x1 + self.b2 * self.x2 - self.a1 * self.y1 - self.a2 * self.y2;
        self.x2 = self.x1;
        self.x1 = x;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Linear ramp towards a target over a fixed time.
#[derive(Debug, Clone)]
pub struct Slew {
    value: f64,
    target: f64,
    step: f64,
    ramp_samples: f64,
}

impl Slew {
    pub fn new(ramp_seconds: f64, sample_rate: f64) -> Self {
        Self {
            value: 0.0,
            target: 0.0,
            step: 0.0,
            ramp_samples: (ramp_seconds * sample_rate).max(1.0),
        }
    }

    /// Jumps straight to `v`.
    pub fn reset(&mut self, v: f64) {
        self.value = v;
        self.target = v;
        self.step = 0.0;
    }

    pub fn set_target(&mut self, v: f64) {
        if v != self.target {
            self.target = v;
            self.step = (v - self.value) / self.ramp_samples;
        }
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    #[inline]
    pub fn next(&mut self) -> f64 {
        if self.value != self.target {
            let next = self.value + self.step;
            let overshoot = (self.step > 0.0 && next >= self.target) || (self.step < 0.0 && next <= self.target);
            self.value = if overshoot || self.step == 0.0 { self.target } else { next };
        }
        self.value
    }
}

/// Attack/hold/release envelope over a fixed length, in samples.
#[inline]
pub fn trapezoid(age: usize, len: usize, attack: usize, release: usize) -> f64 {
    if age >= len {
        0.0
    } else if age < attack {
        (age as f64 + 1.0) / attack as f64
    } else if age + release > len {
        (len - age) as f64 / release as f64
    } else {
        1.0
    }
}

/// Linear attack followed by exponential decay.
#[inline]
pub fn attack_decay(age: usize, attack: usize, tau_samples: f64) -> f64 {
    if age < attack {
        (age as f64 + 1.0) / attack as f64
    } else {
        (-((age - attack) as f64) / tau_samples).exp()
    }
}

/// PolyBLEP correction for a naive sawtooth.
#[inline]
pub fn poly_blep(phase: f64, inc: f64) -> f64 {
    if phase < inc {
        let t = phase / inc;
        t + t - t * t - 1.0
    } else if phase > 1.0 - inc {
        let t = (phase - 1.0) / inc;
        t * t + t + t + 1.0
    } else {
        0.0
    }
}

pub fn seeded_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[inline]
pub fn white(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

#[inline]
pub fn sine(phase: f64) -> f64 {
    (TAU * phase).sin()
}

pub fn seconds(s: f64, sample_rate: f64) -> usize {
    (s * sample_rate).round() as usize
}

/// Soft limiter: identity up to 0.8, smooth saturation towards ±1 above.
#[inline]
pub fn soft_clip(x: f64) -> f64 {
    const KNEE: f64 = 0.8;
    let a = x.abs();
    if a <= KNEE {
        x
    } else {
        x.signum() * (KNEE + (1.0 - KNEE) * ((a - KNEE) / (1.0 - KNEE)).tanh())
    }
}

/// Linear-interpolated read of a sample buffer at fractional position.
#[inline]
pub fn read_interp(buf: &[f32], pos: f64) -> f64 {
    let i = pos.floor() as usize;
    if i + 1 >= buf.len() {
        return buf.get(i).copied().unwrap_or(0.0) as f64;
    }
    let frac = pos - i as f64;
    buf[i] as f64 * (1.0 - frac) + buf[i + 1] as f64 * frac
}
