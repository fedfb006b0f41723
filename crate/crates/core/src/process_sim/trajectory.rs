use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::criteria::{Criterion, CriterionKind, CriterionRegistry, CriterionSpec, PT_THRESHOLD};
use super::level::{AnomalyEvent, Level};
use super::SimError;

pub const DEFAULT_FRAME_RATE: f64 = 10.0;

/// Idle jitter never exceeds this fraction of the tolerance half-width.
pub const IDLE_JITTER_FRACTION: f64 = 0.25;

/// Range of the seeded idle part temperature, °C.
pub const PT_IDLE_RANGE: (f64, f64) = (400.0, 550.0);

/// PT overshoot past the threshold per unit of severity, °C.
pub const PT_OVERSHOOT_PER_SEVERITY: f64 = 25.0;

/// Values of every criterion at one instant of a level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "FrameRecord", into = "FrameRecord")]
pub struct CriterionFrame {
    pub t: f64,
    pub values: [f64; 5],
}

impl CriterionFrame {
    pub fn get(&self, c: Criterion) -> f64 {
        self.values[c.index()]
    }
}

/// Line-delimited log record layout.
#[derive(Serialize, Deserialize)]
struct FrameRecord {
    t: f64,
    wpd_w: f64,
    wpd_h: f64,
    ph: f64,
    wpt: f64,
    pt: f64,
}

impl From<FrameRecord> for CriterionFrame {
    fn from(r: FrameRecord) -> Self {
        Self {
            t: r.t,
            values: [r.wpd_w, r.wpd_h, r.ph, r.wpt, r.pt],
        }
    }
}

impl From<CriterionFrame> for FrameRecord {
    fn from(f: CriterionFrame) -> Self {
        let [wpd_w, wpd_h, ph, wpt, pt] = f.values;
        Self {
            t: f.t,
            wpd_w,
            wpd_h,
            ph,
            wpt,
            pt,
        }
    }
}

pub fn frame_count(duration: f64, frame_rate: f64) -> usize {
    (duration * frame_rate - 1e-9).ceil().max(0.0) as usize
}

/// Generates the criterion time series for a level with the default registry.
pub fn generate_trajectory(level: &Level, frame_rate: f64) -> Result<Vec<CriterionFrame>, SimError> {
    generate_trajectory_with(&CriterionRegistry::default(), level, frame_rate)
}

pub fn generate_trajectory_with(
    registry: &CriterionRegistry,
    level: &Level,
    frame_rate: f64,
) -> Result<Vec<CriterionFrame>, SimError> {
    if !(frame_rate.is_finite() && frame_rate > 0.0) {
        return Err(SimError::InvalidFrameRate(frame_rate));
    }
    level.validate(registry)?;

    let n = frame_count(level.duration, frame_rate);
    let times: Vec<f64> = (0..n).map(|i| i as f64 / frame_rate).collect();
    let mut frames: Vec<CriterionFrame> = times
        .iter()
        .map(|&t| CriterionFrame { t, values: [0.0; 5] })
        .collect();

    for spec in registry.iter() {
        let c = spec.id;
        let mut rng = ChaCha8Rng::seed_from_u64(level.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(c.index() as u64 + 1)));
        let events: Vec<&AnomalyEvent> = level.events.iter().filter(|e| e.criterion == c).collect();
        let series = match spec.kind {
            CriterionKind::Band => band_series(spec, &events, &times, frame_rate, &mut rng),
            CriterionKind::Threshold => pt_series(&events, &times, &mut rng),
        };
        for (frame, v) in frames.iter_mut().zip(series) {
            frame.values[c.index()] = v;
        }
    }
    Ok(frames)
}

/// Bounded AR(1) jitter around zero.
fn idle_jitter(spec: &CriterionSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let bound = IDLE_JITTER_FRACTION * spec.tol_halfwidth;
    let mut j = rng.gen_range(-0.4..=0.4) * bound;
    (0..n)
        .map(|_| {
            j = (0.85 * j + rng.gen_range(-0.2..=0.2) * bound).clamp(-bound, bound);
            j
        })
        .collect()
}

fn lerp(a: f64, b: f64, frac: f64) -> f64 {
    a + (b - a) * frac
}

fn band_series(
    spec: &CriterionSpec,
    events: &[&AnomalyEvent],
    times: &[f64],
    frame_rate: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let jitter = idle_jitter(spec, times.len(), rng);
    let idle_at = |i: usize| spec.nominal + jitter[i];
    let index_at = |t: f64| ((t * frame_rate + 1e-9).floor() as usize).min(times.len().saturating_sub(1));

    times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let Some(e) = events.iter().find(|e| t >= e.onset && t < e.end()) else {
                return idle_at(i);
            };
            let start = idle_at(index_at(e.onset));
            let target = spec.nominal + e.severity * spec.tol_halfwidth;
            let since = t - e.onset;
            if since < e.ramp {
                lerp(start, target, since / e.ramp)
            } else if since < e.ramp + e.hold {
                target
            } else {
                let back = (since - e.ramp - e.hold) / e.ramp;
                lerp(target, idle_at(i), back.min(1.0))
            }
        })
        .collect()
}

fn pt_series(events: &[&AnomalyEvent], times: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let idle = rng.gen_range(PT_IDLE_RANGE.0..=PT_IDLE_RANGE.1);
    let rise = |e: &AnomalyEvent, since: f64| {
        let peak = PT_THRESHOLD + e.severity * PT_OVERSHOOT_PER_SEVERITY;
        if e.ramp == 0.0 {
            peak
        } else {
            let slope = (PT_THRESHOLD - idle) / e.ramp;
            (idle + slope * since).min(peak)
        }
    };
    times
        .iter()
        .map(|&t| {
            let Some(e) = events.iter().find(|e| t >= e.onset && t < e.end()) else {
                return idle;
            };
            let since = t - e.onset;
            if since < e.ramp + e.hold {
                rise(e, since)
            } else {
                let top = rise(e, e.ramp + e.hold);
                let back = if e.ramp == 0.0 { 1.0 } else { (since - e.ramp - e.hold) / e.ramp };
                lerp(top, idle, back.min(1.0))
            }
        })
        .collect()
}

/// First frame time at which each anomalous criterion leaves tolerance.
///
/// Only criteria that carry an event in `level` are reported.
pub fn tolerance_onset_times(level: &Level, frames: &[CriterionFrame]) -> BTreeMap<Criterion, f64> {
    tolerance_onset_times_with(&CriterionRegistry::default(), level, frames)
}

pub fn tolerance_onset_times_with(
    registry: &CriterionRegistry,
    level: &Level,
    frames: &[CriterionFrame],
) -> BTreeMap<Criterion, f64> {
    let mut onsets = BTreeMap::new();
    for c in Criterion::ALL {
        if !level.has_event_on(c) {
            continue;
        }
        let spec = registry.get(c);
        if let Some(f) = frames.iter().find(|f| spec.out_of_tolerance(f.get(c))) {
            onsets.insert(c, f.t);
        }
    }
    onsets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn height_level() -> Level {
        Level::idle("h", 7).with_event(AnomalyEvent::new(Criterion::WpdHeight, 5.0, 2.0, 3.0))
    }

    /// Piecewise-linear interpolation through explicit knots.
    fn interp(knots: &[(f64, f64)], t: f64) -> f64 {
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t >= t0 && t <= t1 {
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        knots.last().unwrap().1
    }

    #[test]
    fn idle_level_stays_in_tolerance() {
        let reg = CriterionRegistry::default();
        let frames = generate_trajectory(&Level::idle("idle", 3), 10.0).unwrap();
        assert_eq!(frames.len(), 300);
        for f in &frames {
            for spec in reg.iter() {
                assert!(!spec.out_of_tolerance(f.get(spec.id)), "{:?} at {}", spec.id, f.t);
                if spec.kind == CriterionKind::Band {
                    assert!((f.get(spec.id) - spec.nominal).abs() <= 0.25 * spec.tol_halfwidth + 1e-12);
                }
            }
            let pt = f.get(Criterion::Pt);
            assert!((400.0..=550.0).contains(&pt));
        }
        assert!(frames.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn height_ramp_reaches_target() {
        let frames = generate_trajectory(&height_level(), 10.0).unwrap();
        let at7 = frames.iter().find(|f| (f.t - 7.0).abs() < 1e-9).unwrap();
        assert!((at7.get(Criterion::WpdHeight) - 3.9).abs() < 1e-12);

        // Ramp values against an independent knot interpolation from the pre-onset value.
        let start = frames[50].get(Criterion::WpdHeight);
        let knots = [(5.0, start), (7.0, 3.9), (30.0, 3.9)];
        for f in frames.iter().filter(|f| f.t >= 5.0) {
            let expected = interp(&knots, f.t);
            assert!((f.get(Criterion::WpdHeight) - expected).abs() < 1e-9, "t={}", f.t);
        }
    }

    #[test]
    fn height_onset_is_band_crossing() {
        let level = height_level();
        let frames = generate_trajectory(&level, 10.0).unwrap();
        let onsets = tolerance_onset_times(&level, &frames);
        let onset = onsets[&Criterion::WpdHeight];
        // Leaves +0.3 mm one third into a 2 s ramp towards +0.9 mm.
        let analytic = 5.0 + 2.0 / 3.0;
        assert!((onset - analytic).abs() <= 0.1 + 1e-9, "onset {onset}");
        assert!(onset >= 5.0 && onset <= 7.0);
        assert_eq!(onsets.len(), 1);
    }

    #[test]
    fn pt_crosses_at_end_of_ramp() {
        let level = Level::idle("pt", 11).with_event(AnomalyEvent::new(Criterion::Pt, 10.0, 1.0, 2.0));
        let frames = generate_trajectory(&level, 10.0).unwrap();
        let first = frames.iter().find(|f| f.get(Criterion::Pt) >= 600.0).unwrap();
        assert!(first.t >= 11.0 - 1e-9 && first.t <= 11.1 + 1e-9, "t={}", first.t);
        let onset = tolerance_onset_times(&level, &frames)[&Criterion::Pt];
        assert!(onset >= 10.0 && onset <= 11.1 + 1e-9);
        // Rises monotonically to the overshoot and stays there.
        let tail: Vec<f64> = frames.iter().filter(|f| f.t >= 10.0).map(|f| f.get(Criterion::Pt)).collect();
        assert!(tail.windows(2).all(|w| w[1] >= w[0]));
        assert!((tail.last().unwrap() - 650.0).abs() < 1e-9);
    }

    #[test]
    fn finite_hold_returns_to_band() {
        let level = Level::idle("back", 5)
            .with_event(AnomalyEvent::new(Criterion::Wpt, 2.0, 1.0, -2.0).with_hold(3.0));
        let frames = generate_trajectory(&level, 10.0).unwrap();
        let spec = *CriterionRegistry::default().get(Criterion::Wpt);
        let at = |t: f64| frames.iter().find(|f| (f.t - t).abs() < 1e-9).unwrap().get(Criterion::Wpt);
        assert!((at(4.5) - 1600.0).abs() < 1e-9);
        for f in frames.iter().filter(|f| f.t >= 7.0) {
            assert!(!spec.out_of_tolerance(f.get(Criterion::Wpt)));
        }
    }

    #[test]
    fn idle_level_has_no_onsets() {
        let level = Level::idle("idle", 2);
        let frames = generate_trajectory(&level, 10.0).unwrap();
        assert!(tolerance_onset_times(&level, &frames).is_empty());
    }

    #[test]
    fn bad_frame_rate_is_rejected() {
        assert!(matches!(
            generate_trajectory(&Level::idle("x", 1), 0.0),
            Err(SimError::InvalidFrameRate(_))
        ));
    }

    #[test]
    fn frame_record_layout() {
        let f = CriterionFrame {
            t: 0.5,
            values: [4.0, 3.0, 30.0, 2000.0, 500.0],
        };
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"t":0.5,"wpd_w":4.0,"wpd_h":3.0,"ph":30.0,"wpt":2000.0,"pt":500.0}"#);
    }
}
