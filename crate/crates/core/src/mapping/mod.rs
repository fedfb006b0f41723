//! Criterion values to per-stimulus sound parameters, one rule per stimulus.
//!
//! Continuous parameters are linear in the *excess* of a normalized
//! deviation: zero anywhere inside the tolerance band, one at `ND_MAX`
//! half-widths and beyond. Jingle and Water use three discrete tiers instead.

mod ecology;
mod params;

use std::io::Write;

use serde::Serialize;

pub use ecology::{Ecology, Stimulus, UnknownEcology};
pub use params::{Selection, StimulusParams};

use crate::process_sim::{Criterion, CriterionFrame, CriterionRegistry, PT_THRESHOLD};

/// Normalized deviation treated as the "worst" case.
pub const ND_MAX: f64 = 3.0;

/// Arpeggio tonic in the idle state (C5).
pub const C5_HZ: f64 = 523.251_130_601_197_3;
/// C5 to F6.
pub const ARPEGGIO_MAX_SHIFT_SEMITONES: f64 = 17.0;
/// Drone pitch in the idle state (A3).
pub const A3_HZ: f64 = 220.0;
/// "± 3 tones" read as whole tones.
pub const DRONE_MAX_SHIFT_SEMITONES: f64 = 6.0;
pub const JINGLE_LOW_HZ: f64 = 220.0;
pub const JINGLE_HIGH_HZ: f64 = 880.0;
pub const JINGLE_GRAIN_RATE: f64 = 8.0;
/// |nd| above which Jingle and Water move to their loud tier.
pub const TIER_BREAK: f64 = 2.0;
/// Fixed level of the miscellaneous birdsong bed.
pub const BIRDS_BED_LOUDNESS: f64 = 0.15;
/// Level of a one-shot PT alarm.
pub const ALARM_LOUDNESS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedDeviation {
    pub nd: f64,
    pub excess: f64,
}

impl NormalizedDeviation {
    pub fn new(nd: f64) -> Self {
        let excess = ((nd.abs() - 1.0) / (ND_MAX - 1.0)).clamp(0.0, 1.0);
        Self { nd, excess }
    }

    pub fn of(registry: &CriterionRegistry, c: Criterion, value: f64) -> Self {
        Self::new(registry.get(c).normalized(value))
    }

    fn sign(&self) -> f64 {
        if self.excess == 0.0 {
            0.0
        } else {
            self.nd.signum()
        }
    }
}

fn semitones(base: f64, shift: f64) -> f64 {
    base * (shift / 12.0).exp2()
}

pub fn map_arpeggio(nd_h: NormalizedDeviation, nd_w: NormalizedDeviation) -> StimulusParams {
    StimulusParams {
        pitch_hz: Some(semitones(C5_HZ, ARPEGGIO_MAX_SHIFT_SEMITONES * nd_h.excess)),
        interval_s: Some(1.5 - 1.0 * nd_w.excess),
        ..StimulusParams::bare(Stimulus::Arpeggio, 0.02 + 0.18 * nd_h.excess.max(nd_w.excess))
    }
}

pub fn map_drone(nd: NormalizedDeviation) -> StimulusParams {
    let shift = DRONE_MAX_SHIFT_SEMITONES * nd.sign() * nd.excess;
    StimulusParams {
        pitch_hz: Some(semitones(A3_HZ, shift)),
        ..StimulusParams::bare(Stimulus::Drone, 0.1 + 0.3 * nd.excess)
    }
}

pub fn map_droplets(nd_h: NormalizedDeviation, nd_w: NormalizedDeviation) -> StimulusParams {
    let rate = (nd_h.sign() * nd_h.excess).exp2().clamp(0.5, 2.0);
    StimulusParams {
        interval_s: Some(1.5 - 1.0 * nd_w.excess),
        playback_rate: Some(rate),
        ..StimulusParams::bare(Stimulus::Droplets, 0.1 + 0.7 * nd_h.excess.max(nd_w.excess))
    }
}

/// `loudness` is the emergent species layer; the bed stays at [`BIRDS_BED_LOUDNESS`].
pub fn map_birds(nd: NormalizedDeviation) -> StimulusParams {
    let selection = if nd.excess == 0.0 {
        Selection::Misc
    } else if nd.nd > 0.0 {
        Selection::Ducks
    } else {
        Selection::Crows
    };
    StimulusParams {
        selection: Some(selection),
        ..StimulusParams::bare(Stimulus::Birds, 0.3 * nd.excess)
    }
}

/// Index of the loudness tier: 0 in tolerance, 1 up to `TIER_BREAK`, 2 beyond.
fn tier(nd: NormalizedDeviation) -> usize {
    let a = nd.nd.abs();
    if a <= 1.0 {
        0
    } else if a <= TIER_BREAK {
        1
    } else {
        2
    }
}

pub fn map_jingle(nd: NormalizedDeviation) -> StimulusParams {
    // In tolerance the jingle is silent and keeps the idle pitch.
    let pitch = if nd.sign() < 0.0 { JINGLE_LOW_HZ } else { JINGLE_HIGH_HZ };
    StimulusParams {
        pitch_hz: Some(pitch),
        interval_s: Some(1.0 / JINGLE_GRAIN_RATE),
        ..StimulusParams::bare(Stimulus::Jingle, [0.0, 0.1, 0.2][tier(nd)])
    }
}

pub fn map_water(nd: NormalizedDeviation) -> StimulusParams {
    let t = tier(nd);
    let selection = match t {
        0 => Selection::Silent,
        _ if nd.nd < 0.0 => Selection::Crackling,
        _ => Selection::Boiling,
    };
    StimulusParams {
        selection: Some(selection),
        ..StimulusParams::bare(Stimulus::Water, [0.0, 0.2, 0.5][t])
    }
}

/// One-shot alarm for Bell or Sizzle: fires on the upward threshold crossing.
pub fn map_pt_alarm(stimulus: Stimulus, pt_value: f64, prev_value: f64, already_fired: bool) -> StimulusParams {
    debug_assert!(matches!(stimulus, Stimulus::Bell | Stimulus::Sizzle));
    let trigger = prev_value < PT_THRESHOLD && PT_THRESHOLD <= pt_value && !already_fired;
    StimulusParams {
        trigger,
        ..StimulusParams::bare(stimulus, ALARM_LOUDNESS)
    }
}

/// Per-level state needed by the PT alarm rule.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AlarmState {
    pub prev_pt: Option<f64>,
    pub fired: bool,
}

/// Maps one frame to the four stimuli of an ecology, in group order.
pub fn map_frame(frame: &CriterionFrame, ecology: Ecology, state: &mut AlarmState) -> [StimulusParams; 4] {
    map_frame_with(&CriterionRegistry::default(), frame, ecology, state)
}

pub fn map_frame_with(
    registry: &CriterionRegistry,
    frame: &CriterionFrame,
    ecology: Ecology,
    state: &mut AlarmState,
) -> [StimulusParams; 4] {
    let nd = |c: Criterion| NormalizedDeviation::of(registry, c, frame.get(c));
    ecology.stimuli().map(|s| match s {
        Stimulus::Arpeggio => map_arpeggio(nd(Criterion::WpdHeight), nd(Criterion::WpdWidth)),
        Stimulus::Droplets => map_droplets(nd(Criterion::WpdHeight), nd(Criterion::WpdWidth)),
        Stimulus::Drone => map_drone(nd(Criterion::Ph)),
        Stimulus::Birds => map_birds(nd(Criterion::Ph)),
        Stimulus::Jingle => map_jingle(nd(Criterion::Wpt)),
        Stimulus::Water => map_water(nd(Criterion::Wpt)),
        Stimulus::Bell | Stimulus::Sizzle => {
            let pt = frame.get(Criterion::Pt);
            let p = map_pt_alarm(s, pt, state.prev_pt.unwrap_or(pt), state.fired);
            state.prev_pt = Some(pt);
            state.fired |= p.trigger;
            p
        }
    })
}

/// Parameters of a frame with every criterion at nominal and PT cold.
pub fn idle_params(ecology: Ecology) -> [StimulusParams; 4] {
    let registry = CriterionRegistry::default();
    let mut values = [0.0; 5];
    for spec in registry.iter() {
        values[spec.id.index()] = spec.nominal;
    }
    values[Criterion::Pt.index()] = 500.0;
    map_frame(&CriterionFrame { t: 0.0, values }, ecology, &mut AlarmState::default())
}

#[derive(Serialize)]
struct ParamRecord<'a> {
    t: f64,
    params: &'a [StimulusParams],
}

/// Writes the mapped parameters of every frame as line-delimited records.
pub fn dump_params<W: Write>(mut out: W, frames: &[CriterionFrame], ecology: Ecology) -> std::io::Result<()> {
    let mut state = AlarmState::default();
    for f in frames {
        let params = map_frame(f, ecology, &mut state);
        serde_json::to_writer(&mut out, &ParamRecord { t: f.t, params: &params })?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
