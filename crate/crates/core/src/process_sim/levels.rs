//! Scripted level sets for training and the main experiment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::criteria::Criterion;
use super::level::{AnomalyEvent, Level};

pub const MAIN_LEVEL_COUNT: usize = 10;

/// Latest onset used by generated events, leaving room to annotate.
const MAX_ONSET_S: f64 = 18.0;

fn random_event(rng: &mut ChaCha8Rng, criterion: Criterion, sign: f64) -> AnomalyEvent {
    let onset = (rng.gen_range(3.0..MAX_ONSET_S) * 10.0_f64).round() / 10.0;
    let ramp = (rng.gen_range(0.5..2.0) * 10.0_f64).round() / 10.0;
    let severity = match criterion {
        Criterion::Pt => rng.gen_range(1.0..3.0),
        _ => sign * rng.gen_range(2.2..3.5),
    };
    AnomalyEvent::new(criterion, onset, ramp, severity)
}

fn random_signed_event(rng: &mut ChaCha8Rng, criterion: Criterion) -> AnomalyEvent {
    let sign = random_sign(rng);
    random_event(rng, criterion, sign)
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// The ten main-experiment levels for a seed.
///
/// Coverage: one idle level, both directions of PH and WPT, both WPD
/// dimensions, two multi-anomaly levels and one PT alarm level. Events are
/// drawn from the seed; the presentation order is shuffled per session
/// elsewhere.
pub fn default_level_set(seed: u64) -> Vec<Level> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::with_capacity(MAIN_LEVEL_COUNT);
    let mut push = |events: Vec<AnomalyEvent>, rng: &mut ChaCha8Rng| {
        let n = levels.len() + 1;
        levels.push(Level {
            id: format!("L{n:02}"),
            duration: super::level::DEFAULT_LEVEL_DURATION_S,
            events,
            seed: rng.gen(),
        });
    };

    push(vec![], &mut rng);
    let s = random_sign(&mut rng);
    let e = random_event(&mut rng, Criterion::WpdHeight, s);
    push(vec![e], &mut rng);
    let s = random_sign(&mut rng);
    let e = random_event(&mut rng, Criterion::WpdWidth, s);
    push(vec![e], &mut rng);
    for (c, s) in [
        (Criterion::Ph, -1.0),
        (Criterion::Ph, 1.0),
        (Criterion::Wpt, -1.0),
        (Criterion::Wpt, 1.0),
    ] {
        let e = random_event(&mut rng, c, s);
        push(vec![e], &mut rng);
    }

    // Two multi-anomaly levels: one WPD dimension with WPT, PH with the other.
    let (first, second) = if rng.gen_bool(0.5) {
        (Criterion::WpdHeight, Criterion::WpdWidth)
    } else {
        (Criterion::WpdWidth, Criterion::WpdHeight)
    };
    let events = vec![
        random_signed_event(&mut rng, first),
        random_signed_event(&mut rng, Criterion::Wpt),
    ];
    push(events, &mut rng);
    let events = vec![
        random_signed_event(&mut rng, Criterion::Ph),
        random_signed_event(&mut rng, second),
    ];
    push(events, &mut rng);

    // Last-resort alarm: a local overheat that ends with the part crossing 600 °C.
    let mut wpt = random_event(&mut rng, Criterion::Wpt, 1.0);
    wpt.onset = (rng.gen_range(3.0..8.0) * 10.0_f64).round() / 10.0;
    let mut pt = random_event(&mut rng, Criterion::Pt, 1.0);
    pt.onset = (rng.gen_range(wpt.onset + 4.0..MAX_ONSET_S) * 10.0_f64).round() / 10.0;
    push(vec![wpt, pt], &mut rng);

    levels
}

/// Training level used for qualification attempt `attempt` (0-based).
///
/// Always a single anomaly on one of the four groups.
pub fn qualifier_level(seed: u64, attempt: u32) -> Level {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5155_414c_4946_5900 ^ u64::from(attempt));
    let criterion = *[Criterion::WpdHeight, Criterion::WpdWidth, Criterion::Ph, Criterion::Wpt, Criterion::Pt]
        .choose(&mut rng)
        .unwrap();
    let sign = random_sign(&mut rng);
    let event = random_event(&mut rng, criterion, sign);
    Level::idle(format!("Q{:02}", attempt + 1), rng.gen()).with_event(event)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process_sim::{generate_trajectory, tolerance_onset_times, CriterionRegistry};

    #[test]
    fn level_set_is_deterministic() {
        assert_eq!(default_level_set(1), default_level_set(1));
        assert_ne!(default_level_set(1), default_level_set(2));
    }

    #[test]
    fn level_set_coverage_over_many_seeds() {
        let reg = CriterionRegistry::default();
        for seed in 0..200 {
            let set = default_level_set(seed);
            assert_eq!(set.len(), 10);
            let mut idle = 0;
            let mut multi = 0;
            let mut pt = 0;
            let mut dirs = std::collections::BTreeSet::new();
            for level in &set {
                assert_eq!(level.duration, 30.0);
                level.validate(&reg).unwrap();
                match level.events.len() {
                    0 => idle += 1,
                    1 => {}
                    _ => multi += 1,
                }
                for e in &level.events {
                    if e.criterion == Criterion::Pt {
                        pt += 1;
                    }
                    dirs.insert((e.criterion, e.severity > 0.0));
                }
            }
            assert!(idle >= 1 && multi >= 2 && pt >= 1, "seed {seed}");
            for c in [Criterion::Ph, Criterion::Wpt] {
                assert!(dirs.contains(&(c, true)) && dirs.contains(&(c, false)), "seed {seed} {c}");
            }
            for c in Criterion::ALL {
                assert!(dirs.iter().any(|(d, _)| *d == c), "seed {seed} misses {c}");
            }
        }
    }

    #[test]
    fn every_event_crosses_before_twenty_seconds() {
        for seed in 0..50 {
            for level in default_level_set(seed).into_iter().chain((0..4).map(|a| qualifier_level(seed, a))) {
                let frames = generate_trajectory(&level, 10.0).unwrap();
                let onsets = tolerance_onset_times(&level, &frames);
                assert_eq!(onsets.len(), level.events.len(), "{}", level.id);
                assert!(onsets.values().all(|&t| t <= 20.0 + 1e-9));
            }
        }
    }
}
