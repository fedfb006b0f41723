//! Signal detection: probit, rate clamping and sensitivity.

use libm::erfc;

use super::classify::{Outcome, TrialOutcome};
use super::AnalysisError;

/// Rates of exactly 0 or 1 are moved to these bounds before taking probits.
pub const RATE_FLOOR: f64 = 0.01;
pub const RATE_CEIL: f64 = 0.99;

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Acklam's rational approximation, used as the starting point for refinement.
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549671010229528e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Inverse standard normal CDF.
///
/// Rational approximation refined by Newton steps against `phi`.
pub fn probit(p: f64) -> Result<f64, AnalysisError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(AnalysisError::ProbabilityOutOfRange(p));
    }
    if p > 0.5 {
        // Refine on the smaller tail, where phi has full relative precision.
        return probit(1.0 - p).map(|z| -z);
    }
    let mut x = acklam(p);
    for _ in 0..4 {
        let density = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let step = (phi(x) - p) / density;
        x -= step;
        if step.abs() <= 1e-15 * x.abs() {
            break;
        }
    }
    Ok(x)
}

pub fn clamp_rate(r: f64) -> f64 {
    r.clamp(RATE_FLOOR, RATE_CEIL)
}

/// Sensitivity index from clamped rates.
pub fn d_prime(h: f64, fa: f64) -> Result<f64, AnalysisError> {
    Ok(probit(h)? - probit(fa)?)
}

/// Per-participant, per-stimulus trial tallies and clamped rates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Rates {
    pub hits: u32,
    pub present: u32,
    pub false_alarms: u32,
    pub absent: u32,
    pub h: f64,
    pub fa: f64,
}

impl Rates {
    pub fn d_prime(&self) -> f64 {
        d_prime(self.h, self.fa).expect("rates are clamped into (0, 1)")
    }
}

/// Hit and false-alarm rates over one participant's trials for one stimulus.
///
/// Hits are counted over anomaly-present levels. False alarms, including
/// predictions made on anomaly-present levels, are counted against the
/// anomaly-absent levels, capped at 1. Both are then clamped to
/// `[RATE_FLOOR, RATE_CEIL]`. `None` when either denominator is zero.
pub fn rates(outcomes: &[TrialOutcome]) -> Option<Rates> {
    let mut r = Rates {
        hits: 0,
        present: 0,
        false_alarms: 0,
        absent: 0,
        h: 0.0,
        fa: 0.0,
    };
    for o in outcomes {
        if o.anomaly_present {
            r.present += 1;
        } else {
            r.absent += 1;
        }
        match o.outcome {
            Outcome::Hit => r.hits += 1,
            Outcome::FalseAlarm => r.false_alarms += 1,
            Outcome::Miss | Outcome::CorrectRejection => {}
        }
    }
    if r.present == 0 || r.absent == 0 {
        return None;
    }
    r.h = clamp_rate(r.hits as f64 / r.present as f64);
    r.fa = clamp_rate((r.false_alarms as f64 / r.absent as f64).min(1.0));
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probit_reference_points() {
        assert_eq!(probit(0.5).unwrap(), 0.0);
        assert!((probit(0.99).unwrap() - 2.326_347_874_040_841).abs() < 1e-12);
        assert!((probit(0.01).unwrap() + 2.326_347_874_040_841).abs() < 1e-12);
        assert!((probit(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((probit(1e-10).unwrap() + 6.361_340_902_404_056).abs() < 1e-9);
    }

    #[test]
    fn probit_rejects_bounds() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(probit(p).is_err(), "{p}");
        }
    }

    #[test]
    fn round_trips_through_phi() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            assert!((phi(probit(p).unwrap()) - p).abs() <= 1e-9 * p.max(1e-3), "{p}");
        }
    }

    fn trial(anomaly_present: bool, outcome: Outcome) -> TrialOutcome {
        TrialOutcome {
            anomaly_present,
            outcome,
            annotation_time_s: (outcome == Outcome::Hit).then_some(1.0),
        }
    }

    fn tally(hit: usize, miss: usize, pred: usize, fa: usize, cr: usize) -> Vec<TrialOutcome> {
        let mut v = Vec::new();
        v.extend((0..hit).map(|_| trial(true, Outcome::Hit)));
        v.extend((0..miss).map(|_| trial(true, Outcome::Miss)));
        v.extend((0..pred).map(|_| trial(true, Outcome::FalseAlarm)));
        v.extend((0..fa).map(|_| trial(false, Outcome::FalseAlarm)));
        v.extend((0..cr).map(|_| trial(false, Outcome::CorrectRejection)));
        v
    }

    #[test]
    fn rate_examples() {
        let r = rates(&tally(5, 0, 0, 0, 5)).unwrap();
        assert_eq!((r.h, r.fa), (0.99, 0.01));
        let r = rates(&tally(2, 2, 0, 2, 2)).unwrap();
        assert_eq!((r.h, r.fa), (0.5, 0.5));
        assert_eq!(r.d_prime(), 0.0);
        let r = rates(&tally(3, 1, 0, 1, 4)).unwrap();
        assert_eq!((r.h, r.fa), (0.75, 0.2));
        assert!(rates(&tally(1, 1, 0, 0, 0)).is_none());
        assert!(rates(&tally(0, 0, 0, 0, 1)).is_none());
    }

    #[test]
    fn predictions_count_against_absent_levels() {
        let r = rates(&tally(1, 0, 2, 0, 1)).unwrap();
        assert_eq!(r.present, 3);
        assert_eq!(r.false_alarms, 2);
        assert_eq!(r.absent, 1);
        assert!((r.h - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.fa, RATE_CEIL);
    }
}
