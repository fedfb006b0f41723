//! Scoring of one checkbox over one level.

use serde::{Deserialize, Serialize};

use crate::records::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Hit,
    Miss,
    FalseAlarm,
    CorrectRejection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub anomaly_present: bool,
    pub outcome: Outcome,
    /// Seconds from anomaly onset to the annotating check; hits only.
    pub annotation_time_s: Option<f64>,
}

/// Scores one stimulus checkbox over one level.
///
/// `toggles` are the checkbox's actions in time order. The rules:
/// - any check before the onset is a prediction and scores a false alarm,
///   even if the box stays checked past the onset;
/// - with an anomaly, the box must end the level checked, and the check
///   that began that final checked stretch times the annotation;
/// - a check that is later withdrawn counts as no annotation;
/// - without an anomaly, ending checked is a false alarm.
///
/// Repeated checks or unchecks with no state change are ignored.
pub fn classify_trial(onset: Option<f64>, toggles: &[(f64, Action)]) -> TrialOutcome {
    let mut checked_since: Option<f64> = None;
    let mut predicted = false;
    for &(t, action) in toggles {
        match action {
            Action::Check => {
                if onset.is_some_and(|o| t < o) {
                    predicted = true;
                }
                checked_since.get_or_insert(t);
            }
            Action::Uncheck => checked_since = None,
        }
    }
    let (outcome, annotation_time_s) = match (onset, checked_since) {
        (Some(_), _) if predicted => (Outcome::FalseAlarm, None),
        (Some(o), Some(since)) => (Outcome::Hit, Some(since - o)),
        (Some(_), None) => (Outcome::Miss, None),
        (None, Some(_)) => (Outcome::FalseAlarm, None),
        (None, None) => (Outcome::CorrectRejection, None),
    };
    TrialOutcome {
        anomaly_present: onset.is_some(),
        outcome,
        annotation_time_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::*;

    #[test]
    fn hit_with_annotation_time() {
        let o = classify_trial(Some(10.0), &[(12.4, Check)]);
        assert_eq!(o.outcome, Outcome::Hit);
        assert!((o.annotation_time_s.unwrap() - 2.4).abs() < 1e-12);
    }

    #[test]
    fn prediction_is_false_alarm() {
        assert_eq!(classify_trial(Some(10.0), &[(8.0, Check)]).outcome, Outcome::FalseAlarm);
        let o = classify_trial(Some(10.0), &[(8.0, Check), (9.0, Uncheck), (11.0, Check)]);
        assert_eq!(o.outcome, Outcome::FalseAlarm);
        assert!(o.anomaly_present);
    }

    #[test]
    fn change_of_mind_is_miss() {
        assert_eq!(classify_trial(Some(10.0), &[(12.0, Check), (20.0, Uncheck)]).outcome, Outcome::Miss);
    }

    #[test]
    fn recheck_times_from_final_check() {
        let o = classify_trial(Some(10.0), &[(11.0, Check), (12.0, Uncheck), (13.5, Check), (14.0, Check)]);
        assert_eq!(o.outcome, Outcome::Hit);
        assert_eq!(o.annotation_time_s, Some(3.5));
    }

    #[test]
    fn absent_anomaly() {
        assert_eq!(classify_trial(None, &[]).outcome, Outcome::CorrectRejection);
        assert_eq!(classify_trial(None, &[(3.0, Check)]).outcome, Outcome::FalseAlarm);
        assert_eq!(classify_trial(None, &[(3.0, Check), (4.0, Uncheck)]).outcome, Outcome::CorrectRejection);
        assert!(!classify_trial(None, &[]).anomaly_present);
    }

    #[test]
    fn check_at_onset_counts() {
        let o = classify_trial(Some(10.0), &[(10.0, Check)]);
        assert_eq!(o.outcome, Outcome::Hit);
        assert_eq!(o.annotation_time_s, Some(0.0));
    }
}
