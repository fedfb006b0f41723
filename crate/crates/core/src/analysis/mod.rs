//! Scoring and statistics over exported sessions.
//!
//! Per level and checkbox, [`classify_trial`] yields a hit, miss, false alarm
//! or correct rejection. Per participant and stimulus, [`rates`] turns those
//! into clamped hit and false-alarm rates and d′. [`build_report`] collects
//! everything, including annotation times, sequence-copy times, survey
//! agreement and pairwise ANOVA between ecologies.

mod classify;
mod report;
mod sdt;
mod stats;

pub use classify::{classify_trial, Outcome, TrialOutcome};
pub use report::{
    build_report, score_session, write_tables, AnnotationTime, AnovaRow, OverallSensitivity, ParticipantCopyTime,
    ParticipantSensitivity, PrimaryTask, Report, ScoredTrial, SensitivityResult, SurveyRow, SurveyTable,
    REPORT_SCHEMA_VERSION,
};
pub use sdt::{clamp_rate, d_prime, phi, probit, rates, Rates, RATE_CEIL, RATE_FLOOR};
pub use stats::{anova_oneway, five_number, mean, quantile, Anova, FiveNumber};

use crate::records::{Answer, SurveyResponse, SURVEY_STATEMENTS};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("probability {0} outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("ANOVA needs at least two groups of at least two values")]
    DegenerateGroups,
    #[error("non-finite observation")]
    NonFinite,
    #[error("no values to average")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Mean of individual d′ values.
pub fn mean_sensitivity(d_primes: &[f64]) -> Result<f64, AnalysisError> {
    mean(d_primes).ok_or(AnalysisError::EmptyInput)
}

/// Mean annotation time of the hits, in milliseconds; `None` without hits.
pub fn annotation_time_ms(outcomes: &[TrialOutcome]) -> Option<f64> {
    let times: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.outcome == Outcome::Hit)
        .filter_map(|o| o.annotation_time_s)
        .map(|s| s * 1000.0)
        .collect();
    mean(&times)
}

/// Mean sequence-copy time in milliseconds from durations in seconds.
pub fn mean_copy_time_ms(durations_s: &[f64]) -> Option<f64> {
    mean(durations_s).map(|m| m * 1000.0)
}

/// Agreement percentage per statement, in statement order.
///
/// Incomplete responses are skipped.
pub fn survey_aggregate(responses: &[&SurveyResponse]) -> Vec<SurveyRow> {
    let complete: Vec<&&SurveyResponse> = responses.iter().filter(|r| r.is_complete()).collect();
    SURVEY_STATEMENTS
        .iter()
        .enumerate()
        .map(|(i, statement)| {
            let values: Vec<f64> = complete.iter().map(|r| r.answers[i].value()).collect();
            SurveyRow {
                statement: statement.to_string(),
                responses: values.len(),
                percent: mean(&values),
            }
        })
        .collect()
}

/// Agreement percentage for a bare list of answers.
pub fn agreement(answers: &[Answer]) -> Option<f64> {
    mean(&answers.iter().map(|a| a.value()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensitivity_examples() {
        let d = d_prime(0.99, 0.01).unwrap();
        assert!((d - 4.6527).abs() < 2e-3);
        assert_eq!(d_prime(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(mean_sensitivity(&[1.0, 3.0]).unwrap(), 2.0);
        assert!(mean_sensitivity(&[]).is_err());
    }

    #[test]
    fn annotation_time_examples() {
        let hit = |s| TrialOutcome {
            anomaly_present: true,
            outcome: Outcome::Hit,
            annotation_time_s: Some(s),
        };
        assert!((annotation_time_ms(&[hit(2.4), hit(3.6)]).unwrap() - 3000.0).abs() < 1e-9);
        assert_eq!(annotation_time_ms(&[hit(1.25)]), Some(1250.0));
        let miss = TrialOutcome {
            anomaly_present: true,
            outcome: Outcome::Miss,
            annotation_time_s: None,
        };
        assert_eq!(annotation_time_ms(&[miss]), None);
        assert_eq!(mean_copy_time_ms(&[2.0, 4.0]), Some(3000.0));
    }

    #[test]
    fn survey_examples() {
        use Answer::*;
        assert_eq!(agreement(&[Agree, Agree]), Some(100.0));
        assert_eq!(agreement(&[Disagree, Agree]), Some(50.0));
        assert_eq!(agreement(&[Somewhat, Somewhat, Somewhat, Agree]), Some(62.5));
        let r = |a| SurveyResponse {
            age: None,
            gender: None,
            answers: vec![a; 7],
            comment: String::new(),
        };
        let (a, b) = (r(Somewhat), r(Agree));
        let rows = survey_aggregate(&[&a, &a, &a, &b]);
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].statement, "Easy to distinguish sounds");
        assert_eq!(rows[6].statement, "Task distracts from sounds");
        assert!(rows.iter().all(|row| row.percent == Some(62.5)));
    }
}
