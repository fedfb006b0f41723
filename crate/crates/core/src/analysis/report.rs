use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::classify::{classify_trial, TrialOutcome};
use super::sdt::rates;
use super::stats::{anova_oneway, five_number, mean, Anova, FiveNumber};
use super::{annotation_time_ms, mean_copy_time_ms, survey_aggregate, AnalysisError};
use crate::mapping::{Ecology, Stimulus};
use crate::records::{Export, SessionLog};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTrial {
    pub level_id: String,
    pub stimulus: Stimulus,
    #[serde(flatten)]
    pub trial: TrialOutcome,
}

/// Classifies every checkbox of every completed main level of a session.
pub fn score_session(log: &SessionLog) -> Vec<ScoredTrial> {
    let mut out = Vec::new();
    for level in log.levels.iter().filter(|l| l.completed) {
        for stimulus in log.ecology.stimuli() {
            let toggles: Vec<_> = level.annotations_for(stimulus).iter().map(|a| (a.t, a.action)).collect();
            out.push(ScoredTrial {
                level_id: level.level.id.clone(),
                stimulus,
                trial: classify_trial(level.stimulus_onset(stimulus), &toggles),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantSensitivity {
    pub session_id: String,
    pub ecology: Ecology,
    pub stimulus: Stimulus,
    pub hits: u32,
    pub present: u32,
    pub false_alarms: u32,
    pub absent: u32,
    pub h: f64,
    pub fa: f64,
    pub d_prime: f64,
}

/// Mean over participants for one stimulus of one ecology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub ecology: Ecology,
    pub stimulus: Stimulus,
    pub participants: usize,
    pub h: f64,
    pub fa: f64,
    pub d_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallSensitivity {
    pub ecology: Ecology,
    /// Mean of the per-stimulus means.
    pub d_prime: f64,
    /// Mean over every participant and stimulus value.
    pub grand_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationTime {
    pub ecology: Ecology,
    pub stimulus: Stimulus,
    pub hits: usize,
    pub mean_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantCopyTime {
    pub session_id: String,
    pub sequences: usize,
    pub mean_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimaryTask {
    pub ecology: Ecology,
    pub participants: Vec<ParticipantCopyTime>,
    pub mean_ms: Option<f64>,
    pub summary: Option<FiveNumber>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub statement: String,
    pub responses: usize,
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyTable {
    pub ecology: Ecology,
    pub rows: Vec<SurveyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub measure: String,
    pub ecology_a: Ecology,
    pub ecology_b: Ecology,
    pub result: Option<Anova>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub no_sessions: bool,
    pub sessions: BTreeMap<Ecology, usize>,
    pub participants: Vec<ParticipantSensitivity>,
    pub sensitivity: Vec<SensitivityResult>,
    pub overall: Vec<OverallSensitivity>,
    pub annotation_times: Vec<AnnotationTime>,
    pub primary_task: Vec<PrimaryTask>,
    pub survey: Vec<SurveyTable>,
    pub anova: Vec<AnovaRow>,
}

pub const ANOVA_MEASURES: [&str; 2] = ["overall_d_prime", "copy_time_ms"];

/// Builds the full report. Sessions without a completed main level are ignored.
pub fn build_report(export: &Export) -> Report {
    let mut sessions: Vec<&SessionLog> = export
        .sessions
        .iter()
        .filter(|s| s.levels.iter().any(|l| l.completed))
        .collect();
    sessions.sort_by(|a, b| a.session_id.cmp(&b.session_id));

    let mut report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        no_sessions: sessions.is_empty(),
        sessions: BTreeMap::new(),
        participants: Vec::new(),
        sensitivity: Vec::new(),
        overall: Vec::new(),
        annotation_times: Vec::new(),
        primary_task: Vec::new(),
        survey: Vec::new(),
        anova: Vec::new(),
    };

    // Per ecology: participant overall d′ and participant copy time, for the ANOVA.
    let mut overall_by_eco: BTreeMap<Ecology, Vec<f64>> = BTreeMap::new();
    let mut copy_by_eco: BTreeMap<Ecology, Vec<f64>> = BTreeMap::new();

    for eco in Ecology::ALL {
        let group: Vec<&SessionLog> = sessions.iter().copied().filter(|s| s.ecology == eco).collect();
        if group.is_empty() {
            continue;
        }
        report.sessions.insert(eco, group.len());
        let scored: Vec<(&SessionLog, Vec<ScoredTrial>)> = group.iter().map(|s| (*s, score_session(s))).collect();

        let mut participant_overall: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        let mut stimulus_means = Vec::new();
        let mut all_values = Vec::new();
        for stimulus in eco.stimuli() {
            let mut ds = Vec::new();
            let mut hs = Vec::new();
            let mut fas = Vec::new();
            let mut pooled: Vec<TrialOutcome> = Vec::new();
            for (s, trials) in &scored {
                let mine: Vec<TrialOutcome> =
                    trials.iter().filter(|t| t.stimulus == stimulus).map(|t| t.trial).collect();
                pooled.extend(&mine);
                let Some(r) = rates(&mine) else { continue };
                let d = r.d_prime();
                report.participants.push(ParticipantSensitivity {
                    session_id: s.session_id.clone(),
                    ecology: eco,
                    stimulus,
                    hits: r.hits,
                    present: r.present,
                    false_alarms: r.false_alarms,
                    absent: r.absent,
                    h: r.h,
                    fa: r.fa,
                    d_prime: d,
                });
                participant_overall.entry(s.session_id.as_str()).or_default().push(d);
                ds.push(d);
                hs.push(r.h);
                fas.push(r.fa);
            }
            if let Some(d) = mean(&ds) {
                report.sensitivity.push(SensitivityResult {
                    ecology: eco,
                    stimulus,
                    participants: ds.len(),
                    h: mean(&hs).unwrap(),
                    fa: mean(&fas).unwrap(),
                    d_prime: d,
                });
                stimulus_means.push(d);
                all_values.extend(ds);
            }
            report.annotation_times.push(AnnotationTime {
                ecology: eco,
                stimulus,
                hits: pooled.iter().filter(|o| o.annotation_time_s.is_some()).count(),
                mean_ms: annotation_time_ms(&pooled),
            });
        }
        if let (Some(d), Some(g)) = (mean(&stimulus_means), mean(&all_values)) {
            report.overall.push(OverallSensitivity {
                ecology: eco,
                d_prime: d,
                grand_mean: g,
            });
        }
        overall_by_eco.insert(eco, participant_overall.values().filter_map(|v| mean(v)).collect());

        let participants: Vec<ParticipantCopyTime> = group
            .iter()
            .filter_map(|s| {
                let durations: Vec<f64> = s
                    .levels
                    .iter()
                    .filter(|l| l.completed)
                    .flat_map(|l| l.sequences.iter().map(|q| q.duration))
                    .collect();
                mean_copy_time_ms(&durations).map(|m| ParticipantCopyTime {
                    session_id: s.session_id.clone(),
                    sequences: durations.len(),
                    mean_ms: m,
                })
            })
            .collect();
        let scores: Vec<f64> = participants.iter().map(|p| p.mean_ms).collect();
        copy_by_eco.insert(eco, scores.clone());
        report.primary_task.push(PrimaryTask {
            ecology: eco,
            participants,
            mean_ms: mean(&scores),
            summary: five_number(&scores),
        });

        let responses: Vec<_> = group.iter().filter_map(|s| s.survey.as_ref()).collect();
        report.survey.push(SurveyTable {
            ecology: eco,
            rows: survey_aggregate(&responses),
        });
    }

    let present: Vec<Ecology> = report.sessions.keys().copied().collect();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            for (measure, data) in ANOVA_MEASURES.iter().zip([&overall_by_eco, &copy_by_eco]) {
                let (ga, gb) = (&data[&a], &data[&b]);
                let (result, note) = match anova_oneway(&[ga, gb]) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                report.anova.push(AnovaRow {
                    measure: measure.to_string(),
                    ecology_a: a,
                    ecology_b: b,
                    result,
                    note,
                });
            }
        }
    }
    report
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

/// Writes `report.json` and the plot-ready CSV tables into `dir`.
pub fn write_tables(report: &Report, dir: &Path) -> Result<(), AnalysisError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;

    let mut w = csv::Writer::from_path(dir.join("sensitivity.csv"))?;
    w.write_record(["ecology", "stimulus", "participants", "h", "fa", "d_prime"])?;
    for s in &report.sensitivity {
        w.write_record([
            s.ecology.as_str(),
            s.stimulus.label(),
            &s.participants.to_string(),
            &format!("{:.4}", s.h),
            &format!("{:.4}", s.fa),
            &format!("{:.4}", s.d_prime),
        ])?;
    }
    for o in &report.overall {
        let n = report.sessions.get(&o.ecology).copied().unwrap_or(0);
        w.write_record([o.ecology.as_str(), "OVERALL", &n.to_string(), "", "", &format!("{:.4}", o.d_prime)])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("times.csv"))?;
    w.write_record(["ecology", "stimulus", "hits", "mean_ms"])?;
    for t in &report.annotation_times {
        w.write_record([t.ecology.as_str(), t.stimulus.label(), &t.hits.to_string(), &opt(t.mean_ms)])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("primary.csv"))?;
    w.write_record(["ecology", "participants", "mean_ms", "min", "q1", "median", "q3", "max"])?;
    for p in &report.primary_task {
        let s = p.summary;
        w.write_record([
            p.ecology.as_str(),
            &p.participants.len().to_string(),
            &opt(p.mean_ms),
            &opt(s.map(|s| s.min)),
            &opt(s.map(|s| s.q1)),
            &opt(s.map(|s| s.median)),
            &opt(s.map(|s| s.q3)),
            &opt(s.map(|s| s.max)),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("survey.csv"))?;
    w.write_record(["ecology", "statement", "responses", "percent"])?;
    for t in &report.survey {
        for r in &t.rows {
            w.write_record([t.ecology.as_str(), &r.statement, &r.responses.to_string(), &opt(r.percent)])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("anova.csv"))?;
    w.write_record(["measure", "ecology_a", "ecology_b", "f", "p", "df_between", "df_within", "degenerate", "note"])?;
    for a in &report.anova {
        let r = a.result;
        w.write_record([
            a.measure.as_str(),
            a.ecology_a.as_str(),
            a.ecology_b.as_str(),
            &r.map(|r| if r.f.is_infinite() { "inf".to_string() } else { format!("{:.6}", r.f) }).unwrap_or_default(),
            &r.map(|r| format!("{:.6}", r.p)).unwrap_or_default(),
            &r.map(|r| r.df_between.to_string()).unwrap_or_default(),
            &r.map(|r| r.df_within.to_string()).unwrap_or_default(),
            &r.map(|r| r.degenerate.to_string()).unwrap_or_default(),
            a.note.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}
