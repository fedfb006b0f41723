use serde::{Deserialize, Serialize};

use super::criteria::{Criterion, CriterionKind, CriterionRegistry};
use super::SimError;

pub const DEFAULT_LEVEL_DURATION_S: f64 = 30.0;

/// A scripted deviation of one criterion.
///
/// `severity` is the target deviation in tolerance half-widths. For PT it is
/// the overshoot past the threshold once the crossing has happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyEvent {
    pub criterion: Criterion,
    pub onset: f64,
    pub ramp: f64,
    pub severity: f64,
    /// Seconds at the target before ramping back; infinite holds until level end.
    #[serde(with = "crate::serde_f64")]
    pub hold: f64,
}

impl AnomalyEvent {
    pub fn new(criterion: Criterion, onset: f64, ramp: f64, severity: f64) -> Self {
        Self {
            criterion,
            onset,
            ramp,
            severity,
            hold: f64::INFINITY,
        }
    }

    pub fn with_hold(mut self, hold: f64) -> Self {
        self.hold = hold;
        self
    }

    /// End of the active span, including the return ramp.
    pub fn end(&self) -> f64 {
        if self.hold.is_finite() {
            self.onset + 2.0 * self.ramp + self.hold
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub id: String,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default)]
    pub events: Vec<AnomalyEvent>,
    #[serde(default)]
    pub seed: u64,
}

fn default_duration() -> f64 {
    DEFAULT_LEVEL_DURATION_S
}

impl Level {
    pub fn idle(id: impl Into<String>, seed: u64) -> Self {
        Self {
            id: id.into(),
            duration: DEFAULT_LEVEL_DURATION_S,
            events: Vec::new(),
            seed,
        }
    }

    pub fn with_event(mut self, event: AnomalyEvent) -> Self {
        self.events.push(event);
        self
    }

    pub fn has_event_on(&self, c: Criterion) -> bool {
        self.events.iter().any(|e| e.criterion == c)
    }

    pub fn validate(&self, registry: &CriterionRegistry) -> Result<(), SimError> {
        let invalid = |reason: String| SimError::InvalidLevel {
            level: self.id.clone(),
            reason,
        };
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid(format!("duration must be positive, got {}", self.duration)));
        }
        for e in &self.events {
            if !(e.onset >= 0.0 && e.ramp >= 0.0) {
                return Err(invalid(format!("{}: onset and ramp must be >= 0", e.criterion)));
            }
            if e.onset + e.ramp >= self.duration {
                return Err(invalid(format!(
                    "{}: onset + ramp ({}) must be before level end",
                    e.criterion,
                    e.onset + e.ramp
                )));
            }
            if e.hold.is_nan() || e.hold < 0.0 {
                return Err(invalid(format!("{}: hold must be >= 0", e.criterion)));
            }
            match registry.get(e.criterion).kind {
                CriterionKind::Band if e.severity.abs() <= 1.0 || !e.severity.is_finite() => {
                    return Err(invalid(format!(
                        "{}: |severity| must exceed 1, got {}",
                        e.criterion, e.severity
                    )));
                }
                CriterionKind::Threshold if !(e.severity > 0.0 && e.severity.is_finite()) => {
                    return Err(invalid(format!("PT severity must be positive, got {}", e.severity)));
                }
                _ => {}
            }
        }
        for c in Criterion::ALL {
            let mut spans: Vec<(f64, f64)> = self
                .events
                .iter()
                .filter(|e| e.criterion == c)
                .map(|e| (e.onset, e.end()))
                .collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            if spans.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(SimError::OverlappingEvents {
                    level: self.id.clone(),
                    criterion: c,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_hold_serializes_as_text() {
        let e = AnomalyEvent::new(Criterion::Ph, 3.0, 1.0, -2.0);
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"hold\":\"inf\""), "{json}");
        let back: AnomalyEvent = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        let finite = e.with_hold(4.5);
        let back: AnomalyEvent = serde_json::from_str(&serde_json::to_string(&finite).unwrap()).unwrap();
        assert_eq!(back.hold, 4.5);
    }

    #[test]
    fn validation_rejects_bad_events() {
        let reg = CriterionRegistry::default();
        let ok = Level::idle("a", 1).with_event(AnomalyEvent::new(Criterion::Wpt, 5.0, 2.0, 2.5));
        assert!(ok.validate(&reg).is_ok());

        let weak = Level::idle("a", 1).with_event(AnomalyEvent::new(Criterion::Wpt, 5.0, 2.0, 0.9));
        assert!(weak.validate(&reg).is_err());

        let late = Level::idle("a", 1).with_event(AnomalyEvent::new(Criterion::Wpt, 29.0, 1.0, 2.0));
        assert!(late.validate(&reg).is_err());

        let overlap = Level::idle("a", 1)
            .with_event(AnomalyEvent::new(Criterion::Ph, 5.0, 1.0, 2.0))
            .with_event(AnomalyEvent::new(Criterion::Ph, 9.0, 1.0, -2.0));
        assert!(matches!(
            overlap.validate(&reg),
            Err(SimError::OverlappingEvents { criterion: Criterion::Ph, .. })
        ));

        let sequential = Level::idle("a", 1)
            .with_event(AnomalyEvent::new(Criterion::Ph, 2.0, 1.0, 2.0).with_hold(3.0))
            .with_event(AnomalyEvent::new(Criterion::Ph, 9.0, 1.0, -2.0));
        assert!(sequential.validate(&reg).is_ok());

        let cold_pt = Level::idle("a", 1).with_event(AnomalyEvent::new(Criterion::Pt, 5.0, 1.0, -1.0));
        assert!(cold_pt.validate(&reg).is_err());
    }
}
