//! Scenario documents and line-delimited frame logs.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::level::Level;
use super::trajectory::CriterionFrame;
use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub levels: Vec<Level>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        // A bare level is accepted too, for hand-written single-level files.
        if let Ok(s) = serde_json::from_str::<Scenario>(text) {
            return Ok(s);
        }
        let level: Level = serde_json::from_str(text).map_err(SimError::Format)?;
        Ok(Scenario { levels: vec![level] })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario is always serializable")
    }
}

pub fn write_frame_log<W: Write>(mut out: W, frames: &[CriterionFrame]) -> Result<(), SimError> {
    for f in frames {
        serde_json::to_writer(&mut out, f).map_err(SimError::Format)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_frame_log<R: BufRead>(input: R) -> Result<Vec<CriterionFrame>, SimError> {
    let mut frames = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(serde_json::from_str(&line).map_err(SimError::Format)?);
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process_sim::{default_level_set, generate_trajectory};

    #[test]
    fn frame_log_round_trip() {
        let level = &default_level_set(4)[3];
        let frames = generate_trajectory(level, 10.0).unwrap();
        let mut buf = Vec::new();
        write_frame_log(&mut buf, &frames).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), frames.len());
        let back = read_frame_log(buf.as_slice()).unwrap();
        assert_eq!(back, frames);
    }

    #[test]
    fn scenario_accepts_single_level() {
        let s = Scenario::from_json(r#"{"id":"solo","events":[{"criterion":"PH","onset":4,"ramp":1,"severity":-2.5,"hold":"inf"}]}"#)
            .unwrap();
        assert_eq!(s.levels.len(), 1);
        assert_eq!(s.levels[0].duration, 30.0);
        let full = Scenario { levels: default_level_set(9) };
        assert_eq!(Scenario::from_json(&full.to_json()).unwrap(), full);
        assert!(Scenario::from_json("{nope").is_err());
    }
}
