use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use crate::mapping::Stimulus;

use super::wav::read_wav;

/// A decoded mono recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

/// Optional recordings laid out as `<root>/<stimulus>/<selection>.wav`.
///
/// Stimuli without a selection (droplets, sizzle) use `default.wav`.
#[derive(Debug, Clone, Default)]
pub struct AssetLibrary {
    samples: HashMap<(Stimulus, String), Arc<Sample>>,
}

const KNOWN: &[(Stimulus, &[&str])] = &[
    (Stimulus::Droplets, &["default"]),
    (Stimulus::Birds, &["misc", "ducks", "crows"]),
    (Stimulus::Water, &["crackling", "boiling"]),
    (Stimulus::Sizzle, &["default"]),
];

impl AssetLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads every recognised file under `root`.
    ///
    /// Missing files are skipped silently; unreadable ones are skipped with a
    /// warning and the procedural generator is used instead.
    pub fn load(root: &Path) -> Self {
        let mut samples = HashMap::new();
        for (stimulus, names) in KNOWN {
            for name in *names {
                let path = root.join(stimulus.asset_dir()).join(format!("{name}.wav"));
                if !path.exists() {
                    continue;
                }
                match read_wav(&path) {
                    Ok(buf) if buf.samples.len() >= 2 => {
                        samples.insert(
                            (*stimulus, name.to_string()),
                            Arc::new(Sample {
                                sample_rate: buf.sample_rate,
                                samples: buf.samples,
                            }),
                        );
                    }
                    Ok(_) => tracing::warn!(path = %path.display(), "asset too short, using procedural fallback"),
                    Err(e) => tracing::warn!(path = %path.display(), error = %e, "unreadable asset, using procedural fallback"),
                }
            }
        }
        Self { samples }
    }

    pub fn get(&self, stimulus: Stimulus, name: &str) -> Option<Arc<Sample>> {
        self.samples.get(&(stimulus, name.to_string())).cloned()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
