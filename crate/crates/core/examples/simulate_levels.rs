//! Prints the seeded main level set and when each criterion first leaves tolerance.
//!
//!     cargo run --example simulate_levels -- 7

use sonoscape::process_sim::{default_level_set, generate_trajectory, tolerance_onset_times, DEFAULT_FRAME_RATE};

fn main() -> anyhow::Result<()> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    for level in default_level_set(seed) {
        let frames = generate_trajectory(&level, DEFAULT_FRAME_RATE)?;
        println!("{} ({} s, {} frames)", level.id, level.duration, frames.len());
        for e in &level.events {
            println!("  {:?} onset {:.1} s, ramp {:.1} s, severity {:.2}", e.criterion, e.onset, e.ramp, e.severity);
        }
        for (c, t) in tolerance_onset_times(&level, &frames) {
            println!("  {c:?} out of tolerance at {t:.1} s");
        }
    }
    Ok(())
}
