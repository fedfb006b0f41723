//! Maps frames of one level to the stimulus parameters of every ecology.

use sonoscape::mapping::{map_frame, AlarmState, Ecology};
use sonoscape::process_sim::{default_level_set, generate_trajectory, DEFAULT_FRAME_RATE};

fn main() -> anyhow::Result<()> {
    let level = default_level_set(1).into_iter().find(|l| !l.events.is_empty()).expect("a level with anomalies");
    let frames = generate_trajectory(&level, DEFAULT_FRAME_RATE)?;
    println!("level {}: {:?}", level.id, level.events);
    for eco in Ecology::ALL {
        println!("\n{eco}");
        let mut state = AlarmState::default();
        for frame in &frames {
            let params = map_frame(frame, eco, &mut state);
            // One line every five seconds.
            if (frame.t * DEFAULT_FRAME_RATE).round() as usize % 50 != 0 {
                continue;
            }
            let cells: Vec<String> = params
                .iter()
                .map(|p| match (p.pitch_hz, p.selection, p.playback_rate) {
                    (_, Some(sel), _) => format!("{}={sel:?}@{:.2}", p.stimulus.label(), p.loudness),
                    (_, _, Some(rate)) => format!("{}=x{rate:.2}@{:.2}", p.stimulus.label(), p.loudness),
                    (Some(hz), _, _) => format!("{}={hz:.1}Hz@{:.2}", p.stimulus.label(), p.loudness),
                    _ => format!("{}{}", p.stimulus.label(), if p.trigger { "!" } else { "" }),
                })
                .collect();
            println!("  t={:>4.1}  {}", frame.t, cells.join("  "));
        }
    }
    Ok(())
}
