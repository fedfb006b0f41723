//! Renders one level in every ecology to `<out>/<level>_<ECOLOGY>.wav`.
//!
//!     cargo run --release --example render_ecologies -- out/

use std::path::PathBuf;

use sonoscape::mapping::Ecology;
use sonoscape::process_sim::{default_level_set, generate_trajectory, DEFAULT_FRAME_RATE};
use sonoscape::synth::{mix_level, write_wav, AssetLibrary, DEFAULT_SAMPLE_RATE};

fn main() -> anyhow::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "rendered".into()));
    std::fs::create_dir_all(&out)?;
    let level = &default_level_set(1)[0];
    let frames = generate_trajectory(level, DEFAULT_FRAME_RATE)?;
    for eco in Ecology::ALL {
        let mix = mix_level(level, &frames, eco, level.seed, DEFAULT_SAMPLE_RATE, &AssetLibrary::empty());
        let path = out.join(format!("{}_{eco}.wav", level.id));
        write_wav(&path, &mix.mix)?;
        let audible: Vec<&str> = mix.stems.iter().filter(|(_, b)| !b.is_silent()).map(|(s, _)| s.label()).collect();
        println!("{}  rms {:.4}  audible: {}", path.display(), mix.mix.rms(), audible.join(", "));
    }
    Ok(())
}
