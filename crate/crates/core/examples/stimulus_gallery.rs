//! Renders each stimulus in tolerance and at its worst, a few seconds each.

use std::path::PathBuf;

use sonoscape::mapping::{
    map_arpeggio, map_birds, map_drone, map_droplets, map_jingle, map_water, NormalizedDeviation,
};
use sonoscape::synth::{render_bell, render_schedule, write_wav, AssetLibrary, DEFAULT_SAMPLE_RATE};

fn main() -> anyhow::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "gallery".into()));
    std::fs::create_dir_all(&out)?;
    let sr = DEFAULT_SAMPLE_RATE;
    let assets = AssetLibrary::empty();
    let nd = NormalizedDeviation::new;
    for (name, worst) in [("idle", 0.0f64), ("high", 3.0), ("low", -3.0)] {
        let params = [
            map_arpeggio(nd(worst.abs()), nd(0.0)),
            map_drone(nd(worst)),
            map_droplets(nd(worst), nd(0.0)),
            map_birds(nd(worst)),
            map_jingle(nd(worst)),
            map_water(nd(worst)),
        ];
        for p in params {
            let buf = render_schedule(p.stimulus, &[(0.0, p)], 6.0, 1, sr, &assets);
            let path = out.join(format!("{}_{name}.wav", p.stimulus.label().to_lowercase()));
            write_wav(&path, &buf)?;
            println!("{:<40} rms {:.4}", path.display(), buf.rms());
        }
    }
    let bell = render_bell(1, sr);
    write_wav(&out.join("bell.wav"), &bell)?;
    println!("bell: {:.1} s", bell.duration());
    Ok(())
}
