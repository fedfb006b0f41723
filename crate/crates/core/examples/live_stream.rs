//! Streams a level block by block and checks it against the offline render.

use sonoscape::mapping::Ecology;
use sonoscape::process_sim::{default_level_set, generate_trajectory, DEFAULT_FRAME_RATE};
use sonoscape::synth::{mix_level, stream_level, AssetLibrary, DEFAULT_SAMPLE_RATE};

fn main() -> anyhow::Result<()> {
    let level = &default_level_set(1)[2];
    let frames = generate_trajectory(level, DEFAULT_FRAME_RATE)?;
    let assets = AssetLibrary::empty();
    let offline = mix_level(level, &frames, Ecology::Synth, level.seed, DEFAULT_SAMPLE_RATE, &assets).mix;

    let started = std::time::Instant::now();
    let mut streamed = Vec::with_capacity(offline.samples.len());
    let mut blocks = 0;
    for block in stream_level(level, frames, Ecology::Synth, level.seed, DEFAULT_SAMPLE_RATE, &assets, 4096) {
        blocks += 1;
        streamed.extend(block);
    }
    println!("{blocks} blocks, {} samples in {:.2?}", streamed.len(), started.elapsed());
    println!("identical to offline render: {}", streamed == offline.samples);
    Ok(())
}
