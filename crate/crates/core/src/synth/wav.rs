use std::io::{Cursor, Write};
use std::path::Path;

use super::{AudioBuffer, SynthError};

pub fn wav_spec(sample_rate: u32) -> hound::WavSpec {
    hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    }
}

#[inline]
pub fn to_pcm16(x: f32) -> i16 {
    (x.clamp(-1.0, 1.0) * i16::MAX as f32).round() as i16
}

pub fn write_wav(path: &Path, buf: &AudioBuffer) -> Result<(), SynthError> {
    let mut w = hound::WavWriter::create(path, wav_spec(buf.sample_rate))?;
    for &s in &buf.samples {
        w.write_sample(to_pcm16(s))?;
    }
    w.finalize()?;
    Ok(())
}

/// The complete 16-bit PCM file as bytes.
pub fn wav_bytes(buf: &AudioBuffer) -> Vec<u8> {
    let mut cursor = Cursor::new(Vec::with_capacity(44 + 2 * buf.samples.len()));
    {
        let mut w = hound::WavWriter::new(&mut cursor, wav_spec(buf.sample_rate)).expect("in-memory write");
        for &s in &buf.samples {
            w.write_sample(to_pcm16(s)).expect("in-memory write");
        }
        w.finalize().expect("in-memory write");
    }
    cursor.into_inner()
}

/// Canonical 44-byte header for a mono 16-bit file of known length.
///
/// Used when the body is streamed and cannot be seeked back into.
pub fn wav_header(num_samples: u32, sample_rate: u32) -> [u8; 44] {
    let data_len = num_samples * 2;
    let mut h = [0u8; 44];
    let mut w = &mut h[..];
    w.write_all(b"RIFF").unwrap();
    w.write_all(&(36 + data_len).to_le_bytes()).unwrap();
    w.write_all(b"WAVEfmt ").unwrap();
    w.write_all(&16u32.to_le_bytes()).unwrap();
    w.write_all(&1u16.to_le_bytes()).unwrap();
    w.write_all(&1u16.to_le_bytes()).unwrap();
    w.write_all(&sample_rate.to_le_bytes()).unwrap();
    w.write_all(&(sample_rate * 2).to_le_bytes()).unwrap();
    w.write_all(&2u16.to_le_bytes()).unwrap();
    w.write_all(&16u16.to_le_bytes()).unwrap();
    w.write_all(b"data").unwrap();
    w.write_all(&data_len.to_le_bytes()).unwrap();
    h
}

pub fn pcm16_bytes(block: &[f32]) -> Vec<u8> {
    block.iter().flat_map(|&s| to_pcm16(s).to_le_bytes()).collect()
}

/// Reads any PCM or float WAV, down-mixing to mono in [-1, 1].
pub fn read_wav(path: &Path) -> Result<AudioBuffer, SynthError> {
    let reader = hound::WavReader::open(path)?;
    decode(reader)
}

pub fn read_wav_bytes(bytes: &[u8]) -> Result<AudioBuffer, SynthError> {
    decode(hound::WavReader::new(Cursor::new(bytes))?)
}

fn decode<R: std::io::Read>(mut reader: hound::WavReader<R>) -> Result<AudioBuffer, SynthError> {
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader.samples::<f32>().collect::<Result<_, _>>()?,
        hound::SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<Result<_, _>>()?
        }
    };
    let samples = interleaved
        .chunks(channels)
        .map(|c| c.iter().sum::<f32>() / channels as f32)
        .collect();
    Ok(AudioBuffer::new(spec.sample_rate, samples))
}
