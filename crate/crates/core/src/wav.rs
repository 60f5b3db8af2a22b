//! Minimal RIFF/WAVE reader and writer.
//!
//! Reads 16-bit PCM and 32-bit IEEE float files, mono or stereo (stereo is
//! downmixed by averaging). Writes mono 32-bit float (default) or 16-bit PCM.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    /// 32-bit IEEE float.
    Float32,
    /// 16-bit signed PCM.
    Pcm16,
}

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Read a WAV file into a mono buffer.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; 12];
    reader.read_exact(&mut header)?;
    if &header[0..4] != b"RIFF" || &header[8..12] != b"WAVE" {
        return Err(Error::AudioFormat("not a RIFF/WAVE file".into()));
    }

    let mut format: Option<(u16, u16, u32, u16)> = None; // tag, channels, rate, bits
    loop {
        let mut chunk_header = [0u8; 8];
        if reader.read_exact(&mut chunk_header).is_err() {
            return Err(Error::AudioFormat("missing data chunk".into()));
        }
        let chunk_id = [
            chunk_header[0],
            chunk_header[1],
            chunk_header[2],
            chunk_header[3],
        ];
        let chunk_size = u32::from_le_bytes(chunk_header[4..8].try_into().unwrap()) as usize;
        match &chunk_id {
            b"fmt " => {
                let mut body = vec![0u8; chunk_size];
                reader.read_exact(&mut body)?;
                if body.len() < 16 {
                    return Err(Error::AudioFormat("truncated fmt chunk".into()));
                }
                let mut tag = u16::from_le_bytes([body[0], body[1]]);
                let channels = u16::from_le_bytes([body[2], body[3]]);
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes([body[14], body[15]]);
                if tag == FORMAT_EXTENSIBLE && body.len() >= 26 {
                    // sub-format GUID starts with the effective format tag
                    tag = u16::from_le_bytes([body[24], body[25]]);
                }
                format = Some((tag, channels, rate, bits));
                if chunk_size % 2 == 1 {
                    let mut pad = [0u8; 1];
                    let _ = reader.read_exact(&mut pad);
                }
            }
            b"data" => {
                let (tag, channels, rate, bits) = format
                    .ok_or_else(|| Error::AudioFormat("data chunk before fmt".into()))?;
                if channels == 0 || channels > 2 {
                    return Err(Error::AudioFormat(format!(
                        "unsupported channel count {channels}"
                    )));
                }
                let mut body = vec![0u8; chunk_size];
                reader.read_exact(&mut body)?;
                let interleaved = decode_samples(tag, bits, &body)?;
                let mono = downmix(&interleaved, channels as usize);
                return AudioBuffer::new(mono, rate);
            }
            _ => {
                // skip unknown chunk, honoring word alignment
                let skip = chunk_size + (chunk_size % 2);
                let mut remaining = skip;
                let mut scratch = [0u8; 4096];
                while remaining > 0 {
                    let take = remaining.min(scratch.len());
                    reader.read_exact(&mut scratch[..take])?;
                    remaining -= take;
                }
            }
        }
    }
}

fn decode_samples(tag: u16, bits: u16, body: &[u8]) -> Result<Vec<f64>> {
    match (tag, bits) {
        (FORMAT_PCM, 16) => Ok(body
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
            .collect()),
        (FORMAT_FLOAT, 32) => Ok(body
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .map(|s| if s.is_finite() { s } else { 0.0 })
            .collect()),
        _ => Err(Error::AudioFormat(format!(
            "unsupported format tag {tag} with {bits} bits"
        ))),
    }
}

fn downmix(interleaved: &[f64], channels: usize) -> Vec<f64> {
    if channels == 1 {
        return interleaved.to_vec();
    }
    interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect()
}

/// Write a mono buffer to a WAV file.
pub fn write_wav(
    path: impl AsRef<Path>,
    audio: &AudioBuffer,
    format: SampleFormat,
) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    let (tag, bits): (u16, u16) = match format {
        SampleFormat::Float32 => (FORMAT_FLOAT, 32),
        SampleFormat::Pcm16 => (FORMAT_PCM, 16),
    };
    let bytes_per_sample = (bits / 8) as u32;
    let data_len = audio.len() as u32 * bytes_per_sample;
    let sample_rate = audio.sample_rate();

    writer.write_all(b"RIFF")?;
    writer.write_all(&(36 + data_len).to_le_bytes())?;
    writer.write_all(b"WAVE")?;
    writer.write_all(b"fmt ")?;
    writer.write_all(&16u32.to_le_bytes())?;
    writer.write_all(&tag.to_le_bytes())?;
    writer.write_all(&1u16.to_le_bytes())?; // mono
    writer.write_all(&sample_rate.to_le_bytes())?;
    writer.write_all(&(sample_rate * bytes_per_sample).to_le_bytes())?;
    writer.write_all(&(bytes_per_sample as u16).to_le_bytes())?;
    writer.write_all(&bits.to_le_bytes())?;
    writer.write_all(b"data")?;
    writer.write_all(&data_len.to_le_bytes())?;
    match format {
        SampleFormat::Float32 => {
            for &s in audio.samples() {
                writer.write_all(&(s as f32).to_le_bytes())?;
            }
        }
        SampleFormat::Pcm16 => {
            for &s in audio.samples() {
                let q = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
                writer.write_all(&q.to_le_bytes())?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}
