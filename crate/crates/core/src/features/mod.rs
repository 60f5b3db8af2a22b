//! Time-frequency analysis and the audio features that drive Hamiltonian
//! potentials: top-two pitch salience, band noise energies, onset strength.

mod salience;
mod spectral;
mod stft;

pub use salience::{pitch_salience, PitchPair, SalienceParams};
pub use spectral::{band_energy, detect_onsets, onset_strength};
pub use stft::{hann_window, istft, stft, Spectrogram};

pub(crate) use stft::padded_length;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Analysis geometry and feature parameters. Defaults: 44.1 kHz material
/// with a 2048-sample Hann window, 4096-point FFT, 1024-sample hop, noise
/// bands 1-2 kHz and 2-6 kHz.
#[derive(Debug, Clone)]
pub struct FeatureParams {
    pub window_size: usize,
    pub fft_size: usize,
    pub hop: usize,
    pub salience: SalienceParams,
    pub noise_band_lo: (f64, f64),
    pub noise_band_hi: (f64, f64),
    pub onset_threshold: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            window_size: 2048,
            fft_size: 4096,
            hop: 1024,
            salience: SalienceParams::default(),
            noise_band_lo: (1000.0, 2000.0),
            noise_band_hi: (2000.0, 6000.0),
            onset_threshold: 0.3,
        }
    }
}

/// One frame of extracted features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureFrame {
    pub time_s: f64,
    pub pitch1_hz: f64,
    pub pitch1_salience: f64,
    pub pitch2_hz: f64,
    pub pitch2_salience: f64,
    pub noise_lo: f64,
    pub noise_hi: f64,
    pub onset_strength: f64,
}

impl FeatureFrame {
    /// Mean of the two normalized band energies; the turbulence potential.
    pub fn noisiness(&self) -> f64 {
        0.5 * (self.noise_lo + self.noise_hi)
    }

    /// Higher of the two tracked pitches (zero if untracked).
    pub fn pitch_upper(&self) -> f64 {
        if self.pitch2_hz > 0.0 {
            self.pitch1_hz.max(self.pitch2_hz)
        } else {
            self.pitch1_hz
        }
    }

    /// Lower of the two tracked pitches (zero if untracked).
    pub fn pitch_lower(&self) -> f64 {
        if self.pitch2_hz > 0.0 {
            self.pitch1_hz.min(self.pitch2_hz)
        } else {
            self.pitch1_hz
        }
    }
}

/// Aligned per-frame features for a whole recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTrack {
    pub frames: Vec<FeatureFrame>,
    /// Seconds between consecutive frames.
    pub frame_period: f64,
}

impl FeatureTrack {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frame nearest to a point in time.
    pub fn frame_at(&self, time_s: f64) -> &FeatureFrame {
        let idx = ((time_s - self.frames[0].time_s) / self.frame_period).round() as isize;
        let idx = idx.clamp(0, self.frames.len() as isize - 1) as usize;
        &self.frames[idx]
    }

    /// CSV with one row per frame.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "time_s,pitch1_hz,pitch1_salience,pitch2_hz,pitch2_salience,noise_lo,noise_hi,onset_strength\n",
        );
        for f in &self.frames {
            out.push_str(&format!(
                "{:.6},{:.4},{:.6},{:.4},{:.6},{:.6},{:.6},{:.6}\n",
                f.time_s,
                f.pitch1_hz,
                f.pitch1_salience,
                f.pitch2_hz,
                f.pitch2_salience,
                f.noise_lo,
                f.noise_hi,
                f.onset_strength
            ));
        }
        out
    }
}

/// Run the full feature pipeline on a spectrogram.
pub fn extract_features(spec: &Spectrogram, params: &FeatureParams) -> Result<FeatureTrack> {
    let pitches = pitch_salience(spec, &params.salience)?;
    let lo = band_energy(spec, params.noise_band_lo.0, params.noise_band_lo.1)?;
    let hi = band_energy(spec, params.noise_band_hi.0, params.noise_band_hi.1)?;
    let onsets = onset_strength(spec);

    let frames = (0..spec.num_frames())
        .map(|i| FeatureFrame {
            time_s: spec.frame_time(i),
            pitch1_hz: pitches[i].pitch1_hz,
            pitch1_salience: pitches[i].salience1,
            pitch2_hz: pitches[i].pitch2_hz,
            pitch2_salience: pitches[i].salience2,
            noise_lo: lo[i],
            noise_hi: hi[i],
            onset_strength: onsets[i],
        })
        .collect();
    Ok(FeatureTrack {
        frames,
        frame_period: spec.frame_period(),
    })
}

/// Transform audio and extract features in one step.
pub fn analyze(audio: &AudioBuffer, params: &FeatureParams) -> Result<FeatureTrack> {
    let spec = stft(audio, params.window_size, params.fft_size, params.hop)?;
    extract_features(&spec, params)
}

/// Block-decimate a track by `m`: saliences and energies are block means,
/// onset strength is the block max, pitches come from the most salient frame
/// of the block. `m = 1` is the identity.
pub fn decimate(track: &FeatureTrack, m: usize) -> Result<FeatureTrack> {
    if m < 1 {
        return Err(Error::arg("decimation factor must be at least 1"));
    }
    if track.is_empty() {
        return Err(Error::arg("cannot decimate an empty track"));
    }
    if m == 1 {
        return Ok(track.clone());
    }
    let mut frames = Vec::with_capacity(track.len().div_ceil(m));
    for block in track.frames.chunks(m) {
        let inv = 1.0 / block.len() as f64;
        let mean = |f: fn(&FeatureFrame) -> f64| -> f64 {
            block.iter().map(f).sum::<f64>() * inv
        };
        let loudest = block
            .iter()
            .max_by(|a, b| {
                a.pitch1_salience
                    .partial_cmp(&b.pitch1_salience)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty block");
        frames.push(FeatureFrame {
            time_s: block[0].time_s,
            pitch1_hz: loudest.pitch1_hz,
            pitch1_salience: mean(|f| f.pitch1_salience),
            pitch2_hz: loudest.pitch2_hz,
            pitch2_salience: mean(|f| f.pitch2_salience),
            noise_lo: mean(|f| f.noise_lo),
            noise_hi: mean(|f| f.noise_hi),
            onset_strength: block
                .iter()
                .map(|f| f.onset_strength)
                .fold(0.0, f64::max),
        });
    }
    Ok(FeatureTrack {
        frames,
        frame_period: track.frame_period * m as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_track(len: usize, value: f64) -> FeatureTrack {
        FeatureTrack {
            frames: (0..len)
                .map(|i| FeatureFrame {
                    time_s: i as f64 * 0.02,
                    pitch1_hz: 440.0,
                    pitch1_salience: value,
                    pitch2_hz: 220.0,
                    pitch2_salience: value / 2.0,
                    noise_lo: value / 3.0,
                    noise_hi: value / 4.0,
                    onset_strength: value / 5.0,
                })
                .collect(),
            frame_period: 0.02,
        }
    }

    #[test]
    fn decimate_identity_and_errors() {
        let track = constant_track(10, 0.8);
        let same = decimate(&track, 1).unwrap();
        assert_eq!(same, track);
        assert!(decimate(&track, 0).is_err());
    }

    #[test]
    fn decimate_constant_track_stays_constant() {
        let track = constant_track(20, 0.6);
        let dec = decimate(&track, 10).unwrap();
        assert_eq!(dec.len(), 2);
        assert!((dec.frames[0].pitch1_salience - 0.6).abs() < 1e-12);
        assert!((dec.frames[1].noise_lo - 0.2).abs() < 1e-12);
        assert!((dec.frame_period - 0.2).abs() < 1e-12);
    }

    #[test]
    fn decimate_ramp_produces_block_means() {
        let mut track = constant_track(6, 0.0);
        for (i, f) in track.frames.iter_mut().enumerate() {
            f.pitch1_salience = i as f64 / 5.0; // 0, 0.2, ..., 1.0
            f.onset_strength = i as f64 / 5.0;
        }
        let dec = decimate(&track, 2).unwrap();
        assert_eq!(dec.len(), 3);
        assert!((dec.frames[0].pitch1_salience - 0.1).abs() < 1e-12);
        assert!((dec.frames[1].pitch1_salience - 0.5).abs() < 1e-12);
        assert!((dec.frames[2].pitch1_salience - 0.9).abs() < 1e-12);
        // onset strength takes the block max
        assert!((dec.frames[0].onset_strength - 0.2).abs() < 1e-12);
    }

    #[test]
    fn decimate_rounds_length_up() {
        let track = constant_track(7, 0.5);
        let dec = decimate(&track, 3).unwrap();
        assert_eq!(dec.len(), 3);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let track = constant_track(3, 0.5);
        let csv = track.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("time_s,pitch1_hz"));
    }
}
