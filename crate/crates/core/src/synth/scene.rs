//! Test-scene generators: crossing glides with a masking noise burst, and
//! additive white noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Clip into [-1, 1] with a tanh knee above 0.99; the identity below it.
pub(crate) fn soft_clip(x: f64) -> f64 {
    const KNEE: f64 = 0.99;
    if x.abs() <= KNEE {
        return x;
    }
    let head = (x.abs() - KNEE) / (1.0 - KNEE);
    x.signum() * (KNEE + (1.0 - KNEE) * head.tanh())
}

/// A frequency glide from `start_hz` to `end_hz`, linear in log frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlideSpec {
    pub start_hz: f64,
    pub end_hz: f64,
}

impl GlideSpec {
    pub fn new(start_hz: f64, end_hz: f64) -> Self {
        GlideSpec { start_hz, end_hz }
    }

    fn frequency_at(&self, t: f64, duration: f64) -> f64 {
        self.start_hz * (self.end_hz / self.start_hz).powf(t / duration)
    }

    /// Accumulated phase of the log glide at time `t`.
    fn phase_at(&self, t: f64, duration: f64) -> f64 {
        let ratio = self.end_hz / self.start_hz;
        let ln_r = ratio.ln();
        if ln_r.abs() < 1e-12 {
            return 2.0 * std::f64::consts::PI * self.start_hz * t;
        }
        2.0 * std::f64::consts::PI * self.start_hz * duration / ln_r
            * (ratio.powf(t / duration) - 1.0)
    }
}

/// Two equal-amplitude gliding tones that cross, interrupted by a white
/// noise burst: the tones are gated to silence inside the burst window.
#[allow(clippy::too_many_arguments)]
pub fn crossing_glides(
    glide1: GlideSpec,
    glide2: GlideSpec,
    duration_s: f64,
    noise_start_s: f64,
    noise_dur_s: f64,
    noise_amp: f64,
    seed: u64,
    sample_rate: u32,
) -> Result<AudioBuffer> {
    if !(duration_s > 0.0) {
        return Err(Error::arg("duration must be positive"));
    }
    let nyquist = sample_rate as f64 / 2.0;
    for g in [&glide1, &glide2] {
        if !(g.start_hz > 0.0 && g.end_hz > 0.0 && g.start_hz < nyquist && g.end_hz < nyquist) {
            return Err(Error::arg("glide endpoints must sit inside (0, Nyquist)"));
        }
    }
    let d0 = glide1.start_hz - glide2.start_hz;
    let d1 = glide1.end_hz - glide2.end_hz;
    if d0 * d1 > 0.0 {
        return Err(Error::arg("glides do not cross within the duration"));
    }
    if noise_dur_s < 0.0
        || noise_start_s < 0.0
        || noise_start_s + noise_dur_s > duration_s
    {
        return Err(Error::arg("noise window must sit inside the duration"));
    }
    if noise_amp < 0.0 {
        return Err(Error::arg("noise amplitude must be nonnegative"));
    }

    let sr = sample_rate as f64;
    let len = (duration_s * sr).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 / sr;
            let in_burst = t >= noise_start_s && t < noise_start_s + noise_dur_s;
            if in_burst {
                soft_clip(noise_amp * rng.gen_range(-1.0..1.0))
            } else {
                0.45 * (glide1.phase_at(t, duration_s).sin()
                    + glide2.phase_at(t, duration_s).sin())
            }
        })
        .collect();
    AudioBuffer::new(samples, sample_rate)
}

/// Instantaneous frequencies of the two glides at a point in time.
pub fn glide_frequencies(
    glide1: GlideSpec,
    glide2: GlideSpec,
    t: f64,
    duration_s: f64,
) -> (f64, f64) {
    (
        glide1.frequency_at(t, duration_s),
        glide2.frequency_at(t, duration_s),
    )
}

/// Add seeded uniform white noise and clip: `audio + amplitude * noise`.
/// Amplitude zero returns the input unchanged.
pub fn add_noise(audio: &AudioBuffer, amplitude: f64, seed: u64) -> Result<AudioBuffer> {
    if amplitude < 0.0 || !amplitude.is_finite() {
        return Err(Error::arg("noise amplitude must be nonnegative"));
    }
    if amplitude == 0.0 {
        return Ok(audio.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = audio
        .samples()
        .iter()
        .map(|s| soft_clip(s + amplitude * rng.gen_range(-1.0..1.0)))
        .collect();
    AudioBuffer::new(samples, audio.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_glides() -> AudioBuffer {
        crossing_glides(
            GlideSpec::new(400.0, 800.0),
            GlideSpec::new(800.0, 400.0),
            3.0,
            1.5,
            0.2,
            0.8,
            0,
            44100,
        )
        .unwrap()
    }

    #[test]
    fn glide_tracks_cross_at_the_midpoint() {
        let (f1, f2) = glide_frequencies(
            GlideSpec::new(400.0, 800.0),
            GlideSpec::new(800.0, 400.0),
            1.5,
            3.0,
        );
        assert!((f1 - f2).abs() < 1e-9);
        assert!((f1 - (400.0f64 * 800.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn burst_window_is_noise_and_tones_are_gated() {
        let audio = default_glides();
        let sr = 44100.0;
        let inside: Vec<f64> =
            audio.samples()[(1.55 * sr) as usize..(1.65 * sr) as usize].to_vec();
        let inside_rms =
            (inside.iter().map(|s| s * s).sum::<f64>() / inside.len() as f64).sqrt();
        // uniform noise at 0.8 has rms 0.8/sqrt(3)
        assert!((inside_rms - 0.8 / 3f64.sqrt()).abs() < 0.05, "{inside_rms}");
        let outside: Vec<f64> =
            audio.samples()[(2.0 * sr) as usize..(2.1 * sr) as usize].to_vec();
        let outside_peak = outside.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        assert!(outside_peak <= 0.9 + 1e-9);
    }

    #[test]
    fn zero_noise_amp_leaves_a_pure_gap() {
        let audio = crossing_glides(
            GlideSpec::new(400.0, 800.0),
            GlideSpec::new(800.0, 400.0),
            3.0,
            1.5,
            0.2,
            0.0,
            0,
            44100,
        )
        .unwrap();
        let sr = 44100.0;
        let gap = &audio.samples()[(1.51 * sr) as usize..(1.69 * sr) as usize];
        assert!(gap.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn non_crossing_or_bad_window_is_rejected() {
        let up1 = GlideSpec::new(400.0, 800.0);
        let up2 = GlideSpec::new(500.0, 900.0);
        assert!(crossing_glides(up1, up2, 3.0, 1.5, 0.2, 0.5, 0, 44100).is_err());
        let down = GlideSpec::new(800.0, 400.0);
        assert!(crossing_glides(up1, down, 3.0, 2.95, 0.2, 0.5, 0, 44100).is_err());
    }

    #[test]
    fn add_noise_zero_is_identity() {
        let audio = default_glides();
        let same = add_noise(&audio, 0.0, 9).unwrap();
        assert_eq!(audio, same);
    }

    #[test]
    fn add_noise_hits_the_expected_snr() {
        let tone: Vec<f64> = (0..44100)
            .map(|n| 0.5 * (2.0 * std::f64::consts::PI * 440.0 * n as f64 / 44100.0).sin())
            .collect();
        let audio = AudioBuffer::new(tone, 44100).unwrap();
        let noisy = add_noise(&audio, 0.1, 3).unwrap();
        let diff: Vec<f64> = noisy
            .samples()
            .iter()
            .zip(audio.samples())
            .map(|(a, b)| a - b)
            .collect();
        let noise_rms =
            (diff.iter().map(|s| s * s).sum::<f64>() / diff.len() as f64).sqrt();
        let snr = 20.0 * (audio.rms() / noise_rms).log10();
        let expected = 20.0 * (audio.rms() / (0.1 / 3f64.sqrt())).log10();
        assert!((snr - expected).abs() < 1.0, "snr {snr} vs expected {expected}");
    }

    #[test]
    fn add_noise_output_stays_in_range() {
        let loud: Vec<f64> = (0..4096).map(|n| if n % 2 == 0 { 0.95 } else { -0.95 }).collect();
        let audio = AudioBuffer::new(loud, 44100).unwrap();
        let noisy = add_noise(&audio, 1.0, 5).unwrap();
        assert!(noisy.peak() <= 1.0);
    }

    #[test]
    fn soft_clip_is_identity_in_range_and_bounded() {
        assert_eq!(soft_clip(0.5), 0.5);
        assert_eq!(soft_clip(-0.98), -0.98);
        assert!(soft_clip(3.0) <= 1.0);
        assert!(soft_clip(-3.0) >= -1.0);
        assert!(soft_clip(1.2) > soft_clip(1.1));
    }
}
