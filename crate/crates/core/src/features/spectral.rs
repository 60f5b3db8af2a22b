//! Band noise energy and onset strength.

use super::stft::Spectrogram;
use crate::error::{Error, Result};

/// Per-frame energy in a frequency band, normalized by the track maximum.
pub fn band_energy(spec: &Spectrogram, lo_hz: f64, hi_hz: f64) -> Result<Vec<f64>> {
    let nyquist = spec.sample_rate as f64 / 2.0;
    if !(lo_hz >= 0.0 && lo_hz < hi_hz && hi_hz <= nyquist) {
        return Err(Error::arg(format!(
            "invalid band {lo_hz}..{hi_hz} for Nyquist {nyquist}"
        )));
    }
    let bin_hz = spec.bin_hz();
    let lo_bin = (lo_hz / bin_hz).ceil() as usize;
    let hi_bin = ((hi_hz / bin_hz).floor() as usize).min(spec.num_bins() - 1);
    let mut energies: Vec<f64> = (0..spec.num_frames())
        .map(|f| {
            spec.frames[f][lo_bin..=hi_bin]
                .iter()
                .map(|c| c.norm_sqr())
                .sum()
        })
        .collect();
    let max = energies.iter().fold(0.0f64, |a, &b| a.max(b));
    if max > 1e-12 {
        for e in &mut energies {
            *e /= max;
        }
    }
    Ok(energies)
}

/// Half-wave-rectified spectral flux per frame, normalized by the track
/// maximum. The first frame has zero flux.
pub fn onset_strength(spec: &Spectrogram) -> Vec<f64> {
    let bins = spec.num_bins();
    let mut flux = vec![0.0f64; spec.num_frames()];
    let mut prev: Vec<f64> = vec![0.0; bins];
    for f in 0..spec.num_frames() {
        let mags = spec.magnitudes(f);
        if f > 0 {
            flux[f] = mags
                .iter()
                .zip(&prev)
                .map(|(m, p)| (m - p).max(0.0))
                .sum();
        }
        prev = mags;
    }
    let max = flux.iter().fold(0.0f64, |a, &b| a.max(b));
    if max > 1e-12 {
        for v in &mut flux {
            *v /= max;
        }
    }
    flux
}

/// Frame indices of onsets: local maxima of the strength envelope above
/// `threshold`, at least 50 ms apart.
pub fn detect_onsets(strength: &[f64], threshold: f64, frame_period_s: f64) -> Vec<usize> {
    let min_gap = (0.050 / frame_period_s).ceil() as usize;
    let mut onsets: Vec<usize> = Vec::new();
    for i in 0..strength.len() {
        let left = if i == 0 { 0.0 } else { strength[i - 1] };
        let right = if i + 1 < strength.len() {
            strength[i + 1]
        } else {
            0.0
        };
        if strength[i] >= threshold && strength[i] > left && strength[i] >= right {
            if let Some(&last) = onsets.last() {
                if i - last < min_gap.max(1) {
                    continue;
                }
            }
            onsets.push(i);
        }
    }
    onsets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::AudioBuffer;
    use crate::features::stft::stft;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn band_energy_of_silence_is_zero() {
        let spec = stft(&AudioBuffer::silence(8192, 44100), 2048, 4096, 1024).unwrap();
        let e = band_energy(&spec, 1000.0, 2000.0).unwrap();
        assert!(e.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn band_energy_rejects_invalid_bands() {
        let spec = stft(&AudioBuffer::silence(4096, 44100), 2048, 4096, 1024).unwrap();
        assert!(band_energy(&spec, 2000.0, 1000.0).is_err());
        assert!(band_energy(&spec, 0.0, 30000.0).is_err());
    }

    #[test]
    fn white_noise_energy_scales_with_bandwidth() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<f64> = (0..88200).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let audio = AudioBuffer::new(samples, 44100).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();

        // compare raw (unnormalized) band sums via a wide reference band
        let bin_hz = spec.bin_hz();
        let raw = |lo: f64, hi: f64| -> f64 {
            let lo_bin = (lo / bin_hz).ceil() as usize;
            let hi_bin = (hi / bin_hz).floor() as usize;
            (0..spec.num_frames())
                .map(|f| {
                    spec.frames[f][lo_bin..=hi_bin]
                        .iter()
                        .map(|c| c.norm_sqr())
                        .sum::<f64>()
                })
                .sum()
        };
        let narrow = raw(1000.0, 2000.0);
        let wide = raw(2000.0, 6000.0);
        let ratio = wide / narrow;
        assert!(
            (ratio - 4.0).abs() <= 1.0,
            "bandwidth ratio {ratio}, expected ~4"
        );
    }

    #[test]
    fn tone_outside_band_contributes_nothing() {
        let samples: Vec<f64> = (0..44100)
            .map(|n| (2.0 * std::f64::consts::PI * 440.0 * n as f64 / 44100.0).sin())
            .collect();
        let audio = AudioBuffer::new(samples, 44100).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        // normalization divides by the track max, which is itself leakage;
        // compare against the raw energy near the tone instead
        let bin_hz = spec.bin_hz();
        let band_sum = |lo: f64, hi: f64, f: usize| -> f64 {
            let lo_bin = (lo / bin_hz).ceil() as usize;
            let hi_bin = (hi / bin_hz).floor() as usize;
            spec.frames[f][lo_bin..=hi_bin]
                .iter()
                .map(|c| c.norm_sqr())
                .sum()
        };
        for f in [0, spec.num_frames() / 2, spec.num_frames() - 1] {
            let near = band_sum(300.0, 600.0, f);
            let away = band_sum(1000.0, 2000.0, f);
            assert!(away < 1e-9 * near, "leakage {away} vs tone {near}");
        }
    }

    #[test]
    fn click_train_onset_rate_is_recovered() {
        // 8 clicks per second for 2 seconds
        let sr = 44100u32;
        let mut samples = vec![0.0f64; 2 * sr as usize];
        let period = sr as usize / 8;
        for k in 0..16 {
            let at = k * period;
            for j in 0..64 {
                samples[at + j] = if j % 2 == 0 { 0.9 } else { -0.9 };
            }
        }
        let audio = AudioBuffer::new(samples, sr).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        let strength = onset_strength(&spec);
        let onsets = detect_onsets(&strength, 0.2, spec.frame_period());
        let rate = onsets.len() as f64 / audio.duration();
        assert!((rate - 8.0).abs() <= 1.0, "onset rate {rate}");
    }

    #[test]
    fn steady_tone_has_no_onsets_after_the_first() {
        // half a second of silence, then a steady tone: one onset at the
        // attack and nothing afterwards
        let lead = 22050usize;
        let samples: Vec<f64> = (0..88200)
            .map(|n| {
                if n < lead {
                    0.0
                } else {
                    (2.0 * std::f64::consts::PI * 500.0 * (n - lead) as f64 / 44100.0).sin()
                        * 0.7
                }
            })
            .collect();
        let audio = AudioBuffer::new(samples, 44100).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        let strength = onset_strength(&spec);
        let onsets = detect_onsets(&strength, 0.3, spec.frame_period());
        let attack_frame = lead / 1024;
        assert!(!onsets.is_empty(), "the attack is an onset");
        assert!(
            onsets
                .iter()
                .all(|&i| i >= attack_frame - 2 && i <= attack_frame + 2),
            "onsets away from the attack: {onsets:?}"
        );
    }

    #[test]
    fn silence_has_no_onsets() {
        let spec = stft(&AudioBuffer::silence(16384, 44100), 2048, 4096, 1024).unwrap();
        let strength = onset_strength(&spec);
        assert!(detect_onsets(&strength, 0.1, spec.frame_period()).is_empty());
    }
}
