//! Pitch-salience tracking by harmonic summation.
//!
//! Salience of a pitch hypothesis is the decay-weighted sum of spectral
//! magnitudes at its first harmonics, evaluated on a log-spaced candidate
//! grid. The two strongest local maxima per frame become the tracked pitch
//! pair. Simplified relative to full melody-extraction pipelines: no contour
//! tracking, no voicing model.

use super::stft::Spectrogram;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SalienceParams {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub n_harmonics: usize,
    /// Weight of harmonic `h` is `harmonic_decay^(h-1)`.
    pub harmonic_decay: f64,
    /// Candidate grid spacing in cents.
    pub cents_step: f64,
}

impl Default for SalienceParams {
    fn default() -> Self {
        SalienceParams {
            f_min_hz: 55.0,
            f_max_hz: 1760.0,
            n_harmonics: 8,
            harmonic_decay: 0.8,
            cents_step: 10.0,
        }
    }
}

/// Top-two pitch hypotheses for one frame, ordered by salience.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchPair {
    pub pitch1_hz: f64,
    pub salience1: f64,
    pub pitch2_hz: f64,
    pub salience2: f64,
}

/// Per-frame top-two salient pitches. Saliences are normalized by the track
/// maximum; silent frames get zero salience and carry the previous frame's
/// pitches forward.
pub fn pitch_salience(spec: &Spectrogram, params: &SalienceParams) -> Result<Vec<PitchPair>> {
    if params.f_min_hz <= 0.0 || params.f_max_hz <= params.f_min_hz {
        return Err(Error::arg("invalid pitch band"));
    }
    if params.f_max_hz > spec.sample_rate as f64 / 2.0 {
        return Err(Error::arg("pitch band exceeds Nyquist"));
    }
    if params.n_harmonics == 0 {
        return Err(Error::arg("need at least one harmonic"));
    }

    let grid = candidate_grid(params);
    let weights: Vec<f64> = (0..params.n_harmonics)
        .map(|h| params.harmonic_decay.powi(h as i32))
        .collect();
    let nyquist = spec.sample_rate as f64 / 2.0;

    let mut pairs = Vec::with_capacity(spec.num_frames());
    let mut salience = vec![0.0f64; grid.len()];
    let mut last_pitch1 = 0.0f64;
    let mut last_pitch2 = 0.0f64;

    for frame in 0..spec.num_frames() {
        let frame_max = spec
            .magnitudes(frame)
            .into_iter()
            .fold(0.0f64, f64::max);
        if frame_max < 1e-12 {
            pairs.push(PitchPair {
                pitch1_hz: last_pitch1,
                salience1: 0.0,
                pitch2_hz: last_pitch2,
                salience2: 0.0,
            });
            continue;
        }
        for (i, f0) in grid.iter().enumerate() {
            let mut s = 0.0;
            for (h, w) in weights.iter().enumerate() {
                let f = f0 * (h + 1) as f64;
                if f > nyquist {
                    break;
                }
                s += w * spec.magnitude_at(frame, f);
            }
            salience[i] = s;
        }
        let (best, second) = top_two_local_maxima(&salience);
        let (p1, s1) = match best {
            Some(i) => (grid[i], salience[i]),
            None => (last_pitch1, 0.0),
        };
        let (p2, s2) = match second {
            Some(i) => (grid[i], salience[i]),
            None => (p1, 0.0),
        };
        last_pitch1 = p1;
        last_pitch2 = p2;
        pairs.push(PitchPair {
            pitch1_hz: p1,
            salience1: s1,
            pitch2_hz: p2,
            salience2: s2,
        });
    }

    let max_salience = pairs.iter().map(|p| p.salience1).fold(0.0f64, f64::max);
    if max_salience > 1e-12 {
        for p in &mut pairs {
            p.salience1 /= max_salience;
            p.salience2 /= max_salience;
        }
    }
    Ok(pairs)
}

fn candidate_grid(params: &SalienceParams) -> Vec<f64> {
    let step = 2f64.powf(params.cents_step / 1200.0);
    let mut grid = Vec::new();
    let mut f = params.f_min_hz;
    while f <= params.f_max_hz * 1.000_001 {
        grid.push(f);
        f *= step;
    }
    grid
}

/// Indices of the two largest interior local maxima, by value.
fn top_two_local_maxima(values: &[f64]) -> (Option<usize>, Option<usize>) {
    let mut best: Option<usize> = None;
    let mut second: Option<usize> = None;
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] > 0.0 {
            match best {
                Some(b) if values[i] <= values[b] => match second {
                    Some(s) if values[i] <= values[s] => {}
                    _ => second = Some(i),
                },
                _ => {
                    second = best;
                    best = Some(i);
                }
            }
        }
    }
    (best, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::AudioBuffer;
    use crate::features::stft::stft;

    fn harmonic_tone(f0: f64, partials: usize, len: usize, sr: u32) -> AudioBuffer {
        let mut samples = vec![0.0f64; len];
        for h in 1..=partials {
            let amp = 0.5 / h as f64;
            let w = 2.0 * std::f64::consts::PI * f0 * h as f64 / sr as f64;
            for (n, s) in samples.iter_mut().enumerate() {
                *s += amp * (w * n as f64).sin();
            }
        }
        AudioBuffer::new(samples, sr).unwrap()
    }

    fn cents(a: f64, b: f64) -> f64 {
        1200.0 * (a / b).log2()
    }

    #[test]
    fn single_harmonic_tone_is_found_within_ten_cents() {
        let audio = harmonic_tone(440.0, 6, 44100, 44100);
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        let pairs = pitch_salience(&spec, &SalienceParams::default()).unwrap();
        for p in &pairs {
            assert!(
                cents(p.pitch1_hz, 440.0).abs() <= 10.0,
                "pitch {} off by {} cents",
                p.pitch1_hz,
                cents(p.pitch1_hz, 440.0)
            );
            assert!(p.salience1 >= p.salience2);
        }
        assert!(pairs.iter().any(|p| p.salience1 > 0.99));
    }

    #[test]
    fn two_tones_are_both_recovered() {
        let mut a = harmonic_tone(440.0, 6, 44100, 44100);
        let b = harmonic_tone(660.0, 6, 44100, 44100);
        for (x, y) in a.samples_mut().iter_mut().zip(b.samples()) {
            *x = 0.5 * *x + 0.5 * y;
        }
        let spec = stft(&a, 2048, 4096, 1024).unwrap();
        let pairs = pitch_salience(&spec, &SalienceParams::default()).unwrap();
        let mid = &pairs[pairs.len() / 2];
        let found = [mid.pitch1_hz, mid.pitch2_hz];
        for target in [440.0, 660.0] {
            assert!(
                found.iter().any(|f| cents(*f, target).abs() <= 10.0),
                "missing {target} Hz in {found:?}"
            );
        }
        assert!(mid.salience1 >= mid.salience2);
    }

    #[test]
    fn silence_carries_pitch_and_zeroes_salience() {
        let tone = harmonic_tone(440.0, 6, 8192, 44100);
        let mut samples = tone.into_samples();
        samples.extend(std::iter::repeat(0.0).take(8192));
        let audio = AudioBuffer::new(samples, 44100).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        let pairs = pitch_salience(&spec, &SalienceParams::default()).unwrap();
        let last = pairs.last().unwrap();
        assert_eq!(last.salience1, 0.0);
        assert!(cents(last.pitch1_hz, 440.0).abs() <= 10.0, "carried pitch");
    }

    #[test]
    fn noise_salience_is_well_below_tonal_salience() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f64> = (0..44100).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let tone = harmonic_tone(440.0, 6, 44100, 44100);
        let mut joined = tone.into_samples();
        joined.extend(noise);
        let audio = AudioBuffer::new(joined, 44100).unwrap();
        let spec = stft(&audio, 2048, 4096, 1024).unwrap();
        let pairs = pitch_salience(&spec, &SalienceParams::default()).unwrap();
        let tonal_max = pairs[..20].iter().map(|p| p.salience1).fold(0.0, f64::max);
        let noise_frames = &pairs[pairs.len() - 20..];
        for p in noise_frames {
            assert!(
                p.salience1 < 0.2 * tonal_max,
                "noise salience {} vs tonal {tonal_max}",
                p.salience1
            );
        }
    }

    #[test]
    fn normalized_salience_is_gain_invariant() {
        let audio = harmonic_tone(330.0, 5, 22050, 44100);
        let quiet = AudioBuffer::new(
            audio.samples().iter().map(|s| s * 0.05).collect(),
            44100,
        )
        .unwrap();
        let p1 = pitch_salience(
            &stft(&audio, 2048, 4096, 1024).unwrap(),
            &SalienceParams::default(),
        )
        .unwrap();
        let p2 = pitch_salience(
            &stft(&quiet, 2048, 4096, 1024).unwrap(),
            &SalienceParams::default(),
        )
        .unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert!((a.salience1 - b.salience1).abs() < 1e-6);
            assert_eq!(a.pitch1_hz, b.pitch1_hz);
        }
    }
}
