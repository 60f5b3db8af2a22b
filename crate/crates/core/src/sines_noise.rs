//! Audio-domain projective measurement through the sines+noise model.
//!
//! Measuring phonation extracts the sinusoidal component of a signal;
//! measuring turbulence extracts the residual. Each channel is approximately
//! idempotent, and applying the two in different orders gives audibly and
//! numerically different results: the audio realization of non-commuting
//! projectors.

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::features::{istft, padded_length, stft, Spectrogram};
use crate::C64;

/// Peak-picking and masking parameters for the sinusoidal extractor.
#[derive(Debug, Clone)]
pub struct SinesNoiseParams {
    pub window_size: usize,
    pub fft_size: usize,
    pub hop: usize,
    /// Peaks below this many dB under the frame maximum are ignored.
    pub peak_floor_db: f64,
    /// A local maximum must stand this many dB above the frame's median
    /// magnitude to count as a sinusoidal peak. The frame median is a
    /// noise-floor estimate that barely moves when peaks are masked out,
    /// which keeps repeated measurements consistent.
    pub peak_prominence_db: f64,
    /// At most this many peaks per frame, strongest first.
    pub max_peaks: usize,
    /// Bins kept on each side of a peak (the window main lobe).
    pub mask_half_width: usize,
}

impl Default for SinesNoiseParams {
    fn default() -> Self {
        SinesNoiseParams {
            window_size: 2048,
            fft_size: 4096,
            // 75% overlap keeps the resynthesis of masked spectra clean
            hop: 512,
            peak_floor_db: -80.0,
            // 8x the frame median sits beyond the Rayleigh tail of a noise
            // floor, so no noise maximum flickers in and out across
            // repeated measurements
            peak_prominence_db: 18.0,
            max_peaks: 100,
            // main lobe plus first sidelobe: a strong partial's sidelobes
            // would otherwise survive in the residual and be re-detected
            // as peaks, breaking idempotence
            mask_half_width: 8,
        }
    }
}

/// A spectral peak found in one frame.
#[derive(Debug, Clone, Copy)]
struct Peak {
    bin: usize,
    magnitude: f64,
    /// Parabolic-interpolated fractional bin position.
    refined_bin: f64,
}

/// Split audio into a sinusoidal part and a residual noise part.
///
/// Per frame, spectral peaks (local maxima above the floor with enough
/// prominence over the local median) select main-lobe-wide bin regions; the
/// sines channel keeps those bins, the noise channel keeps the complement,
/// so the two channels sum back to the input up to transform roundoff.
pub fn sines_noise_decompose(
    audio: &AudioBuffer,
    params: &SinesNoiseParams,
) -> Result<(AudioBuffer, AudioBuffer)> {
    if audio.len() < params.window_size {
        return Err(Error::arg(format!(
            "audio of {} samples is shorter than one analysis window",
            audio.len()
        )));
    }
    let original_len = audio.len();
    // Masked spectra no longer taper like a windowed frame, so samples
    // covered by a single analysis frame would be amplified by the
    // overlap-add envelope division. Pad a full window of silence on both
    // sides so every real sample has full frame coverage, then trim.
    let front_pad = params.window_size;
    let padded = pad_symmetric(audio, front_pad, params);
    let spec = stft(&padded, params.window_size, params.fft_size, params.hop)?;

    let mut sines_frames = Vec::with_capacity(spec.num_frames());
    let mut noise_frames = Vec::with_capacity(spec.num_frames());
    for f in 0..spec.num_frames() {
        let mags = spec.magnitudes(f);
        let peaks = find_peaks(&mags, params);
        let mask = peak_mask(&peaks, params, spec.fft_size);
        let frame = &spec.frames[f];
        let mut sines = vec![C64::new(0.0, 0.0); spec.fft_size];
        let mut noise = vec![C64::new(0.0, 0.0); spec.fft_size];
        for (b, keep) in mask.iter().enumerate() {
            if *keep {
                sines[b] = frame[b];
            } else {
                noise[b] = frame[b];
            }
        }
        sines_frames.push(sines);
        noise_frames.push(noise);
    }

    let rebuild = |frames: Vec<Vec<C64>>| -> Result<AudioBuffer> {
        let part = istft(&Spectrogram {
            frames,
            window_size: params.window_size,
            fft_size: params.fft_size,
            hop: params.hop,
            sample_rate: audio.sample_rate(),
        })?;
        let samples = part.into_samples()[front_pad..front_pad + original_len].to_vec();
        AudioBuffer::new(samples, audio.sample_rate())
    };
    Ok((rebuild(sines_frames)?, rebuild(noise_frames)?))
}

fn pad_symmetric(audio: &AudioBuffer, front: usize, params: &SinesNoiseParams) -> AudioBuffer {
    let covered = front + audio.len() + params.window_size;
    let target = padded_length(covered, params.window_size, params.hop);
    let mut samples = vec![0.0; front];
    samples.extend_from_slice(audio.samples());
    samples.resize(target, 0.0);
    AudioBuffer::new(samples, audio.sample_rate()).expect("padding keeps samples finite")
}

fn pad_to_grid(audio: &AudioBuffer, params: &SinesNoiseParams) -> AudioBuffer {
    let target = padded_length(audio.len(), params.window_size, params.hop);
    if target == audio.len() {
        return audio.clone();
    }
    let mut samples = audio.samples().to_vec();
    samples.resize(target, 0.0);
    AudioBuffer::new(samples, audio.sample_rate()).expect("padding keeps samples finite")
}

fn find_peaks(mags: &[f64], params: &SinesNoiseParams) -> Vec<Peak> {
    let frame_max = mags.iter().fold(0.0f64, |a, &b| a.max(b));
    if frame_max <= 1e-300 {
        return Vec::new();
    }
    let floor = frame_max * 10f64.powf(params.peak_floor_db / 20.0);
    let prominence = 10f64.powf(params.peak_prominence_db / 20.0);
    let mut sorted = mags.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let mut peaks = Vec::new();
    for k in 1..mags.len() - 1 {
        if mags[k] <= mags[k - 1] || mags[k] < mags[k + 1] || mags[k] < floor {
            continue;
        }
        if mags[k] < median * prominence {
            continue;
        }
        // parabolic interpolation over the three bins around the maximum
        let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
        let denom = a - 2.0 * b + c;
        let offset = if denom.abs() > 1e-300 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        peaks.push(Peak {
            bin: k,
            magnitude: b,
            refined_bin: k as f64 + offset,
        });
    }
    peaks.sort_by(|a, b| b.magnitude.partial_cmp(&a.magnitude).unwrap());
    peaks.truncate(params.max_peaks);
    peaks
}

fn peak_mask(peaks: &[Peak], params: &SinesNoiseParams, fft_size: usize) -> Vec<bool> {
    let mut mask = vec![false; fft_size];
    let half = fft_size / 2;
    for peak in peaks {
        let center = peak.refined_bin.round() as usize;
        let center = center.min(half).max(0);
        let lo = center.saturating_sub(params.mask_half_width);
        let hi = (center + params.mask_half_width).min(half);
        for b in lo..=hi {
            mask[b] = true;
            if b > 0 && b < fft_size {
                mask[fft_size - b] = true; // conjugate-symmetric partner
            }
        }
        let _ = peak.bin;
    }
    mask
}

/// Measurement of phonation: the sinusoidal component.
pub fn measure_phonation(audio: &AudioBuffer) -> Result<AudioBuffer> {
    Ok(sines_noise_decompose(audio, &SinesNoiseParams::default())?.0)
}

/// Measurement of turbulence: the residual noise component.
pub fn measure_turbulence(audio: &AudioBuffer) -> Result<AudioBuffer> {
    Ok(sines_noise_decompose(audio, &SinesNoiseParams::default())?.1)
}

/// Both orders of the two measurements and their spectral distance.
#[derive(Debug, Clone)]
pub struct OrderExperiment {
    /// Phonation measured after turbulence.
    pub phonation_after_turbulence: AudioBuffer,
    /// Turbulence measured after phonation.
    pub turbulence_after_phonation: AudioBuffer,
    /// Normalized distance between the two magnitude spectrograms.
    pub spectral_distance: f64,
}

/// Apply phonation-after-turbulence and turbulence-after-phonation to the
/// same input and quantify how different the two results are. A nonzero
/// distance is the audio signature of the non-commuting projectors.
pub fn noncommutativity_experiment(audio: &AudioBuffer) -> Result<OrderExperiment> {
    let turbulence_first = measure_phonation(&measure_turbulence(audio)?)?;
    let phonation_first = measure_turbulence(&measure_phonation(audio)?)?;
    let distance = spectral_distance(&turbulence_first, &phonation_first)?;
    Ok(OrderExperiment {
        phonation_after_turbulence: turbulence_first,
        turbulence_after_phonation: phonation_first,
        spectral_distance: distance,
    })
}

/// Normalized L2 distance between the magnitude spectrograms of two equally
/// long signals: `||A - B|| / max(||A||, ||B||)`, zero when both are silent.
pub fn spectral_distance(a: &AudioBuffer, b: &AudioBuffer) -> Result<f64> {
    if a.len() != b.len() || a.sample_rate() != b.sample_rate() {
        return Err(Error::arg("buffers have different geometry"));
    }
    let params = SinesNoiseParams::default();
    let spec_a = stft(
        &pad_to_grid(a, &params),
        params.window_size,
        params.fft_size,
        params.hop,
    )?;
    let spec_b = stft(
        &pad_to_grid(b, &params),
        params.window_size,
        params.fft_size,
        params.hop,
    )?;
    let mut diff = 0.0f64;
    let mut norm_a = 0.0f64;
    let mut norm_b = 0.0f64;
    for (fa, fb) in spec_a.frames.iter().zip(&spec_b.frames) {
        for (ca, cb) in fa.iter().zip(fb) {
            let (ma, mb) = (ca.norm(), cb.norm());
            diff += (ma - mb) * (ma - mb);
            norm_a += ma * ma;
            norm_b += mb * mb;
        }
    }
    let denom = norm_a.max(norm_b).sqrt();
    if denom <= 1e-12 {
        return Ok(0.0);
    }
    Ok(diff.sqrt() / denom)
}
