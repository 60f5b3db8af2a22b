//! Short-time Fourier transform and overlap-add inverse.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::C64;

/// Complex spectral frames of an overlapped, windowed transform.
///
/// Each frame holds the full `fft_size`-point spectrum of one Hann-windowed,
/// zero-padded signal segment. Frame `i` starts at sample `i * hop`.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub frames: Vec<Vec<C64>>,
    pub window_size: usize,
    pub fft_size: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    /// Hz per FFT bin.
    pub fn bin_hz(&self) -> f64 {
        self.sample_rate as f64 / self.fft_size as f64
    }

    /// Seconds between consecutive frames.
    pub fn frame_period(&self) -> f64 {
        self.hop as f64 / self.sample_rate as f64
    }

    /// Start time of frame `i` in seconds.
    pub fn frame_time(&self, i: usize) -> f64 {
        i as f64 * self.frame_period()
    }

    /// Number of non-redundant bins (DC through Nyquist).
    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Magnitudes of the non-redundant bins of one frame.
    pub fn magnitudes(&self, frame: usize) -> Vec<f64> {
        self.frames[frame][..self.num_bins()]
            .iter()
            .map(|c| c.norm())
            .collect()
    }

    /// Linearly interpolated magnitude at an arbitrary frequency.
    pub fn magnitude_at(&self, frame: usize, freq_hz: f64) -> f64 {
        let pos = freq_hz / self.bin_hz();
        if pos < 0.0 || pos > (self.num_bins() - 1) as f64 {
            return 0.0;
        }
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(self.num_bins() - 1);
        let frac = pos - lo as f64;
        let a = self.frames[frame][lo].norm();
        let b = self.frames[frame][hi].norm();
        a + frac * (b - a)
    }

    /// CSV dump of the magnitude matrix: one row per frame, bins DC..Nyquist.
    pub fn magnitude_csv(&self) -> String {
        let mut out = String::new();
        for f in 0..self.num_frames() {
            let mags = self.magnitudes(f);
            let row: Vec<String> = mags.iter().map(|m| format!("{m:.9e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Hann window with a half-sample offset: `sin^2(pi (n + 1/2) / N)`.
/// Never zero at the edges, and pairs of frames a half-window apart sum to
/// exactly one, which keeps the overlap-add inverse well conditioned over
/// the whole signal.
pub fn hann_window(size: usize) -> Vec<f64> {
    (0..size)
        .map(|n| {
            let s = (std::f64::consts::PI * (n as f64 + 0.5) / size as f64).sin();
            s * s
        })
        .collect()
}

fn plan(fft_size: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(fft_size)
    } else {
        planner.plan_fft_forward(fft_size)
    }
}

fn validate_geometry(window_size: usize, fft_size: usize, hop: usize) -> Result<()> {
    if !window_size.is_power_of_two() || !fft_size.is_power_of_two() {
        return Err(Error::arg("window and FFT sizes must be powers of two"));
    }
    if fft_size < window_size {
        return Err(Error::arg("FFT size must be at least the window size"));
    }
    if hop == 0 || hop > window_size {
        return Err(Error::arg("hop must be in 1..=window_size"));
    }
    Ok(())
}

/// Forward transform with Hann windowing and zero padding.
///
/// Produces `floor((len - window) / hop) + 1` frames; the audio must contain
/// at least one full window.
pub fn stft(
    audio: &AudioBuffer,
    window_size: usize,
    fft_size: usize,
    hop: usize,
) -> Result<Spectrogram> {
    validate_geometry(window_size, fft_size, hop)?;
    let samples = audio.samples();
    if samples.len() < window_size {
        return Err(Error::arg(format!(
            "audio of {} samples is shorter than one window ({window_size})",
            samples.len()
        )));
    }
    let window = hann_window(window_size);
    let num_frames = (samples.len() - window_size) / hop + 1;
    let fft = plan(fft_size, false);

    let mut frames = Vec::with_capacity(num_frames);
    let mut buf = vec![C64::new(0.0, 0.0); fft_size];
    for i in 0..num_frames {
        let start = i * hop;
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = if j < window_size {
                C64::new(samples[start + j] * window[j], 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        frames.push(buf.clone());
    }
    Ok(Spectrogram {
        frames,
        window_size,
        fft_size,
        hop,
        sample_rate: audio.sample_rate(),
    })
}

/// Weighted overlap-add inverse; reconstructs `(frames - 1) * hop + window`
/// samples. With the analysis geometry unchanged this is a near-exact
/// round trip.
pub fn istft(spec: &Spectrogram) -> Result<AudioBuffer> {
    validate_geometry(spec.window_size, spec.fft_size, spec.hop)?;
    if spec.frames.is_empty() {
        return Err(Error::arg("empty spectrogram"));
    }
    if spec.frames.iter().any(|f| f.len() != spec.fft_size) {
        return Err(Error::arg("frame length does not match FFT size"));
    }
    let window = hann_window(spec.window_size);
    let out_len = (spec.frames.len() - 1) * spec.hop + spec.window_size;
    let mut acc = vec![0.0f64; out_len];
    let mut envelope = vec![0.0f64; out_len];
    let ifft = plan(spec.fft_size, true);
    let scale = 1.0 / spec.fft_size as f64;

    let mut buf = vec![C64::new(0.0, 0.0); spec.fft_size];
    for (i, frame) in spec.frames.iter().enumerate() {
        buf.copy_from_slice(frame);
        ifft.process(&mut buf);
        let start = i * spec.hop;
        for j in 0..spec.window_size {
            let sample = buf[j].re * scale;
            acc[start + j] += sample * window[j];
            envelope[start + j] += window[j] * window[j];
        }
    }
    let samples: Vec<f64> = acc
        .iter()
        .zip(&envelope)
        .map(|(a, e)| if *e > 1e-300 { a / e } else { 0.0 })
        .collect();
    AudioBuffer::new(samples, spec.sample_rate)
}

/// Smallest padded length at least `len` whose frame grid covers every
/// sample. Used by the sines+noise split so nothing is lost at the tail.
pub(crate) fn padded_length(len: usize, window_size: usize, hop: usize) -> usize {
    if len <= window_size {
        return window_size;
    }
    let blocks = (len - window_size + hop - 1) / hop;
    blocks * hop + window_size
}
