//! Additive note rendering for test scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scene::soft_clip;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// One note of a score fragment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoteEvent {
    pub onset_beats: f64,
    pub duration_beats: f64,
    /// MIDI note number; fractional values detune.
    pub pitch: f64,
    /// Linear gain in [0, 1].
    pub velocity: f64,
}

/// Additive timbre: `harmonics` partials with 1/h amplitudes under an
/// exponential decay, plus an optional broadband key click at the onset.
#[derive(Debug, Clone, Copy)]
pub struct Timbre {
    pub harmonics: usize,
    /// Exponential amplitude decay rate in 1/s.
    pub decay: f64,
    pub key_click: bool,
}

impl Default for Timbre {
    fn default() -> Self {
        Timbre {
            harmonics: 6,
            decay: 3.0,
            key_click: true,
        }
    }
}

pub fn midi_to_hz(midi: f64) -> f64 {
    440.0 * 2f64.powf((midi - 69.0) / 12.0)
}

const ATTACK_S: f64 = 0.005;
const RELEASE_S: f64 = 0.010;
const CLICK_S: f64 = 0.010;
const CLICK_GAIN: f64 = 0.08;
const CLICK_SEED: u64 = 0x5eed_c11c;

/// Render a note list at a tempo. The buffer length is exactly the end of
/// the last note; the mix is peak-limited to 0.9.
pub fn render_notes(
    notes: &[NoteEvent],
    bpm: f64,
    sample_rate: u32,
    timbre: &Timbre,
) -> Result<AudioBuffer> {
    if notes.is_empty() {
        return Err(Error::arg("empty note list"));
    }
    if !(bpm > 0.0) || !bpm.is_finite() {
        return Err(Error::arg("bpm must be positive"));
    }
    if timbre.harmonics == 0 {
        return Err(Error::arg("timbre needs at least one harmonic"));
    }
    let beat_s = 60.0 / bpm;
    let mut end_beats = 0.0f64;
    for n in notes {
        if n.onset_beats < 0.0 || !(n.duration_beats > 0.0) {
            return Err(Error::arg("notes need nonnegative onset and positive duration"));
        }
        if !(0.0..=1.0).contains(&n.velocity) {
            return Err(Error::arg("velocity must be in [0, 1]"));
        }
        end_beats = end_beats.max(n.onset_beats + n.duration_beats);
    }
    let sr = sample_rate as f64;
    let total = (end_beats * beat_s * sr).round() as usize;
    let mut mix = vec![0.0f64; total];

    for (index, note) in notes.iter().enumerate() {
        if note.velocity == 0.0 {
            continue;
        }
        let f0 = midi_to_hz(note.pitch);
        let start = (note.onset_beats * beat_s * sr).round() as usize;
        let dur_s = note.duration_beats * beat_s;
        let len = ((dur_s * sr).round() as usize).min(total.saturating_sub(start));

        let harmonics: Vec<(f64, f64)> = (1..=timbre.harmonics)
            .map(|h| (h as f64 * f0, 1.0 / h as f64))
            .filter(|(f, _)| *f < 0.45 * sr)
            .collect();
        if harmonics.is_empty() {
            continue;
        }
        let gain_norm: f64 = harmonics.iter().map(|(_, a)| a).sum();

        for n in 0..len {
            let t = n as f64 / sr;
            let attack = (t / ATTACK_S).min(1.0);
            let release = ((dur_s - t) / RELEASE_S).clamp(0.0, 1.0);
            let env = attack * release * (-timbre.decay * t).exp();
            let mut sample = 0.0;
            for (f, a) in &harmonics {
                sample += a * (2.0 * std::f64::consts::PI * f * t).sin();
            }
            mix[start + n] += note.velocity * env * sample / gain_norm;
        }

        if timbre.key_click {
            let mut rng = ChaCha8Rng::seed_from_u64(CLICK_SEED.wrapping_add(index as u64));
            let click_len = ((CLICK_S * sr) as usize).min(len);
            for n in 0..click_len {
                let fade = 1.0 - n as f64 / click_len.max(1) as f64;
                mix[start + n] +=
                    CLICK_GAIN * note.velocity * fade * rng.gen_range(-1.0..1.0);
            }
        }
    }

    let peak = mix.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    if peak > 0.9 {
        let scale = 0.9 / peak;
        for s in &mut mix {
            *s *= scale;
        }
    }
    for s in &mut mix {
        *s = soft_clip(*s);
    }
    AudioBuffer::new(mix, sample_rate)
}

/// The opening of the D-minor organ fugue shipped as note data: a repeated
/// upper A against a stepwise lower line, followed by an ascending fragment.
pub fn fugue_incipit() -> Vec<NoteEvent> {
    serde_json::from_str(include_str!("../../data/bwv565_fugue_incipit.json"))
        .expect("embedded note list parses")
}

/// Parse a note list from JSON text (an array of note events).
pub fn notes_from_json(json: &str) -> Result<Vec<NoteEvent>> {
    Ok(serde_json::from_str(json)?)
}
