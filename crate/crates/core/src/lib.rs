//! Quantum vocal theory of sound.
//!
//! A sound is described by a two-level quantum state (a *phon*) whose three
//! measurement axes carry vocal meaning: phonation (z, pitch-up/pitch-down),
//! turbulence (x, bright/dark noise) and slow myoelastic pulsation (y,
//! fast/slow). Audio features extracted with a short-time Fourier transform
//! drive a Hamiltonian that evolves the phon; projective measurements and
//! collapses turn the evolution into an auditory-stream follower, and the
//! density matrix of a mixed phon can be sonified back into audio.
//!
//! Module map:
//! - [`phon`] — exact 2x2 complex formalism: states, observables, projectors,
//!   measurement, density matrices, gates.
//! - [`evolution`] — feature-driven Hamiltonians, propagators, the
//!   measure/collapse follower loop, mixed-state rules and traces.
//! - [`features`] — STFT/ISTFT, pitch-salience tracking, band noise energy,
//!   onset strength, decimation.
//! - [`sines_noise`] — audio-domain measurement through the sines+noise
//!   model, including the order-sensitivity experiment.
//! - [`synth`] — test-scene generators and trace sonification.
//! - [`audio`] / [`wav`] — sample buffers and WAV file I/O.

pub mod audio;
pub mod error;
pub mod evolution;
pub mod features;
pub mod phon;
pub mod sines_noise;
pub mod synth;
pub mod wav;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Default absolute tolerance for structural checks (normalization,
/// hermiticity, unitarity, trace conditions).
pub const DEFAULT_TOL: f64 = 1e-9;
