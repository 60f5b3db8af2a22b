//! The analysis engine: repeated cycles of Hamiltonian evolution,
//! measurement and (decimated) collapse over a feature track.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::density_ops::collapse_density;
use super::hamiltonian::{build_potential, FrameFeatures, HamiltonianSegment};
use super::trace::{EvolutionTrace, ProbabilitySet, StateSnapshot, TraceStep};
use crate::error::{Error, Result};
use crate::features::{decimate, FeatureFrame, FeatureTrack};
use crate::phon::{collapse, Axis, BlochVector, DensityMatrix, PhonState, ProjectorPair};

/// Initial condition of a run: a pure phon or a statistical mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    Pure(PhonState),
    Mixed(DensityMatrix),
}

/// Follower parameters.
///
/// `frame_decimation` is the number of analysis frames per segment; one
/// measurement is recorded per segment and a collapse is applied on every
/// `collapse_decimation`-th measurement. `damping` is the per-frame
/// exponential decay rate of the Hamiltonian inside a segment and `omega`
/// the overall energy scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub frame_decimation: usize,
    pub damping: f64,
    pub pitchiness_threshold: f64,
    pub collapse_decimation: usize,
    pub initial: InitialState,
    pub seed: u64,
    pub omega: f64,
    /// Mixed-state axis rule: measure pulsation (y) instead of phonation (z)
    /// when `min(p_u, p_d)` exceeds this, i.e. when the state is close to
    /// chaotic in the phonation basis.
    pub mixedness_threshold: f64,
    /// Gain on the onset feature before it enters the potential. Zero
    /// reproduces the two-potential (salience + noisiness) setup; one gives
    /// the full three-axis mapping used for vocal material.
    pub onset_weight: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            frame_decimation: 10,
            damping: 0.1,
            pitchiness_threshold: 0.9,
            collapse_decimation: 5,
            initial: InitialState::Pure(crate::phon::basis(crate::phon::BasisState::PitchUp)),
            seed: 0,
            omega: 1.0,
            mixedness_threshold: 0.45,
            onset_weight: 1.0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_decimation < 1 || self.collapse_decimation < 1 {
            return Err(Error::arg("decimation factors must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.pitchiness_threshold) {
            return Err(Error::arg("pitchiness threshold must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mixedness_threshold) {
            return Err(Error::arg("mixedness threshold must be in [0, 1]"));
        }
        if self.damping < 0.0 || !self.damping.is_finite() {
            return Err(Error::arg("damping must be nonnegative"));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::arg("omega must be positive"));
        }
        if self.onset_weight < 0.0 || !self.onset_weight.is_finite() {
            return Err(Error::arg("onset weight must be nonnegative"));
        }
        Ok(())
    }
}

enum PhonProcess {
    Pure(PhonState),
    Mixed(DensityMatrix),
}

impl PhonProcess {
    fn snapshot(&self) -> StateSnapshot {
        match self {
            PhonProcess::Pure(psi) => StateSnapshot::Pure(*psi),
            PhonProcess::Mixed(rho) => StateSnapshot::Mixed(*rho),
        }
    }

    fn probabilities(&self) -> ProbabilitySet {
        self.snapshot().probabilities()
    }
}

/// Run the follower over a feature track.
///
/// Each segment of `frame_decimation` frames evolves the phon under its
/// damped potential Hamiltonian; the axis to measure comes from the degree
/// of pitchiness (pure runs) or the z-basis mixedness (mixed runs). Every
/// segment records a sampled measurement; only every
/// `collapse_decimation`-th measurement also collapses the state.
pub fn run_follower(features: &FeatureTrack, config: &EvolutionConfig) -> Result<EvolutionTrace> {
    config.validate()?;
    if features.is_empty() {
        return Err(Error::arg("empty feature track"));
    }
    if !(features.frame_period > 0.0) {
        return Err(Error::arg("feature track needs a positive frame period"));
    }

    let segments = decimate(features, config.frame_decimation)?;
    let dt = features.frame_period;
    let segment_duration = config.frame_decimation as f64 * dt;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = match config.initial {
        InitialState::Pure(psi) => PhonProcess::Pure(psi),
        InitialState::Mixed(rho) => PhonProcess::Mixed(rho),
    };
    let mut previous_potential: Option<BlochVector> = None;
    let mut steps = Vec::with_capacity(segments.len());

    for (index, frame) in segments.frames.iter().enumerate() {
        let potential = segment_potential(frame, config.onset_weight, &previous_potential)?;
        previous_potential = Some(potential);

        let segment = HamiltonianSegment::from_potential(
            &potential,
            config.omega,
            config.damping,
            config.frame_decimation,
            dt,
        )?;
        let u = segment.propagator()?;
        state = match state {
            PhonProcess::Pure(psi) => {
                PhonProcess::Pure(super::hamiltonian::evolve_pure(&psi, &u)?)
            }
            PhonProcess::Mixed(rho) => {
                PhonProcess::Mixed(super::hamiltonian::evolve_density(&rho, &u)?)
            }
        };

        let probs = state.probabilities();
        let pitchy = (probs.p_u - probs.p_d).abs();
        let axis = match &state {
            PhonProcess::Pure(_) => {
                if pitchy >= config.pitchiness_threshold {
                    Axis::Z
                } else if potential.y > potential.x {
                    // transient potential dominates noisiness: measure pulsation
                    Axis::Y
                } else {
                    Axis::X
                }
            }
            PhonProcess::Mixed(_) => {
                if probs.p_u.min(probs.p_d) > config.mixedness_threshold {
                    Axis::Y
                } else {
                    Axis::Z
                }
            }
        };

        let measurement = index + 1;
        let collapse_now = measurement % config.collapse_decimation == 0;
        let pair = ProjectorPair::for_axis(axis);
        let (outcome, post) = match &state {
            PhonProcess::Pure(psi) => {
                let (o, p) = collapse(psi, &pair, &mut rng);
                (o, PhonProcess::Pure(p))
            }
            PhonProcess::Mixed(rho) => {
                let (o, p) = collapse_density(rho, &pair, &mut rng);
                (o, PhonProcess::Mixed(p))
            }
        };
        if collapse_now {
            state = post;
        }

        let pitch_hz = match axis {
            Axis::Z => {
                let upper = frame.pitch_upper();
                let lower = frame.pitch_lower();
                let chosen = if outcome.value() > 0 { upper } else { lower };
                (chosen > 0.0).then_some(chosen)
            }
            _ => None,
        };

        steps.push(TraceStep {
            time_s: (index + 1) as f64 * segment_duration,
            state: state.snapshot(),
            axis: Some(axis),
            outcome: Some(outcome.value()),
            collapsed: collapse_now,
            pitchiness: pitchy,
            probabilities: state.probabilities(),
            pitch_hz,
        });
    }

    Ok(EvolutionTrace { steps })
}

fn segment_potential(
    frame: &FeatureFrame,
    onset_weight: f64,
    previous: &Option<BlochVector>,
) -> Result<BlochVector> {
    let features = FrameFeatures {
        pitch_salience: frame.pitch1_salience,
        noisiness: frame.noisiness(),
        onset_strength: onset_weight * frame.onset_strength,
    };
    let silent = features.pitch_salience <= 1e-12
        && features.noisiness <= 1e-12
        && features.onset_strength <= 1e-12;
    if silent {
        // silence: hold the previous direction, or rest on the z axis
        return Ok(previous.unwrap_or(BlochVector::new(0.0, 0.0, 1.0)));
    }
    build_potential(&features)
}
