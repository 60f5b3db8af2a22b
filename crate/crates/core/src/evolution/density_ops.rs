//! Measurement, collapse and sonification amplitudes for mixed states.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::phon::{DensityMatrix, Operator2, Outcome, ProjectorPair};
use crate::{Error, DEFAULT_TOL};

/// `tr[rho M]`: probability of the outcome realized by projector `m`.
pub fn measure_density(rho: &DensityMatrix, m: &Operator2) -> Result<f64> {
    if !m.is_projector(DEFAULT_TOL) {
        return Err(Error::NotProjector { tol: DEFAULT_TOL });
    }
    Ok(rho.outcome_probability(m))
}

/// Projective collapse of a density matrix in a complete basis pair:
/// outcome by `tr[rho M_i]`, post-state `M_i rho M_i / tr[rho M_i]`.
/// A certain branch is taken without consuming randomness.
pub fn collapse_density<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    pair: &ProjectorPair,
    rng: &mut R,
) -> (Outcome, DensityMatrix) {
    let p_plus = rho.outcome_probability(pair.plus());
    let outcome = if p_plus >= 1.0 {
        Outcome::Plus
    } else if p_plus <= 0.0 {
        Outcome::Minus
    } else if rng.gen::<f64>() < p_plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    let (m, prob) = match outcome {
        Outcome::Plus => (pair.plus(), p_plus),
        Outcome::Minus => (pair.minus(), 1.0 - p_plus),
    };
    let post = rho
        .projected(m, prob)
        .expect("sampled branch has positive probability");
    (outcome, post)
}

/// Sonification amplitudes extracted from a density matrix.
///
/// The z-basis probabilities split into an up tone, a down tone and a noise
/// floor: noise takes the overlap `min(p_u, p_d)`, each tone keeps its
/// excess, so at most one tone is active and
/// `up + down + 2 * noise = p_u + p_d = 1`. The pulse amplitude is the
/// y-basis imbalance `|p_f - p_s|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureAmplitudes {
    pub up: f64,
    pub down: f64,
    pub noise: f64,
    pub pulse: f64,
}

pub fn mixture_amplitudes(rho: &DensityMatrix) -> MixtureAmplitudes {
    use crate::phon::Axis;
    let z = ProjectorPair::for_axis(Axis::Z);
    let y = ProjectorPair::for_axis(Axis::Y);
    let p_u = rho.outcome_probability(z.plus());
    let p_d = rho.outcome_probability(z.minus());
    let p_f = rho.outcome_probability(y.plus());
    let p_s = rho.outcome_probability(y.minus());
    amplitudes_from_probabilities(p_u, p_d, p_f, p_s)
}

/// Same mixing rule from already-known basis probabilities.
pub fn amplitudes_from_probabilities(
    p_u: f64,
    p_d: f64,
    p_f: f64,
    p_s: f64,
) -> MixtureAmplitudes {
    let noise = p_u.min(p_d);
    MixtureAmplitudes {
        up: (p_u - noise).max(0.0),
        down: (p_d - noise).max(0.0),
        noise,
        pulse: (p_f - p_s).abs(),
    }
}
