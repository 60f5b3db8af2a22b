//! Feature-driven Hamiltonians and their propagators.
//!
//! Within a segment of `M` frames the Hamiltonian keeps one potential
//! direction and decays exponentially with the frame number,
//! `H_m = exp(-k m) * (omega/2) * sigma . n`. All members of such a family
//! commute, so the time-ordered exponential reduces to the exponential of
//! the cumulative sum.

use crate::error::{Error, Result};
use crate::phon::{direction_operator, BlochVector, DensityMatrix, Operator2, PhonState};
use crate::{C64, DEFAULT_TOL};

/// Potential features of one (decimated) frame, all nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameFeatures {
    pub pitch_salience: f64,
    pub noisiness: f64,
    pub onset_strength: f64,
}

/// Map frame features onto a unit potential direction: salience drives the
/// phonation (z) component, noisiness the turbulence (x) component and onset
/// strength the pulsation (y) component. An all-zero frame falls back to the
/// z axis so the direction is always defined.
pub fn build_potential(features: &FrameFeatures) -> Result<BlochVector> {
    let FrameFeatures {
        pitch_salience,
        noisiness,
        onset_strength,
    } = *features;
    for v in [pitch_salience, noisiness, onset_strength] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::arg(format!("negative or non-finite feature {v}")));
        }
    }
    let n = BlochVector::new(noisiness, onset_strength, pitch_salience);
    if n.norm() <= 0.0 {
        return Ok(BlochVector::new(0.0, 0.0, 1.0));
    }
    n.normalized()
}

/// One evolution segment: a fixed Hermitian shape `s`, damping `k`, energy
/// scale `omega`, `frames` constituent frames of `dt` seconds each.
#[derive(Debug, Clone)]
pub struct HamiltonianSegment {
    pub s: Operator2,
    pub k: f64,
    pub omega: f64,
    pub frames: usize,
    pub dt: f64,
}

impl HamiltonianSegment {
    pub fn from_potential(
        n: &BlochVector,
        omega: f64,
        k: f64,
        frames: usize,
        dt: f64,
    ) -> Result<Self> {
        if frames < 1 {
            return Err(Error::arg("segment needs at least one frame"));
        }
        if !(omega > 0.0) || k < 0.0 || !(dt > 0.0) {
            return Err(Error::arg("omega and dt must be positive, k nonnegative"));
        }
        let s = direction_operator(n)?.scale_re(omega / 2.0);
        Ok(HamiltonianSegment {
            s,
            k,
            omega,
            frames,
            dt,
        })
    }

    /// Per-frame damped Hamiltonians `exp(-k m) S`.
    pub fn operators(&self) -> Vec<Operator2> {
        (0..self.frames)
            .map(|m| self.s.scale_re((-self.k * m as f64).exp()))
            .collect()
    }

    pub fn duration(&self) -> f64 {
        self.frames as f64 * self.dt
    }

    /// Unitary propagator across the whole segment.
    pub fn propagator(&self) -> Result<Operator2> {
        propagator(&self.operators(), self.dt)
    }
}

/// Damped Hamiltonian list for a run of per-frame potentials:
/// `H_m = exp(-k m) (omega/2) sigma . n_m`.
pub fn segment_hamiltonian(
    potentials: &[BlochVector],
    omega: f64,
    k: f64,
) -> Result<Vec<Operator2>> {
    if potentials.is_empty() {
        return Err(Error::arg("empty potential list"));
    }
    if !(omega > 0.0) || k < 0.0 {
        return Err(Error::arg("omega must be positive and k nonnegative"));
    }
    potentials
        .iter()
        .enumerate()
        .map(|(m, n)| {
            Ok(direction_operator(n)?.scale_re(0.5 * omega * (-k * m as f64).exp()))
        })
        .collect()
}

/// `exp(-i sum_m H_m dt)` for a commuting Hermitian family, in closed form:
/// the traceless part rotates, the trace contributes a global phase. An
/// empty list gives the identity.
pub fn propagator(hs: &[Operator2], dt: f64) -> Result<Operator2> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::arg("dt must be positive"));
    }
    let mut acc = Operator2::zero();
    for h in hs {
        if !h.is_hermitian(DEFAULT_TOL) {
            return Err(Error::NotHermitian { tol: DEFAULT_TOL });
        }
        acc = acc + h.scale_re(dt);
    }
    Ok(exp_minus_i(&acc))
}

/// `exp(-i A)` for Hermitian `A` via the Pauli decomposition.
pub fn exp_minus_i(a: &Operator2) -> Operator2 {
    let (a0, v) = a.pauli_components();
    let r = v.norm();
    let phase = C64::new(0.0, -a0).exp();
    if r < 1e-300 {
        return Operator2::identity().scale(phase);
    }
    let (sin_r, cos_r) = r.sin_cos();
    let axis = direction_operator(&v).expect("nonzero rotation axis");
    let rot = Operator2::identity().scale_re(cos_r) + axis.scale(C64::new(0.0, -sin_r));
    rot.scale(phase)
}

/// Apply a unitary to a pure state.
pub fn evolve_pure(psi: &PhonState, u: &Operator2) -> Result<PhonState> {
    if !u.is_unitary(DEFAULT_TOL) {
        return Err(Error::NotUnitary { tol: DEFAULT_TOL });
    }
    let [a, b] = u.apply(psi.coeffs());
    PhonState::normalized(a, b)
}

/// Conjugate a density matrix by a unitary: `U rho U^dagger`. Trace,
/// spectrum and purity are preserved.
pub fn evolve_density(rho: &DensityMatrix, u: &Operator2) -> Result<DensityMatrix> {
    if !u.is_unitary(DEFAULT_TOL) {
        return Err(Error::NotUnitary { tol: DEFAULT_TOL });
    }
    DensityMatrix::new(rho.conjugated_by(u))
}

/// Degree of pitchiness of a pure state: `|<sigma_z>|`, one on the poles and
/// zero on the equator.
pub fn pitchiness(psi: &PhonState) -> f64 {
    let [u, d] = psi.coeffs();
    (u.norm_sqr() - d.norm_sqr()).abs()
}
