use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operator::{check_hermitian, check_projector, Operator2, STRUCT_TOL};
use super::state::PhonState;
use crate::error::{Error, Result};

/// Result of a two-outcome projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// A complete orthogonal pair of rank-1 projectors; the only object a
/// collapse accepts, so incomplete measurements cannot be expressed.
#[derive(Debug, Clone, Copy)]
pub struct ProjectorPair {
    plus: Operator2,
    minus: Operator2,
}

impl ProjectorPair {
    /// Validates that both operators are projectors, they are mutually
    /// orthogonal, and they sum to the identity.
    pub fn new(plus: Operator2, minus: Operator2) -> Result<Self> {
        check_projector(&plus, STRUCT_TOL)?;
        check_projector(&minus, STRUCT_TOL)?;
        let complete = (plus + minus - Operator2::identity()).max_norm() <= STRUCT_TOL;
        let orthogonal = (plus * minus).max_norm() <= STRUCT_TOL;
        if !complete || !orthogonal {
            return Err(Error::IncompletePair);
        }
        Ok(ProjectorPair { plus, minus })
    }

    /// The measurement pair for one of the three vocal axes.
    pub fn for_axis(axis: super::Axis) -> Self {
        use super::state::{basis, projector, BasisState::*};
        let (a, b) = match axis {
            super::Axis::Z => (PitchUp, PitchDown),
            super::Axis::X => (Bright, Dark),
            super::Axis::Y => (Fast, Slow),
        };
        ProjectorPair {
            plus: projector(&basis(a)),
            minus: projector(&basis(b)),
        }
    }

    pub fn plus(&self) -> &Operator2 {
        &self.plus
    }

    pub fn minus(&self) -> &Operator2 {
        &self.minus
    }

    pub fn projector_for(&self, outcome: Outcome) -> &Operator2 {
        match outcome {
            Outcome::Plus => &self.plus,
            Outcome::Minus => &self.minus,
        }
    }
}

/// Born probability `<psi|M|psi>` of the outcome realized by projector `m`.
pub fn measure_probability(psi: &PhonState, m: &Operator2) -> Result<f64> {
    check_projector(m, STRUCT_TOL)?;
    Ok(born_probability(psi, m))
}

/// `<psi|M|psi>` without the projector check, for validated pairs.
fn born_probability(psi: &PhonState, m: &Operator2) -> f64 {
    let [u, d] = psi.coeffs();
    let mv = m.apply([u, d]);
    let p = (u.conj() * mv[0] + d.conj() * mv[1]).re;
    p.clamp(0.0, 1.0)
}

/// Projective collapse of a pure state in a complete basis pair.
///
/// The outcome is drawn with Born probabilities; the post-state is the
/// normalized projection. A branch with probability exactly one is taken
/// without consuming randomness, so eigenstates collapse deterministically.
pub fn collapse<R: Rng + ?Sized>(
    psi: &PhonState,
    pair: &ProjectorPair,
    rng: &mut R,
) -> (Outcome, PhonState) {
    let p_plus = born_probability(psi, pair.plus());
    let outcome = if p_plus >= 1.0 {
        Outcome::Plus
    } else if p_plus <= 0.0 {
        Outcome::Minus
    } else if rng.gen::<f64>() < p_plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    let projected = pair.projector_for(outcome).apply(psi.coeffs());
    let post = PhonState::normalized(projected[0], projected[1])
        .expect("collapse branch has nonzero probability");
    (outcome, post)
}

/// Expectation value `<psi|obs|psi>` of a Hermitian observable.
pub fn expectation(psi: &PhonState, obs: &Operator2) -> Result<f64> {
    check_hermitian(obs, STRUCT_TOL)?;
    let [u, d] = psi.coeffs();
    let ov = obs.apply([u, d]);
    Ok((u.conj() * ov[0] + d.conj() * ov[1]).re)
}

/// Left- and right-hand sides of the uncertainty relation for two Hermitian
/// observables under `psi`: `(da*db, |<[a,b]>|/2)`. The first is always at
/// least the second up to roundoff.
pub fn uncertainty_check(
    psi: &PhonState,
    a: &Operator2,
    b: &Operator2,
) -> Result<(f64, f64)> {
    check_hermitian(a, STRUCT_TOL)?;
    check_hermitian(b, STRUCT_TOL)?;
    let spread = |op: &Operator2| -> f64 {
        let [u, d] = psi.coeffs();
        let ov = op.apply([u, d]);
        let mean = (u.conj() * ov[0] + d.conj() * ov[1]).re;
        let sq = (*op) * (*op);
        let sv = sq.apply([u, d]);
        let mean_sq = (u.conj() * sv[0] + d.conj() * sv[1]).re;
        (mean_sq - mean * mean).max(0.0).sqrt()
    };
    let lhs = spread(a) * spread(b);
    let comm = super::operator::commutator(a, b);
    let [u, d] = psi.coeffs();
    let cv = comm.apply([u, d]);
    let rhs = 0.5 * (u.conj() * cv[0] + d.conj() * cv[1]).norm();
    Ok((lhs, rhs))
}
