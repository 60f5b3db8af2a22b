use serde::{Deserialize, Serialize};

use super::operator::{pauli, Axis, Operator2};
use super::state::{projector, PhonState};
use crate::error::{Error, Result};
use crate::{C64, DEFAULT_TOL};

/// A real 3-vector in the phonetic space: Hamiltonian potentials and Bloch
/// coordinates of states both live here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(BlochVector::new(self.x / n, self.y / n, self.z / n))
    }
}

/// A 2x2 density matrix: Hermitian, unit trace, positive semidefinite.
/// Describes both pure states (on the Bloch sphere) and statistical
/// mixtures (inside it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    m: Operator2,
}

impl DensityMatrix {
    /// Validate and wrap a raw operator. Hermiticity, unit trace and
    /// positivity are all checked within [`DEFAULT_TOL`].
    pub fn new(m: Operator2) -> Result<Self> {
        if !m.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidDensity(format!("trace = {tr}, expected 1")));
        }
        let (_, lo) = m.hermitian_eigenvalues();
        if lo < -DEFAULT_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lo}"
            )));
        }
        Ok(DensityMatrix { m })
    }

    /// `|psi><psi|` for a pure state.
    pub fn from_pure(psi: &PhonState) -> Self {
        DensityMatrix {
            m: projector(psi),
        }
    }

    /// Statistical mixture `sum_j p_j |psi_j><psi_j|`. Weights must be
    /// nonnegative and sum to one.
    pub fn from_ensemble(pairs: &[(f64, PhonState)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidEnsemble("empty ensemble".into()));
        }
        let mut total = 0.0;
        let mut acc = Operator2::zero();
        for (p, psi) in pairs {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidEnsemble(format!("weight {p}")));
            }
            total += p;
            acc = acc + projector(psi).scale_re(*p);
        }
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        DensityMatrix::new(acc)
    }

    /// Diagonal mixture of the computational basis with pitch-up weight `p`.
    pub fn diagonal_mixture(p_up: f64) -> Result<Self> {
        use super::state::{basis, BasisState};
        DensityMatrix::from_ensemble(&[
            (p_up, basis(BasisState::PitchUp)),
            (1.0 - p_up, basis(BasisState::PitchDown)),
        ])
    }

    /// The completely chaotic state at the Bloch-sphere origin.
    pub fn chaotic() -> Self {
        DensityMatrix {
            m: Operator2::identity().scale_re(0.5),
        }
    }

    pub fn operator(&self) -> &Operator2 {
        &self.m
    }

    /// `tr[rho^2]`: 1 for pure states, 1/2 for the chaotic state.
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Bloch coordinates `n_a = tr[rho sigma_a]`; on the sphere surface for
    /// pure states, strictly inside for mixtures.
    pub fn bloch(&self) -> BlochVector {
        BlochVector::new(
            (self.m * pauli(Axis::X)).trace().re,
            (self.m * pauli(Axis::Y)).trace().re,
            (self.m * pauli(Axis::Z)).trace().re,
        )
    }

    /// Probability of the outcome realized by projector `m`: `tr[rho M]`.
    pub(crate) fn outcome_probability(&self, m: &Operator2) -> f64 {
        ((self.m) * (*m)).trace().re.clamp(0.0, 1.0)
    }

    /// Conjugate by an operator without validation; callers check unitarity.
    pub(crate) fn conjugated_by(&self, u: &Operator2) -> Operator2 {
        *u * self.m * u.adjoint()
    }

    /// Project-and-renormalize: `M rho M / tr[rho M]`.
    pub(crate) fn projected(&self, m: &Operator2, prob: f64) -> Result<Self> {
        if prob <= 0.0 {
            return Err(Error::InvalidDensity(
                "cannot condition on a zero-probability outcome".into(),
            ));
        }
        let num = (*m) * self.m * (*m);
        DensityMatrix::new(num.scale_re(1.0 / prob))
    }
}

/// Free-function form of [`DensityMatrix::from_ensemble`].
pub fn density_from_ensemble(pairs: &[(f64, PhonState)]) -> Result<DensityMatrix> {
    DensityMatrix::from_ensemble(pairs)
}

/// Reconstruct the operator `1/2 (I + n . sigma)` from Bloch coordinates.
pub fn from_bloch(n: &BlochVector) -> Result<DensityMatrix> {
    let m = Operator2::identity()
        + pauli(Axis::X).scale_re(n.x)
        + pauli(Axis::Y).scale_re(n.y)
        + pauli(Axis::Z).scale_re(n.z);
    DensityMatrix::new(m.scale_re(0.5))
}

impl DensityMatrix {
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m.m[row][col]
    }
}
