use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::density::BlochVector;
use crate::error::{Error, Result};
use crate::{C64, DEFAULT_TOL};

/// Measurement axis in the phonetic space.
///
/// `Z` is phonation, `X` turbulence, `Y` slow myoelastic pulsation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::arg(format!("unknown axis {other:?}"))),
        }
    }
}

/// A 2x2 complex operator: observables, projectors and propagators all live
/// here. Stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Operator2 {
    pub m: [[C64; 2]; 2],
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

impl Operator2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Operator2 {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn from_rows(m: [[C64; 2]; 2]) -> Self {
        Operator2 { m }
    }

    pub fn zero() -> Self {
        Operator2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn identity() -> Self {
        Operator2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn sigma_x() -> Self {
        Operator2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Operator2::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Operator2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// The Hadamard gate with its unitary 1/sqrt(2) normalization.
    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Operator2::new(h, h, h, -h)
    }

    pub fn adjoint(&self) -> Self {
        Operator2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Apply to a raw coefficient pair (no normalization).
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Largest entry-wise absolute value; the matrix max-norm used by all
    /// structural checks.
    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0].conj()).norm() <= tol
            && self.m[0][0].im.abs() <= tol
            && self.m[1][1].im.abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self - Operator2::identity()).max_norm() <= tol
    }

    /// Hermitian and idempotent.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (*self * *self - *self).max_norm() <= tol
    }

    /// Eigenvalues of a Hermitian operator, descending.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let half_tr = self.trace().re / 2.0;
        let det = self.det().re;
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        (half_tr + disc, half_tr - disc)
    }

    /// Decompose a Hermitian operator as `a0*I + a.x*sx + a.y*sy + a.z*sz`.
    /// Returns `(a0, a)` with all components real.
    pub fn pauli_components(&self) -> (f64, BlochVector) {
        let a0 = (self.m[0][0].re + self.m[1][1].re) / 2.0;
        let az = (self.m[0][0].re - self.m[1][1].re) / 2.0;
        let ax = (self.m[0][1] + self.m[1][0]).re / 2.0;
        let ay = (self.m[1][0] - self.m[0][1]).im / 2.0;
        (a0, BlochVector::new(ax, ay, az))
    }
}

impl Add for Operator2 {
    type Output = Operator2;

    fn add(self, rhs: Operator2) -> Operator2 {
        Operator2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Operator2 {
    type Output = Operator2;

    fn sub(self, rhs: Operator2) -> Operator2 {
        Operator2::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl Neg for Operator2 {
    type Output = Operator2;

    fn neg(self) -> Operator2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Operator2 {
    type Output = Operator2;

    fn mul(self, rhs: Operator2) -> Operator2 {
        let a = &self.m;
        let b = &rhs.m;
        Operator2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// The Pauli matrix for a measurement axis.
pub fn pauli(axis: Axis) -> Operator2 {
    match axis {
        Axis::X => Operator2::sigma_x(),
        Axis::Y => Operator2::sigma_y(),
        Axis::Z => Operator2::sigma_z(),
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Operator2, b: &Operator2) -> Operator2 {
    *a * *b - *b * *a
}

/// Observable for a measurement apparatus oriented along `n`:
/// `sigma_n = sx*nx + sy*ny + sz*nz` for the internally normalized direction.
///
/// The length of `n` is deliberately not folded in; callers treat it as an
/// energy scale and multiply where needed.
pub fn direction_operator(n: &BlochVector) -> Result<Operator2> {
    let norm = n.norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::ZeroDirection);
    }
    let (nx, ny, nz) = (n.x / norm, n.y / norm, n.z / norm);
    Ok(Operator2::new(
        C64::new(nz, 0.0),
        C64::new(nx, -ny),
        C64::new(nx, ny),
        C64::new(-nz, 0.0),
    ))
}

pub(crate) fn check_hermitian(op: &Operator2, tol: f64) -> Result<()> {
    if op.is_hermitian(tol) {
        Ok(())
    } else {
        Err(Error::NotHermitian { tol })
    }
}

pub(crate) fn check_projector(op: &Operator2, tol: f64) -> Result<()> {
    if op.is_projector(tol) {
        Ok(())
    } else {
        Err(Error::NotProjector { tol })
    }
}

pub(crate) const STRUCT_TOL: f64 = DEFAULT_TOL;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_matrices_match_definitions() {
        let sz = pauli(Axis::Z);
        assert_eq!(sz.m[0][0], c(1.0, 0.0));
        assert_eq!(sz.m[1][1], c(-1.0, 0.0));
        let sy = pauli(Axis::Y);
        assert_eq!(sy.m[0][1], c(0.0, -1.0));
        assert_eq!(sy.m[1][0], c(0.0, 1.0));
    }

    #[test]
    fn pauli_algebra_identities() {
        let id = Operator2::identity();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let s = pauli(axis);
            assert!((s * s - id).max_norm() < 1e-12, "sigma^2 = I for {axis}");
            assert!(s.is_hermitian(1e-12));
            assert!(s.is_unitary(1e-12));
            let (hi, lo) = s.hermitian_eigenvalues();
            assert!((hi - 1.0).abs() < 1e-12 && (lo + 1.0).abs() < 1e-12);
        }
        // anticommutators vanish for distinct axes
        for (a, b) in [(Axis::X, Axis::Y), (Axis::Y, Axis::Z), (Axis::X, Axis::Z)] {
            let anti = pauli(a) * pauli(b) + pauli(b) * pauli(a);
            assert!(anti.max_norm() < 1e-12);
        }
        // [sx, sy] = 2i sz and cyclic
        let two_i = c(0.0, 2.0);
        let cases = [
            (Axis::X, Axis::Y, Axis::Z),
            (Axis::Y, Axis::Z, Axis::X),
            (Axis::Z, Axis::X, Axis::Y),
        ];
        for (a, b, out) in cases {
            let comm = commutator(&pauli(a), &pauli(b));
            assert!((comm - pauli(out).scale(two_i)).max_norm() < 1e-12);
        }
    }

    #[test]
    fn commutator_of_equal_operators_vanishes() {
        let sz = pauli(Axis::Z);
        assert_eq!(commutator(&sz, &sz).max_norm(), 0.0);
    }

    #[test]
    fn direction_operator_recovers_paulis() {
        let ez = direction_operator(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!((ez - pauli(Axis::Z)).max_norm() < 1e-15);
        let ex = direction_operator(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        assert!((ex - pauli(Axis::X)).max_norm() < 1e-15);
        let ey = direction_operator(&BlochVector::new(0.0, 1.0, 0.0)).unwrap();
        assert!((ey - pauli(Axis::Y)).max_norm() < 1e-15);
    }

    #[test]
    fn direction_operator_normalizes_and_rejects_zero() {
        let long = direction_operator(&BlochVector::new(0.0, 0.0, 7.0)).unwrap();
        assert!((long - pauli(Axis::Z)).max_norm() < 1e-15);
        assert!(direction_operator(&BlochVector::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn pauli_components_round_trip() {
        let op = Operator2::new(c(2.0, 0.0), c(0.3, -0.4), c(0.3, 0.4), c(-1.0, 0.0));
        let (a0, a) = op.pauli_components();
        let rebuilt = Operator2::identity().scale_re(a0)
            + pauli(Axis::X).scale_re(a.x)
            + pauli(Axis::Y).scale_re(a.y)
            + pauli(Axis::Z).scale_re(a.z);
        assert!((rebuilt - op).max_norm() < 1e-12);
        assert!((a0 - 0.5).abs() < 1e-12);
        assert!((a.y - 0.4).abs() < 1e-12);
    }

    #[test]
    fn hadamard_is_unitary_involution() {
        let h = Operator2::hadamard();
        assert!(h.is_unitary(1e-12));
        assert!((h * h - Operator2::identity()).max_norm() < 1e-12);
    }
}
