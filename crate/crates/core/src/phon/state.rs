use std::fmt;

use serde::{Deserialize, Serialize};

use super::operator::Operator2;
use crate::error::{Error, Result};
use crate::{C64, DEFAULT_TOL};

/// A named eigenstate of one of the three vocal observables.
///
/// `PitchUp`/`PitchDown` span phonation (z), `Bright`/`Dark` turbulence (x)
/// and `Fast`/`Slow` myoelastic pulsation (y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisState {
    PitchUp,
    PitchDown,
    Bright,
    Dark,
    Fast,
    Slow,
}

impl BasisState {
    /// Single-letter name used on the command line and in traces.
    pub fn letter(self) -> char {
        match self {
            BasisState::PitchUp => 'u',
            BasisState::PitchDown => 'd',
            BasisState::Bright => 'r',
            BasisState::Dark => 'l',
            BasisState::Fast => 'f',
            BasisState::Slow => 's',
        }
    }
}

impl std::str::FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(BasisState::PitchUp),
            "d" => Ok(BasisState::PitchDown),
            "r" => Ok(BasisState::Bright),
            "l" => Ok(BasisState::Dark),
            "f" => Ok(BasisState::Fast),
            "s" => Ok(BasisState::Slow),
            other => Err(Error::UnknownBasis(other.to_string())),
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A pure phon state `alpha_u |u> + alpha_d |d>`, unit-normalized by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhonState {
    alpha_u: C64,
    alpha_d: C64,
}

impl PhonState {
    /// Build a state from coefficients that must already be normalized
    /// within [`DEFAULT_TOL`].
    pub fn new(alpha_u: C64, alpha_d: C64) -> Result<Self> {
        let norm_sq = alpha_u.norm_sqr() + alpha_d.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        // Snap to exact unit norm so long pipelines do not accumulate drift.
        let scale = 1.0 / norm_sq.sqrt();
        Ok(PhonState {
            alpha_u: alpha_u * scale,
            alpha_d: alpha_d * scale,
        })
    }

    /// Build a state from arbitrary nonzero coefficients, normalizing them.
    pub fn normalized(alpha_u: C64, alpha_d: C64) -> Result<Self> {
        let norm_sq = alpha_u.norm_sqr() + alpha_d.norm_sqr();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = 1.0 / norm_sq.sqrt();
        Ok(PhonState {
            alpha_u: alpha_u * scale,
            alpha_d: alpha_d * scale,
        })
    }

    pub fn basis(b: BasisState) -> Self {
        basis(b)
    }

    pub fn alpha_u(&self) -> C64 {
        self.alpha_u
    }

    pub fn alpha_d(&self) -> C64 {
        self.alpha_d
    }

    pub fn coeffs(&self) -> [C64; 2] {
        [self.alpha_u, self.alpha_d]
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &PhonState) -> C64 {
        self.alpha_u.conj() * other.alpha_u + self.alpha_d.conj() * other.alpha_d
    }

    /// Equality up to a global phase: `|<self|other>| = 1` within `tol`.
    pub fn coincides_with(&self, other: &PhonState, tol: f64) -> bool {
        (self.overlap(other).norm() - 1.0).abs() <= tol
    }

    pub fn norm(&self) -> f64 {
        (self.alpha_u.norm_sqr() + self.alpha_d.norm_sqr()).sqrt()
    }
}

/// The exact eigenstate for a basis name.
pub fn basis(b: BasisState) -> PhonState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (alpha_u, alpha_d) = match b {
        BasisState::PitchUp => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        BasisState::PitchDown => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        BasisState::Bright => (C64::new(h, 0.0), C64::new(h, 0.0)),
        BasisState::Dark => (C64::new(h, 0.0), C64::new(-h, 0.0)),
        BasisState::Fast => (C64::new(h, 0.0), C64::new(0.0, h)),
        BasisState::Slow => (C64::new(h, 0.0), C64::new(0.0, -h)),
    };
    PhonState { alpha_u, alpha_d }
}

/// Rank-1 projector `|psi><psi|` onto a state.
pub fn projector(state: &PhonState) -> Operator2 {
    let [u, d] = state.coeffs();
    Operator2::new(
        u * u.conj(),
        u * d.conj(),
        d * u.conj(),
        d * d.conj(),
    )
}

/// Eigenstates of the planar observable tilted by `theta` from z toward x:
/// first for eigenvalue +1, second for -1. They are orthogonal.
pub fn planar_eigenstates(theta: f64) -> (PhonState, PhonState) {
    let (s, c) = (theta / 2.0).sin_cos();
    let plus = PhonState {
        alpha_u: C64::new(c, 0.0),
        alpha_d: C64::new(s, 0.0),
    };
    let minus = PhonState {
        alpha_u: C64::new(-s, 0.0),
        alpha_d: C64::new(c, 0.0),
    };
    (plus, minus)
}

/// Apply the Hadamard gate; swaps the turbulence basis into the phonation
/// basis (`|r> -> |u>`, `|l> -> |d>`) and back.
pub fn hadamard(psi: &PhonState) -> PhonState {
    let [u, d] = Operator2::hadamard().apply(psi.coeffs());
    // Unitary application preserves the norm; renormalize to kill roundoff.
    PhonState::normalized(u, d).expect("hadamard preserves norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn computational_basis_coordinates() {
        let u = basis(BasisState::PitchUp);
        assert_eq!(u.alpha_u(), c(1.0, 0.0));
        assert_eq!(u.alpha_d(), c(0.0, 0.0));
        let d = basis(BasisState::PitchDown);
        assert_eq!(d.alpha_u(), c(0.0, 0.0));
        assert_eq!(d.alpha_d(), c(1.0, 0.0));
    }

    #[test]
    fn equatorial_basis_coordinates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = basis(BasisState::Bright);
        assert!((r.alpha_u() - c(h, 0.0)).norm() < 1e-15);
        assert!((r.alpha_d() - c(h, 0.0)).norm() < 1e-15);
        let f = basis(BasisState::Fast);
        assert!((f.alpha_u() - c(h, 0.0)).norm() < 1e-15);
        assert!((f.alpha_d() - c(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn basis_pairs_are_orthonormal() {
        use BasisState::*;
        for (a, b) in [(PitchUp, PitchDown), (Bright, Dark), (Fast, Slow)] {
            let (sa, sb) = (basis(a), basis(b));
            assert!(sa.overlap(&sb).norm() < 1e-15);
            assert!((sa.norm() - 1.0).abs() < 1e-15);
            assert!((sb.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_name_parsing() {
        assert_eq!(BasisState::from_str("u").unwrap(), BasisState::PitchUp);
        assert_eq!(BasisState::from_str("s").unwrap(), BasisState::Slow);
        assert!(BasisState::from_str("q").is_err());
    }

    #[test]
    fn constructor_rejects_non_normalized() {
        assert!(PhonState::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(PhonState::normalized(c(0.0, 0.0), c(0.0, 0.0)).is_err());
        let s = PhonState::normalized(c(3.0, 0.0), c(4.0, 0.0)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((s.alpha_u().re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn projector_matrices_match_basis_projectors() {
        let mu = projector(&basis(BasisState::PitchUp));
        assert!((mu.m[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(mu.m[0][1].norm() < 1e-15 && mu.m[1][1].norm() < 1e-15);

        let mr = projector(&basis(BasisState::Bright));
        for row in mr.m {
            for entry in row {
                assert!((entry - c(0.5, 0.0)).norm() < 1e-15);
            }
        }

        let mf = projector(&basis(BasisState::Fast));
        assert!((mf.m[0][1] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((mf.m[1][0] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn projectors_are_projectors_and_complete() {
        use BasisState::*;
        for (a, b) in [(PitchUp, PitchDown), (Bright, Dark), (Fast, Slow)] {
            let (pa, pb) = (projector(&basis(a)), projector(&basis(b)));
            assert!(pa.is_projector(1e-12));
            assert!(pb.is_projector(1e-12));
            let sum = pa + pb;
            assert!((sum - Operator2::identity()).max_norm() < 1e-12);
        }
    }

    #[test]
    fn planar_eigenstates_limits_and_orthogonality() {
        let (p0, m0) = planar_eigenstates(0.0);
        assert!(p0.coincides_with(&basis(BasisState::PitchUp), 1e-12));
        assert!(m0.coincides_with(&basis(BasisState::PitchDown), 1e-12));

        let (p, m) = planar_eigenstates(std::f64::consts::FRAC_PI_2);
        assert!(p.coincides_with(&basis(BasisState::Bright), 1e-12));
        assert!(m.coincides_with(&basis(BasisState::Dark), 1e-12));

        for k in 0..17 {
            let theta = k as f64 * 0.411 - 3.0;
            let (a, b) = planar_eigenstates(theta);
            assert!(a.overlap(&b).norm() < 1e-12);
        }
    }

    #[test]
    fn planar_eigenstates_diagonalize_tilted_observable() {
        use super::super::operator::{direction_operator, Operator2 as Op};
        use crate::phon::BlochVector;
        let theta = 1.234_f64;
        let n = BlochVector::new(theta.sin(), 0.0, theta.cos());
        let sn = direction_operator(&n).unwrap();
        let (plus, minus) = planar_eigenstates(theta);
        let applied = sn.apply(plus.coeffs());
        assert!((applied[0] - plus.alpha_u()).norm() < 1e-12);
        assert!((applied[1] - plus.alpha_d()).norm() < 1e-12);
        let applied = sn.apply(minus.coeffs());
        assert!((applied[0] + minus.alpha_u()).norm() < 1e-12);
        assert!((applied[1] + minus.alpha_d()).norm() < 1e-12);
        let _ = Op::identity();
    }

    #[test]
    fn hadamard_swaps_turbulence_and_phonation() {
        let r = basis(BasisState::Bright);
        assert!(hadamard(&r).coincides_with(&basis(BasisState::PitchUp), 1e-12));
        let l = basis(BasisState::Dark);
        assert!(hadamard(&l).coincides_with(&basis(BasisState::PitchDown), 1e-12));
        let f = basis(BasisState::Fast);
        assert!(hadamard(&hadamard(&f)).coincides_with(&f, 1e-12));
    }
}
