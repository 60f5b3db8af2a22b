//! The phon formalism: a two-level quantum state over vocal primitives.
//!
//! The computational basis spans pitch-up `|u>` and pitch-down `|d>`
//! phonation; the x axis carries bright/dark turbulence `|r>`, `|l>` and the
//! y axis fast/slow myoelastic pulsation `|f>`, `|s>`. Everything here is
//! exact 2x2 complex linear algebra: no allocation, no global state, and
//! every value type is `Copy`.

mod density;
mod measure;
mod operator;
mod state;

pub use density::{density_from_ensemble, from_bloch, BlochVector, DensityMatrix};
pub use measure::{
    collapse, expectation, measure_probability, uncertainty_check, Outcome, ProjectorPair,
};
pub use operator::{commutator, direction_operator, pauli, Axis, Operator2};
pub use state::{basis, hadamard, planar_eigenstates, projector, BasisState, PhonState};
