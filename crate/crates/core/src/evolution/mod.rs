//! Time evolution of the phon: feature-driven Hamiltonians, unitary
//! propagation of pure and mixed states, the measurement/collapse follower
//! loop and its recorded traces.

mod density_ops;
mod follower;
mod hamiltonian;
mod trace;

pub use density_ops::{
    amplitudes_from_probabilities, collapse_density, measure_density, mixture_amplitudes,
    MixtureAmplitudes,
};
pub use follower::{run_follower, EvolutionConfig, InitialState};
pub use hamiltonian::{
    build_potential, evolve_density, evolve_pure, exp_minus_i, pitchiness, propagator,
    segment_hamiltonian, FrameFeatures, HamiltonianSegment,
};
pub use trace::{EvolutionTrace, ProbabilitySet, StateSnapshot, TraceStep};
