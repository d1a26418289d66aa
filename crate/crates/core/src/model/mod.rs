//! Hamiltonians, environments, rates and jump operators.

pub mod hamiltonian;
pub mod jumps;
pub mod rates;
pub mod refrigerator;
pub mod spin_star;

pub use hamiltonian::{build_three_qubit_hamiltonian, build_two_qubit_hamiltonian, TwoQubitVariant};
pub use jumps::{
    tabulated_jump_set, derive_jump_operators, equal_up_to_phase, noise_jump_set, Channel, JumpTerm, NoiseAxis,
    NoiseModel,
};
pub use rates::{decay_rate, MarkovianEnv, SpectralDensity, ZeroFrequencyPolicy};
pub use refrigerator::{NoiseSpec, QubitEnv, QubitSpec, RefrigeratorModel};
pub use spin_star::{spin_star_hamiltonian, spin_star_interaction, FiniteSpinEnv};
