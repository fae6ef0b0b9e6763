//! States, observables, superoperators, random ensembles and spectral analysis.

mod observable;
mod random;
mod spectral;
mod state;
mod superop;

pub use observable::{expectation, Observable};
pub use random::{ginibre, haar_state, haar_unitary, random_cptp, HaarAngles};
pub use spectral::{spectral_decompose, spectral_decompose_unitary, SpectralData, MAX_CONDITION};
pub use state::QuantumState;
pub use superop::{
    apply, mix_superops, root_unitary, tensor_superop, unitary_superop, Superoperator,
    UNITARY_TOL,
};
