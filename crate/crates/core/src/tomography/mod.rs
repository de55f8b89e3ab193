//! Phase-space tomography of single cavities and the conditional two-qubit
//! reconstruction used for entangled states.
//!
//! `W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dagger]` with `P` the photon
//! number parity. Logical `|+z>` is `codeword_0` of the code in use, which
//! is `|0>` for the Fock code.

mod mle;
mod two_qubit;
mod wigner;

pub use mle::{mle_reconstruct, mle_reconstruct_with, MleOptions, MleReport};
pub use two_qubit::{
    concurrence, logical_density, pauli_expectations, two_qubit_reconstruct, ConditionalTomogram, TwoQubitResult,
    TwoQubitTomogramSet, PAULI_LABELS,
};
pub use wigner::{normalize_wigner, parity_kernel, wigner, GridSpec, WignerGrid};
