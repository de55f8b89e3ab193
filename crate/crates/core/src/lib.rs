//! Simulation core for two bosonic cavities linked by a lossy bus mode.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the physics and the
//! data processing of the link:
//!
//! * [`fock`]: truncated multimode Fock-space states and operators.
//! * [`dynamics`]: the cavity-bus-cavity conversion Hamiltonian, its exact
//!   linear-optics propagator, and Lindblad integration with bus loss,
//!   cavity loss and cavity dephasing.
//! * [`beamsplitter`]: closed-form operating points, efficiencies and the
//!   cable link budget.
//! * [`codes`]: Fock, four-component cat and binomial encodings, the
//!   photon-loss channel and the cat-size optimisation.
//! * [`protocols`]: state transfer with parity tracking, single-photon and
//!   Hong-Ou-Mandel entanglement, and the multi-round retry flow.
//! * [`tomography`]: Wigner forward model and constrained reconstructions.
//!
//! Rates are angular frequencies (rad/s) and times are seconds throughout.
//! The `buslink` crate handles unit conversion at the file/CLI boundary.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod beamsplitter;
pub mod codes;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod protocols;
pub mod tol;
pub mod tomography;

pub use error::{Error, Result};

/// Complex scalar used for all amplitudes.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Converts a cyclic frequency in Hz to an angular rate in rad/s.
pub fn angular(hz: f64) -> f64 {
    2.0 * core::f64::consts::PI * hz
}
