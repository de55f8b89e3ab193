//! Time evolution of the cavity-bus-cavity system.
//!
//! Mode order is `(cavity 1, cavity 2, bus)`. The Hamiltonian is
//! `H = i g (a1 b^dag - a1^dag b) - i g (a2 b^dag - a2^dag b) - delta b^dag b`,
//! giving the amplitude equations `a1' = -g b`, `a2' = g b`,
//! `b' = g (a1 - a2) + i delta b`.

mod evolve;
mod generator;
mod integrate;
mod params;
mod propagator;
mod semiclassical;

pub use evolve::{evolve_hamiltonian, evolve_lindblad, evolve_lindblad_resolved, EvolveConfig, Evolver};
pub use generator::{Envelope, LossChannel, DEFAULT_RAMP};
pub use integrate::{Integrator, Tolerances};
pub use params::{
    DephasingModel, ThreeModeParams, CALIBRATED_GAMMA_PHI, REFERENCE_CAVITY_T1, REFERENCE_G_HZ,
    REFERENCE_KAPPA_B_HZ,
};
pub use propagator::{propagator, propagator_lossy, ModeMatrix};
pub use semiclassical::semiclassical_resonant;

/// Mode index of cavity 1.
pub const CAVITY_1: usize = 0;
/// Mode index of cavity 2.
pub const CAVITY_2: usize = 1;
/// Mode index of the bus.
pub const BUS: usize = 2;
