//! Truncated Fock-space states, operators and quantum-information measures.

mod measures;
mod ops;
mod space;
mod state;

pub use measures::{fidelity, partial_trace, partial_trace_operator};
pub use ops::{
    annihilation, creation, displacement, displacement_matrix, embed, lowering, number, parity_op, LinearOp,
};
pub use space::ModeSpace;
pub use state::{coherent_amplitudes, coherent_state, QState, Repr};
