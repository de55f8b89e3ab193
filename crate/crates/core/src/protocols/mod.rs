//! End-to-end link protocols: error-tracked state transfer, single-photon
//! and Hong-Ou-Mandel entanglement, and the multi-round retry flow.
//!
//! Parity readouts are QND projections with optional classical assignment
//! errors. Targets of entangling protocols come from running the same
//! sequence without dissipation, which fixes every pump and beamsplitter
//! phase.

mod entangle;
mod measure;
mod multiround;
mod transfer;

pub use entangle::{
    asymmetric_entangle, entangle_hom, entangle_single_photon, hom_jump_conditioned, max_entangled_fidelity,
    AlternateResult, AlternateScheme, EntanglementResult, JumpConditioned,
};
pub use measure::{
    logical_measure, parity_measure, Branch, LogicalBasis, MeasurementModel, ProtocolOutcome, ProtocolTiming,
    DEFAULT_DECODE_ERROR,
};
pub use multiround::{entangle_hom_multiround, MultiRoundMethod, MultiRoundOptions, MultiRoundOutcome};
pub use transfer::{
    transfer, transfer_report, SimSettings, TransferBases, TransferChannel, TransferOptions, TransferReport, TransferRow,
};
