//! Logical encodings in a single cavity: Fock, four-component cat and the
//! lowest-order binomial code, with the photon-loss channel and the
//! cat-size optimisation under parity tracking.
//!
//! Cat codewords have definite photon number modulo 4:
//! `|0_L>` lives on `n = 2, 6, 10, ...` and `|1_L>` on `n = 0, 4, 8, ...`.
//! One photon loss maps them to the odd error words on `n = 1, 5, ...` and
//! `n = 3, 7, ...`.

mod code;
mod loss;
mod optimize;

pub use code::{
    build_code, encode, logical_overlaps, Cardinal, CodeKind, CodeSpace, LogicalCode, Parity, CARDINALS,
};
pub(crate) use code::encode_words;
pub use loss::{loss_channel, loss_channel_on, loss_kraus, parity_branches};
pub use optimize::{
    compare_binomial, corrected_fidelity, corrected_fidelity_over, fit_post_transfer_basis, fit_rotation, optimal_alpha,
    post_transfer_basis, BranchState, ALPHA_SEARCH_RANGE,
};
