use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::require;
use crate::fock::{embed, QState};
use crate::{CMatrix, Result, C64};

/// Kraus operators of pure photon loss with energy transmissivity `eta`,
/// `K_l = sum_n sqrt(C(n, l) eta^(n - l) (1 - eta)^l) |n - l><n|` for
/// `l = 0 .. dim - 1`.
pub fn loss_kraus(dim: usize, eta: f64) -> Result<Vec<CMatrix>> {
    require(eta > 0.0 && eta <= 1.0, "eta", eta, "must lie in (0, 1]")?;
    let loss = 1.0 - eta;
    Ok((0..dim)
        .map(|l| {
            let mut k = CMatrix::zeros(dim, dim);
            for n in l..dim {
                let amp = (binomial(n, l) * eta.powi((n - l) as i32) * loss.powi(l as i32)).sqrt();
                k[(n - l, n)] = C64::new(amp, 0.0);
            }
            k
        })
        .collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Photon loss on a single-mode state.
pub fn loss_channel(state: &QState, eta: f64) -> Result<QState> {
    loss_channel_on(state, 0, eta)
}

/// Photon loss on `mode` of a multimode state.
pub fn loss_channel_on(state: &QState, mode: usize, eta: f64) -> Result<QState> {
    let space = state.space();
    let dim = space.dim(mode)?;
    let kraus = loss_kraus(dim, eta)?;
    if eta == 1.0 {
        return Ok(state.clone());
    }
    let rho = state.density_matrix();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for k in &kraus {
        let full = embed(space, mode, k)?.into_matrix();
        out += &full * &rho * full.adjoint();
    }
    QState::mixed(space.clone(), crate::linalg::hermitian_part(&out))
}

/// Splits a single-mode operator into its even- and odd-parity blocks,
/// `(P_e rho P_e, P_o rho P_o)`.
pub fn parity_branches(rho: &CMatrix) -> (CMatrix, CMatrix) {
    let even = CMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        if r % 2 == 0 && c % 2 == 0 {
            rho[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let odd = CMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        if r % 2 == 1 && c % 2 == 1 {
            rho[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (even, odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kraus_set_is_complete() {
        for &eta in &[0.3, 0.84, 1.0] {
            let ks = loss_kraus(12, eta).unwrap();
            let sum = ks.iter().fold(CMatrix::zeros(12, 12), |acc, k| acc + k.adjoint() * k);
            assert!(crate::linalg::max_abs_diff(&sum, &CMatrix::identity(12, 12)) < 1e-12);
        }
        assert!(loss_kraus(4, 0.0).is_err());
    }
}
