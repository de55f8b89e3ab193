#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::{ModeSpace, QState, Repr};
use crate::linalg;
use crate::{CMatrix, Error, Result, C64};

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` between the
/// normalised versions of two states, clamped to `[0, 1]`.
pub fn fidelity(rho: &QState, sigma: &QState) -> Result<f64> {
    if rho.space() != sigma.space() {
        return Err(Error::DimensionMismatch {
            expected: rho.space().total(),
            found: sigma.space().total(),
        });
    }
    let a = rho.normalized();
    let b = sigma.normalized();
    let f = match (a.repr(), b.repr()) {
        (Repr::Pure(u), Repr::Pure(v)) => u.dotc(v).norm_sqr(),
        (Repr::Pure(u), Repr::Mixed(m)) | (Repr::Mixed(m), Repr::Pure(u)) => u.dotc(&(m * u)).re,
        (Repr::Mixed(ma), Repr::Mixed(mb)) => {
            let s = linalg::sqrt_psd(ma);
            let inner = &s * mb * &s;
            let (vals, _) = linalg::eigh(&inner);
            let root: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
            root * root
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Reduced state on the modes in `keep`, which must be strictly increasing.
pub fn partial_trace(state: &QState, keep: &[usize]) -> Result<QState> {
    let space = state.space();
    let kept_space = space.subspace(check_keep(space, keep)?)?;
    if kept_space == *space {
        return Ok(state.clone());
    }
    let reduced = match state.repr() {
        Repr::Pure(v) => {
            let (split, dk, traced_dim) = split_indices(space, keep);
            let mut psi = CMatrix::zeros(dk, traced_dim);
            for (i, &(k, t)) in split.iter().enumerate() {
                psi[(k, t)] = v[i];
            }
            &psi * psi.adjoint() * C64::new(state.trace_weight(), 0.0)
        }
        Repr::Mixed(m) => partial_trace_operator(space, m, keep)?,
    };
    reduced_state(kept_space, reduced, state.trace_weight())
}

/// Partial trace of an arbitrary operator on `space`, keeping `keep`.
pub fn partial_trace_operator(space: &ModeSpace, m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    check_keep(space, keep)?;
    if m.nrows() != space.total() || m.ncols() != space.total() {
        return Err(Error::DimensionMismatch {
            expected: space.total(),
            found: m.nrows().max(m.ncols()),
        });
    }
    let (split, dk, traced_dim) = split_indices(space, keep);
    let mut groups: Vec<Vec<(usize, usize)>> = alloc::vec![Vec::new(); traced_dim];
    for (i, &(k, t)) in split.iter().enumerate() {
        groups[t].push((k, i));
    }
    let mut out = CMatrix::zeros(dk, dk);
    for group in &groups {
        for &(kr, ir) in group {
            for &(kc, ic) in group {
                out[(kr, kc)] += m[(ir, ic)];
            }
        }
    }
    Ok(out)
}

fn check_keep<'a>(space: &ModeSpace, keep: &'a [usize]) -> Result<&'a [usize]> {
    if keep.is_empty() {
        return Err(Error::InvalidSpace("partial trace must keep at least one mode"));
    }
    for &m in keep {
        space.check_mode(m)?;
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpace("kept modes must be strictly increasing"));
    }
    Ok(keep)
}

/// Every full index as (kept index, traced index), with both dimensions.
fn split_indices(space: &ModeSpace, keep: &[usize]) -> (Vec<(usize, usize)>, usize, usize) {
    let traced: Vec<usize> = (0..space.modes()).filter(|m| !keep.contains(m)).collect();
    let dk: usize = keep.iter().map(|&m| space.dims()[m]).product();
    let dt: usize = traced.iter().map(|&m| space.dims()[m]).product();
    let split = (0..space.total())
        .map(|i| {
            let k = keep.iter().fold(0, |acc, &m| acc * space.dims()[m] + space.occupation_of(i, m));
            let t = traced.iter().fold(0, |acc, &m| acc * space.dims()[m] + space.occupation_of(i, m));
            (k, t)
        })
        .collect();
    (split, dk, dt)
}

fn reduced_state(space: ModeSpace, rho: CMatrix, weight: f64) -> Result<QState> {
    let rho = linalg::hermitian_part(&rho);
    let tr = rho.trace().re;
    let out = QState::mixed(space, rho)?;
    debug_assert!((tr - weight).abs() < 1e-6 * weight.max(1.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use crate::CVector;

    #[test]
    fn fidelity_examples() {
        let s = ModeSpace::single(20).unwrap();
        let zero = QState::vacuum(s.clone());
        let one = QState::basis(s.clone(), &[1]).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let alpha = coherent_state(20, C64::new(1.0, 0.0)).unwrap();
        assert!((fidelity(&zero, &alpha).unwrap() - (-1.0f64).exp()).abs() < 1e-9);
        let mixed = fidelity(&zero.to_mixed(), &alpha.to_mixed()).unwrap();
        assert!((mixed - (-1.0f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = QState::vacuum(ModeSpace::single(3).unwrap());
        let b = QState::vacuum(ModeSpace::single(4).unwrap());
        assert!(fidelity(&a, &b).is_err());
    }

    #[test]
    fn trace_out_second_mode() {
        let s = ModeSpace::new(&[2, 2]).unwrap();
        let st = QState::basis(s.clone(), &[0, 1]).unwrap();
        let r = partial_trace(&st, &[0]).unwrap();
        let m = r.density_matrix();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15 && m[(1, 1)].norm() < 1e-15);

        let mut v = CVector::zeros(4);
        v[s.index(&[0, 1]).unwrap()] = C64::new(1.0, 0.0);
        v[s.index(&[1, 0]).unwrap()] = C64::new(1.0, 0.0);
        let bell = QState::pure(s, v).unwrap();
        for keep in [[0usize], [1]] {
            let r = partial_trace(&bell, &keep).unwrap().density_matrix();
            assert!((r[(0, 0)].re - 0.5).abs() < 1e-15 && (r[(1, 1)].re - 0.5).abs() < 1e-15);
            assert!(r[(0, 1)].norm() < 1e-15);
        }
    }

    #[test]
    fn invalid_keep_sets() {
        let s = ModeSpace::new(&[2, 3]).unwrap();
        let st = QState::vacuum(s);
        assert!(partial_trace(&st, &[]).is_err());
        assert!(partial_trace(&st, &[2]).is_err());
        assert!(partial_trace(&st, &[1, 0]).is_err());
    }
}
