#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use super::{LinearOp, ModeSpace};
use crate::linalg;
use crate::{tol, CMatrix, CVector, Error, Result, C64};

/// Storage of a [`QState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    /// Unit-norm amplitude vector; the state is `weight |psi><psi|`.
    Pure(CVector),
    /// Density matrix whose trace equals the carried weight.
    Mixed(CMatrix),
}

/// Pure or mixed state on a truncated multimode Fock space.
///
/// Post-selected branches keep their probability as `trace_weight`, so a
/// mixed state from a projection has trace equal to that weight.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    space: ModeSpace,
    repr: Repr,
    trace_weight: f64,
}

impl QState {
    /// Pure state from amplitudes, normalised.
    pub fn pure(space: ModeSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.total() {
            return Err(Error::DimensionMismatch {
                expected: space.total(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Degenerate("state vector has zero or non-finite norm"));
        }
        Ok(Self {
            space,
            repr: Repr::Pure(amplitudes / C64::new(norm, 0.0)),
            trace_weight: 1.0,
        })
    }

    /// Mixed state from a density matrix.
    ///
    /// Checks shape, Hermiticity, finite positive trace and non-negative
    /// diagonal. The eigenvalue floor is checked by [`QState::validate`].
    pub fn mixed(space: ModeSpace, rho: CMatrix) -> Result<Self> {
        let n = space.total();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.nrows(),
            });
        }
        if !linalg::is_hermitian(&rho, tol::HERMITICITY) {
            return Err(Error::Unphysical(format!(
                "density matrix is not Hermitian (deviation {:e})",
                linalg::max_abs_diff(&rho, &rho.adjoint())
            )));
        }
        let tr = rho.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::Unphysical(format!("density matrix trace {tr} is not positive")));
        }
        if let Some(d) = (0..n).map(|i| rho[(i, i)].re).find(|&d| d < tol::EIGEN_FLOOR) {
            return Err(Error::Unphysical(format!("negative diagonal entry {d:e}")));
        }
        let rho = linalg::hermitian_part(&rho);
        Ok(Self {
            space,
            repr: Repr::Mixed(rho),
            trace_weight: tr,
        })
    }

    /// Basis state `|n0, n1, ...>`.
    pub fn basis(space: ModeSpace, occupation: &[usize]) -> Result<Self> {
        let idx = space.index(occupation)?;
        let mut v = CVector::zeros(space.total());
        v[idx] = C64::new(1.0, 0.0);
        Self::pure(space, v)
    }

    pub fn vacuum(space: ModeSpace) -> Self {
        let zeros = alloc::vec![0; space.modes()];
        Self::basis(space, &zeros).expect("vacuum is always in range")
    }

    /// Maximally mixed state on the whole space.
    pub fn maximally_mixed(space: ModeSpace) -> Self {
        let n = space.total();
        let rho = CMatrix::identity(n, n) / C64::new(n as f64, 0.0);
        Self {
            space,
            repr: Repr::Mixed(rho),
            trace_weight: 1.0,
        }
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn trace_weight(&self) -> f64 {
        self.trace_weight
    }

    /// Amplitudes of a pure state.
    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix including the trace weight.
    pub fn density_matrix(&self) -> CMatrix {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint() * C64::new(self.trace_weight, 0.0),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self {
            space: self.space.clone(),
            repr: Repr::Mixed(self.density_matrix()),
            trace_weight: self.trace_weight,
        }
    }

    /// Same state rescaled to unit trace.
    pub fn normalized(&self) -> Self {
        match &self.repr {
            Repr::Pure(v) => Self {
                space: self.space.clone(),
                repr: Repr::Pure(v.clone()),
                trace_weight: 1.0,
            },
            Repr::Mixed(m) => Self {
                space: self.space.clone(),
                repr: Repr::Mixed(m / C64::new(self.trace_weight, 0.0)),
                trace_weight: 1.0,
            },
        }
    }

    /// Same state with its trace weight set to `weight`.
    pub fn with_weight(&self, weight: f64) -> Result<Self> {
        crate::error::require(weight > 0.0 && weight.is_finite(), "weight", weight, "must be positive")?;
        let mut out = self.normalized();
        out.trace_weight = weight;
        if let Repr::Mixed(m) = &mut out.repr {
            *m *= C64::new(weight, 0.0);
        }
        Ok(out)
    }

    /// `<n| rho |n>` for every basis index, including the trace weight.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|a| a.norm_sqr() * self.trace_weight).collect(),
            Repr::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// `Tr(rho O)`, including the trace weight.
    pub fn expectation(&self, op: &LinearOp) -> Result<C64> {
        if op.space() != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.total(),
                found: op.space().total(),
            });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => v.dotc(&(op.matrix() * v)) * self.trace_weight,
            Repr::Mixed(m) => {
                let o = op.matrix();
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        acc += o[(i, j)] * m[(j, i)];
                    }
                }
                acc
            }
        })
    }

    /// Mean photon number of `mode` for the normalised state.
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        self.space.check_mode(mode)?;
        let pops = self.populations();
        let total: f64 = pops.iter().sum();
        let n: f64 = pops
            .iter()
            .enumerate()
            .map(|(i, p)| p * self.space.occupation_of(i, mode) as f64)
            .sum();
        Ok(n / total)
    }

    /// Tensor product of states, in order.
    pub fn product(states: &[QState]) -> Result<Self> {
        let (first, rest) = states
            .split_first()
            .ok_or(Error::InvalidSpace("product of zero states"))?;
        let mut acc = first.clone();
        for s in rest {
            acc = acc.tensor(s)?;
        }
        Ok(acc)
    }

    /// `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let space = self.space.tensor(&other.space)?;
        let weight = self.trace_weight * other.trace_weight;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => {
                let nb = b.len();
                let v = CVector::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb]);
                Self {
                    space,
                    repr: Repr::Pure(v),
                    trace_weight: weight,
                }
            }
            _ => Self {
                space,
                repr: Repr::Mixed(linalg::kron(&self.density_matrix(), &other.density_matrix())),
                trace_weight: weight,
            },
        })
    }

    /// Full invariant check, including the eigenvalue floor for mixed states.
    pub fn validate(&self) -> Result<()> {
        match &self.repr {
            Repr::Pure(v) => {
                if (v.norm() - 1.0).abs() > tol::NORM {
                    return Err(Error::Unphysical(format!("pure state norm {} is not 1", v.norm())));
                }
            }
            Repr::Mixed(m) => {
                if !linalg::is_hermitian(m, tol::HERMITICITY) {
                    return Err(Error::Unphysical("density matrix is not Hermitian".into()));
                }
                let tr = m.trace().re;
                if (tr - self.trace_weight).abs() > tol::TRACE {
                    return Err(Error::Unphysical(format!(
                        "trace {tr} differs from weight {}",
                        self.trace_weight
                    )));
                }
                let min = linalg::min_eigenvalue(m);
                if min < tol::EIGEN_FLOOR {
                    return Err(Error::Unphysical(format!("negative eigenvalue {min:e}")));
                }
            }
        }
        if !(self.trace_weight > 0.0 && self.trace_weight <= 1.0 + tol::TRACE) {
            return Err(Error::Unphysical(format!(
                "trace weight {} outside (0, 1]",
                self.trace_weight
            )));
        }
        Ok(())
    }
}

/// Truncated coherent amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n < dim`,
/// not renormalised.
pub fn coherent_amplitudes(dim: usize, alpha: C64) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v[n] = c;
        c = c * alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    v
}

/// Normalised coherent state `|alpha>` on a single mode of dimension `dim`.
///
/// Fails if more than [`tol::TRUNCATION_DEFICIT`] of the norm lies above
/// the cutoff.
pub fn coherent_state(dim: usize, alpha: C64) -> Result<QState> {
    let space = ModeSpace::single(dim)?;
    let v = coherent_amplitudes(dim, alpha);
    let deficit = 1.0 - v.norm_squared();
    if deficit > tol::TRUNCATION_DEFICIT {
        return Err(Error::Truncation {
            deficit,
            limit: tol::TRUNCATION_DEFICIT,
            dim,
        });
    }
    QState::pure(space, v)
}
