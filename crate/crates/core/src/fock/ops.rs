#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::ModeSpace;
use crate::linalg;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Dense operator on a [`ModeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp {
    space: ModeSpace,
    matrix: CMatrix,
}

impl LinearOp {
    pub fn new(space: ModeSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &ModeSpace) -> Self {
        let n = space.total();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Operator product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.same_space(rhs)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_space(rhs)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.space.total() {
            return Err(Error::DimensionMismatch {
                expected: self.space.total(),
                found: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }

    fn same_space(&self, rhs: &Self) -> Result<()> {
        if self.space != rhs.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.total(),
                found: rhs.space.total(),
            });
        }
        Ok(())
    }
}

/// Lifts a single-mode matrix to act on `mode`, identity on the others.
pub fn embed(space: &ModeSpace, mode: usize, local: &CMatrix) -> Result<LinearOp> {
    let d = space.dim(mode)?;
    if local.nrows() != d || local.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: local.nrows(),
        });
    }
    let n = space.total();
    let stride = space.stride(mode);
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    for (c, col) in local.column_iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            if v != C64::new(0.0, 0.0) {
                entries.push((r, c, v));
            }
        }
    }
    let mut m = CMatrix::zeros(n, n);
    for idx in 0..n {
        let occ = space.occupation_of(idx, mode);
        let base = idx - occ * stride;
        for &(r, c, v) in &entries {
            if c == occ {
                m[(base + r * stride, idx)] += v;
            }
        }
    }
    LinearOp::new(space.clone(), m)
}

/// Single-mode lowering matrix of dimension `dim`.
pub fn lowering(dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

/// Annihilation operator of `mode`.
pub fn annihilation(space: &ModeSpace, mode: usize) -> Result<LinearOp> {
    let d = space.dim(mode)?;
    embed(space, mode, &lowering(d))
}

/// Creation operator of `mode`.
pub fn creation(space: &ModeSpace, mode: usize) -> Result<LinearOp> {
    Ok(annihilation(space, mode)?.dagger())
}

/// Number operator of `mode`.
pub fn number(space: &ModeSpace, mode: usize) -> Result<LinearOp> {
    let d = space.dim(mode)?;
    let local = CMatrix::from_fn(d, d, |r, c| if r == c { C64::new(r as f64, 0.0) } else { C64::new(0.0, 0.0) });
    embed(space, mode, &local)
}

/// Photon-number parity `(-1)^n` of `mode`.
pub fn parity_op(space: &ModeSpace, mode: usize) -> Result<LinearOp> {
    let d = space.dim(mode)?;
    let local = CMatrix::from_fn(d, d, |r, c| {
        if r != c {
            C64::new(0.0, 0.0)
        } else if r % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    embed(space, mode, &local)
}

/// Single-mode displacement `exp(beta a^dagger - beta^* a)` at dimension `dim`,
/// computed as the exact exponential of the truncated generator.
pub fn displacement_matrix(dim: usize, beta: C64) -> CMatrix {
    let a = lowering(dim);
    let generator = a.adjoint() * beta - &a * beta.conj();
    linalg::expm(&generator)
}

/// Displacement operator acting on `mode`.
///
/// Near the truncation edge the matrix stops being unitary; keep the
/// coherent-state deficit of `|beta|` at this dimension small.
pub fn displacement(space: &ModeSpace, mode: usize, beta: C64) -> Result<LinearOp> {
    let d = space.dim(mode)?;
    embed(space, mode, &displacement_matrix(d, beta))
}
