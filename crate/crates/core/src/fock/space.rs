use alloc::vec::Vec;

use crate::{Error, Result};

/// Tensor product of truncated bosonic modes.
///
/// Basis index ordering is row-major: mode 0 is the most significant digit,
/// so `|n0, n1, ...>` sits at `sum_k n_k * stride_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl ModeSpace {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("at least one mode is required"));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidSpace("every mode dimension must be at least 2"));
        }
        let mut strides = alloc::vec![1usize; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1]
                .checked_mul(dims[k + 1])
                .ok_or(Error::InvalidSpace("total dimension overflows"))?;
        }
        let total = strides[0]
            .checked_mul(dims[0])
            .ok_or(Error::InvalidSpace("total dimension overflows"))?;
        Ok(Self {
            dims: dims.to_vec(),
            strides,
            total,
        })
    }

    /// Single-mode space.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(&[dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self, mode: usize) -> Result<usize> {
        self.check_mode(mode)?;
        Ok(self.dims[mode])
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.dims.len() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                modes: self.dims.len(),
            })
        }
    }

    /// Flat index of an occupation tuple.
    pub fn index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: occupation.len(),
            });
        }
        let mut idx = 0;
        for (k, &n) in occupation.iter().enumerate() {
            if n >= self.dims[k] {
                return Err(Error::InvalidSpace("occupation exceeds mode truncation"));
            }
            idx += n * self.strides[k];
        }
        Ok(idx)
    }

    /// Photon number of `mode` in basis state `index`.
    pub fn occupation_of(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    pub fn occupation(&self, index: usize) -> Vec<usize> {
        (0..self.dims.len()).map(|k| self.occupation_of(index, k)).collect()
    }

    /// Total photon number of basis state `index`.
    pub fn excitations(&self, index: usize) -> usize {
        (0..self.dims.len()).map(|k| self.occupation_of(index, k)).sum()
    }

    /// Space made of the selected modes, in the given order.
    pub fn subspace(&self, modes: &[usize]) -> Result<Self> {
        let mut dims = Vec::with_capacity(modes.len());
        for &m in modes {
            dims.push(self.dim(m)?);
        }
        Self::new(&dims)
    }

    /// Concatenation `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(&dims)
    }
}
