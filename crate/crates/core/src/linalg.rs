//! Small dense linear-algebra helpers on top of nalgebra.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use nalgebra::{DVector, SymmetricEigen};

use crate::{CMatrix, C64};

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), m.clone());
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Rebuilds `V diag(values) V^dagger`.
pub fn from_spectrum(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for c in 0..n {
            let vc = v[c].conj() * lam;
            for r in 0..n {
                out[(r, c)] += v[r] * vc;
            }
        }
    }
    out
}

/// Principal square root of a positive semidefinite matrix; negative
/// eigenvalues from round-off are clipped to zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    from_spectrum(&roots, &vecs)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigh(m).0.first().copied().unwrap_or(0.0)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The series is summed until the next term falls below machine precision
/// relative to the partial sum, after scaling `m` to unit 1-norm.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = (0..n)
        .map(|c| m.column(c).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(0.5f64.powi(squarings as i32), 0.0);
    let a = m * scale;
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..64 {
        term = &term * &a * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let tn = term.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Euclidean projection of `values` onto `{x >= 0, sum x = total}`.
pub fn project_simplex(values: &[f64], total: f64) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - total) / (i + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}

/// Trace constraint used by [`project_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceConstraint {
    /// Trace exactly `1`.
    Unit,
    /// Trace at most `1`.
    AtMostUnit,
}

/// Frobenius-nearest Hermitian positive semidefinite matrix obeying the
/// trace constraint.
pub fn project_density(m: &CMatrix, constraint: TraceConstraint) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let projected = match constraint {
        TraceConstraint::Unit => project_simplex(&vals, 1.0),
        TraceConstraint::AtMostUnit => {
            let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
            if clipped.iter().sum::<f64>() <= 1.0 {
                clipped
            } else {
                project_simplex(&vals, 1.0)
            }
        }
    };
    from_spectrum(&projected, &vecs)
}

pub fn real_vector(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}
