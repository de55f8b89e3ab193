use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use super::wigner::{parity_kernel, WignerGrid};
use crate::error::require;
use crate::fock::{ModeSpace, QState};
use crate::linalg::{project_density, TraceConstraint};
use crate::{CMatrix, Error, Result, C64};

/// Stopping rule of the projected-gradient solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop once the relative change of the squared residual falls below this.
    pub tolerance: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-10,
        }
    }
}

/// Solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleReport {
    pub iterations: usize,
    /// Squared residual `sum_p (Tr[rho F_p] - y_p)^2` at the solution.
    pub residual: f64,
    /// Relative residual change of the last step.
    pub change: f64,
}

/// Residuals below this fraction of the data norm count as an exact fit.
const EXACT_FIT: f64 = 1e-24;

/// Orthonormal real coordinates of Hermitian `dim x dim` matrices: the
/// diagonal, then `sqrt(2) Re` and `sqrt(2) Im` of each upper entry.
fn to_coords(m: &CMatrix) -> DVector<f64> {
    let d = m.nrows();
    let mut x = DVector::zeros(d * d);
    let s = 2f64.sqrt();
    let mut k = d;
    for i in 0..d {
        x[i] = m[(i, i)].re;
        for j in (i + 1)..d {
            x[k] = s * m[(i, j)].re;
            x[k + 1] = s * m[(i, j)].im;
            k += 2;
        }
    }
    x
}

fn from_coords(x: &DVector<f64>, d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    let s = 2f64.sqrt();
    let mut k = d;
    for i in 0..d {
        m[(i, i)] = C64::new(x[i], 0.0);
        for j in (i + 1)..d {
            let z = C64::new(x[k], x[k + 1]) / s;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Least-squares fit of `Tr[rho F_p] = y_p` over density matrices obeying
/// `constraint`, by restarted accelerated projected gradient.
pub(crate) fn least_squares_density(
    ops: &[CMatrix],
    data: &[f64],
    dim: usize,
    constraint: TraceConstraint,
    options: MleOptions,
) -> Result<(CMatrix, MleReport)> {
    if ops.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            found: data.len(),
        });
    }
    require(dim >= 1, "dim", dim as f64, "must be at least 1")?;
    require(options.max_iterations >= 1, "max_iterations", options.max_iterations as f64, "must be at least 1")?;
    require(options.tolerance > 0.0, "tolerance", options.tolerance, "must be positive")?;
    if data.iter().any(|y| !y.is_finite()) {
        return Err(Error::Degenerate("tomographic data contain non-finite values"));
    }
    let n = dim * dim;
    // row p of A is the coordinate vector of F_p
    let mut a = DMatrix::<f64>::zeros(ops.len(), n);
    for (p, f) in ops.iter().enumerate() {
        if f.nrows() != dim || f.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.nrows(),
            });
        }
        a.row_mut(p).copy_from(&to_coords(f).transpose());
    }
    let y = DVector::from_column_slice(data);
    let gram = a.transpose() * &a;
    let rhs = a.transpose() * &y;
    let lipschitz = gram.clone().symmetric_eigen().eigenvalues.max();
    if !(lipschitz > 0.0) {
        return Err(Error::Degenerate("measurement operators carry no information"));
    }
    let step = 1.0 / lipschitz;
    let floor = EXACT_FIT * y.norm_squared();
    let project = |x: &DVector<f64>| to_coords(&project_density(&from_coords(x, dim), constraint));
    let residual = |x: &DVector<f64>| (&a * x - &y).norm_squared();

    let start = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
    let mut x = project(&to_coords(&start));
    let mut r = residual(&x);
    let mut z = x.clone();
    let mut t = 1.0;
    let mut change = f64::INFINITY;
    let mut restarted = true;
    for it in 1..=options.max_iterations {
        let grad = &gram * &z - &rhs;
        let x_new = project(&(&z - grad * step));
        let r_new = residual(&x_new);
        let done = |change: f64, x: &DVector<f64>, r: f64| {
            let report = MleReport {
                iterations: it,
                residual: r,
                change,
            };
            Ok((from_coords(x, dim), report))
        };
        if r_new > r {
            // a plain projected gradient step cannot increase the residual
            // beyond rounding, so x is stationary
            if restarted {
                return done(0.0, &x, r);
            }
            z = x.clone();
            t = 1.0;
            restarted = true;
            continue;
        }
        restarted = false;
        let t_new = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = &x_new + (&x_new - &x) * ((t - 1.0) / t_new);
        change = (r - r_new) / r.max(f64::MIN_POSITIVE);
        x = x_new;
        r = r_new;
        t = t_new;
        if change < options.tolerance || r <= floor {
            return done(change, &x, r);
        }
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual: r,
        change,
    })
}

/// Density matrix of dimension `dim` whose Wigner function best matches the
/// grid in the least-squares sense.
pub fn mle_reconstruct(grid: &WignerGrid, dim: usize) -> Result<QState> {
    Ok(mle_reconstruct_with(grid, dim, MleOptions::default())?.0)
}

/// [`mle_reconstruct`] with explicit stopping rule, returning diagnostics.
pub fn mle_reconstruct_with(grid: &WignerGrid, dim: usize, options: MleOptions) -> Result<(QState, MleReport)> {
    require(
        dim >= 1 && grid.len() >= dim * dim,
        "dim",
        dim as f64,
        "grid needs at least dim^2 points",
    )?;
    let ops: Vec<CMatrix> = grid.points().map(|beta| parity_kernel(dim, beta)).collect();
    let (rho, report) = least_squares_density(&ops, &grid.values, dim, TraceConstraint::Unit, options)?;
    Ok((QState::mixed(ModeSpace::single(dim)?, rho)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn coordinates_are_isometric() {
        let m = CMatrix::from_fn(4, 4, |i, j| {
            let z = C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3);
            if i == j { C64::new(z.re, 0.0) } else { z }
        });
        let h = (&m + m.adjoint()) / C64::new(2.0, 0.0);
        let x = to_coords(&h);
        assert!(max_abs_diff(&from_coords(&x, 4), &h) < 1e-15);
        let frob: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        assert!((x.norm_squared() - frob).abs() < 1e-13);
    }
}
