use core::f64::consts::PI;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::require;
use crate::fock::QState;
use crate::{CMatrix, Error, Result, C64};

/// Uniform rectangular grid of displacements `beta = re + i im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub points_re: usize,
    pub points_im: usize,
}

impl GridSpec {
    /// Square grid `[-extent, extent]^2` with `points` samples per axis.
    pub fn square(extent: f64, points: usize) -> Self {
        Self {
            re: (-extent, extent),
            im: (-extent, extent),
            points_re: points,
            points_im: points,
        }
    }

    /// `[-2.5, 2.5]^2` with 41 points per axis up to `dim = 8`; beyond that
    /// the extent grows as `1.5 sqrt(dim)` at the same spacing.
    pub fn default_for(dim: usize) -> Self {
        if dim <= 8 {
            return Self::square(2.5, 41);
        }
        let extent = 1.5 * (dim as f64).sqrt();
        let points = 2 * (extent / 0.125).ceil() as usize + 1;
        Self::square(extent, points)
    }

    pub fn validate(&self) -> Result<()> {
        for (lo, hi) in [self.re, self.im] {
            require(lo.is_finite() && hi.is_finite() && hi > lo, "grid.range", hi - lo, "bounds must be finite and increasing")?;
        }
        require(self.points_re >= 2, "grid.points_re", self.points_re as f64, "need at least 2 points")?;
        require(self.points_im >= 2, "grid.points_im", self.points_im as f64, "need at least 2 points")
    }

    fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        (axis(self.re, self.points_re), axis(self.im, self.points_im))
    }
}

fn axis((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + h * k as f64).collect()
}

/// Sampled Wigner function. `values[i * im.len() + j]` is `W(re[i] + i im[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn new(re: Vec<f64>, im: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != re.len() * im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len() * im.len(),
                found: values.len(),
            });
        }
        require(re.len() >= 2 && im.len() >= 2, "grid.points", re.len().min(im.len()) as f64, "need at least 2 points per axis")?;
        for ax in [&re, &im] {
            let h = ax[1] - ax[0];
            let uniform = ax.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
            require(h > 0.0 && uniform, "grid.spacing", h, "axes must be uniform and increasing")?;
        }
        require(values.iter().all(|v| v.is_finite()), "grid.values", f64::NAN, "values must be finite")?;
        Ok(Self { re, im, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.im.len() + j]
    }

    /// Displacement of the flat index `k`.
    pub fn point(&self, k: usize) -> C64 {
        let n = self.im.len();
        C64::new(self.re[k / n], self.im[k % n])
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Trapezoidal quadrature weight of the flat index `k`.
    pub fn weight(&self, k: usize) -> f64 {
        let n = self.im.len();
        let edge = |idx: usize, len: usize| if idx == 0 || idx == len - 1 { 0.5 } else { 1.0 };
        let (i, j) = (k / n, k % n);
        let hr = self.re[1] - self.re[0];
        let hi = self.im[1] - self.im[0];
        edge(i, self.re.len()) * edge(j, n) * hr * hi
    }

    /// Trapezoidal 2D integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, v)| v * self.weight(k)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// `<n| D(alpha) |m>` for `n, m < dim`, from the associated Laguerre
/// closed form (the untruncated operator restricted to the first `dim`
/// levels).
pub(crate) fn displacement_elements(dim: usize, alpha: C64) -> CMatrix {
    let x = alpha.norm_sqr();
    let gauss = (-x / 2.0).exp();
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        // L_m^(k)(x) for m = 0 .. dim - 1 - k
        let count = dim - k;
        let mut lag = Vec::with_capacity(count);
        let a = k as f64;
        lag.push(1.0);
        if count > 1 {
            lag.push(1.0 + a - x);
        }
        for m in 1..count.saturating_sub(1) {
            let mf = m as f64;
            let next = ((2.0 * mf + 1.0 + a - x) * lag[m] - (mf + a) * lag[m - 1]) / (mf + 1.0);
            lag.push(next);
        }
        let up = alpha.powu(k as u32);
        let down = (-alpha.conj()).powu(k as u32);
        for m in 0..count {
            let n = m + k;
            // sqrt(m! / n!)
            let ratio = ((m + 1)..=n).fold(1.0, |acc, j| acc / (j as f64).sqrt());
            let value = ratio * gauss * lag[m];
            out[(n, m)] = up * value;
            if k > 0 {
                out[(m, n)] = down * value;
            }
        }
    }
    out
}

/// Hermitian kernel `F(beta) = (2/pi) D(beta) P D(beta)^dagger` on the
/// first `dim` levels, so that `W(beta) = Tr[rho F(beta)]`.
pub fn parity_kernel(dim: usize, beta: C64) -> CMatrix {
    let mut d = displacement_elements(dim, beta * 2.0);
    for m in 0..dim {
        let sign = if m % 2 == 0 { 2.0 / PI } else { -2.0 / PI };
        d.column_mut(m).scale_mut(sign);
    }
    d
}

/// Wigner function of a single-mode state on the grid. Unnormalised states
/// give a proportionally scaled function.
pub fn wigner(state: &QState, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    if state.space().modes() != 1 {
        return Err(Error::InvalidSpace("Wigner functions need a single-mode state"));
    }
    let dim = state.space().total();
    let rho = state.density_matrix();
    let (re, im) = spec.axes();
    let mut values = Vec::with_capacity(re.len() * im.len());
    for &x in &re {
        for &y in &im {
            let f = parity_kernel(dim, C64::new(x, y));
            // Tr[rho F] = sum_{mn} rho_mn F_nm
            let w: f64 = rho.iter().zip(f.transpose().iter()).map(|(a, b)| (a * b).re).sum();
            values.push(w);
        }
    }
    WignerGrid::new(re, im, values)
}

/// Rescales the grid so its trapezoidal integral is 1.
pub fn normalize_wigner(grid: &WignerGrid) -> Result<WignerGrid> {
    let total = grid.integral();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Degenerate("Wigner grid integral is not positive"));
    }
    Ok(grid.scaled(1.0 / total))
}
