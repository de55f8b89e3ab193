//! Explicit integrators for `x' = f(t, x)` on flat complex buffers.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::{Error, Result, C64};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Taylor propagation for constant pumps, Dormand-Prince otherwise.
    #[default]
    Auto,
    /// Truncated Taylor series of the exponential on short substeps; only
    /// valid for time-independent generators.
    Taylor,
    /// Adaptive Dormand-Prince 5(4).
    DormandPrince,
    /// Classic fourth-order Runge-Kutta with a fixed number of steps.
    Rk4 { steps: usize },
}

/// Tolerances shared by the adaptive schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(t L) x` for a constant linear `L` with `||L|| <= bound`.
///
/// Substeps are sized so that `h * bound <= 3`; each substep sums the series
/// until terms drop below double precision relative to the running sum.
pub fn taylor<F>(mut f: F, x0: &[C64], t: f64, bound: f64, min_steps: usize) -> Result<Vec<C64>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let steps = ((t.abs() * bound / 3.0).ceil() as usize).max(min_steps).max(1);
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    let mut term = x.clone();
    let mut next = alloc::vec![C64::new(0.0, 0.0); x.len()];
    for step in 0..steps {
        term.copy_from_slice(&x);
        let mut converged = false;
        for k in 1..=80 {
            f(0.0, &term, &mut next);
            let scale = h / k as f64;
            for (tm, nx) in term.iter_mut().zip(next.iter()) {
                *tm = nx * scale;
            }
            for (xi, tm) in x.iter_mut().zip(term.iter()) {
                *xi += tm;
            }
            if max_abs(&term) <= 1e-17 * max_abs(&x).max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Integration {
                t: h * step as f64,
                steps: step,
                step: h,
                error: max_abs(&term),
            });
        }
    }
    Ok(x)
}

/// Fixed-step RK4.
pub fn rk4<F>(mut f: F, x0: &[C64], t: f64, steps: usize) -> Result<Vec<C64>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            value: 0.0,
            reason: "must be positive",
        });
    }
    let n = x0.len();
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (alloc::vec![zero; n], alloc::vec![zero; n], alloc::vec![zero; n], alloc::vec![zero; n], alloc::vec![zero; n]);
    for s in 0..steps {
        let t0 = s as f64 * h;
        f(t0, &x, &mut k1);
        axpy_into(&mut tmp, &x, &[(h / 2.0, &k1)]);
        f(t0 + h / 2.0, &tmp, &mut k2);
        axpy_into(&mut tmp, &x, &[(h / 2.0, &k2)]);
        f(t0 + h / 2.0, &tmp, &mut k3);
        axpy_into(&mut tmp, &x, &[(h, &k3)]);
        f(t0 + h, &tmp, &mut k4);
        for i in 0..n {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(x)
}

fn axpy_into(out: &mut [C64], base: &[C64], terms: &[(f64, &[C64])]) {
    out.copy_from_slice(base);
    for &(c, v) in terms {
        if c == 0.0 {
            continue;
        }
        for (o, vi) in out.iter_mut().zip(v.iter()) {
            *o += vi * c;
        }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand-Prince 5(4) with first-same-as-last stages.
pub fn dormand_prince<F>(mut f: F, x0: &[C64], t: f64, h0: f64, tol: Tolerances) -> Result<Vec<C64>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = x0.len();
    let zero = C64::new(0.0, 0.0);
    let mut x = x0.to_vec();
    if t == 0.0 {
        return Ok(x);
    }
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| alloc::vec![zero; n]).collect();
    let mut stage = alloc::vec![zero; n];
    let mut now = 0.0;
    let mut h = h0.min(t).max(t * 1e-12);
    let mut steps = 0;
    let mut last_err = 0.0;
    f(now, &x, &mut k[0]);
    while now < t {
        if steps >= tol.max_steps {
            return Err(Error::Integration {
                t: now,
                steps,
                step: h,
                error: last_err,
            });
        }
        steps += 1;
        let last = now + h >= t;
        if last {
            h = t - now;
        }
        for s in 0..6 {
            stage.copy_from_slice(&x);
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let c = A[s][j] * h;
                if c != 0.0 {
                    for (st, v) in stage.iter_mut().zip(kj.iter()) {
                        *st += v * c;
                    }
                }
            }
            let (_, tail) = k.split_at_mut(s + 1);
            f(now + C[s + 1] * h, &stage, &mut tail[0]);
        }
        // stage now holds the fifth-order solution, k[6] its derivative
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * E[j];
                }
            }
            let scale = tol.atol + tol.rtol * x[i].norm().max(stage[i].norm());
            err = err.max((e * h).norm() / scale);
        }
        last_err = err;
        if err <= 1.0 {
            now = if last { t } else { now + h };
            x.copy_from_slice(&stage);
            k.swap(0, 6);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Integration {
                t: now,
                steps,
                step: h,
                error: err,
            });
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    // x' = i w x  ->  x(t) = e^{i w t}
    fn rotate(w: f64) -> impl FnMut(f64, &[C64], &mut [C64]) {
        move |_t, x, out| {
            for (o, v) in out.iter_mut().zip(x.iter()) {
                *o = C64::new(0.0, w) * v;
            }
        }
    }

    #[test]
    fn schemes_agree_on_rotation() {
        let w = 3.0;
        let t = 2.5;
        let exact = C64::from_polar(1.0, w * t);
        let x0 = [C64::new(1.0, 0.0)];
        let a = taylor(rotate(w), &x0, t, w, 1).unwrap();
        assert!((a[0] - exact).norm() < 1e-13);
        let b = dormand_prince(rotate(w), &x0, t, 0.01, Tolerances::default()).unwrap();
        assert!((b[0] - exact).norm() < 1e-7);
        let c = rk4(rotate(w), &x0, t, 2000).unwrap();
        assert!((c[0] - exact).norm() < 1e-10);
    }

    #[test]
    fn time_dependent_rhs() {
        // x' = 2 t x  ->  x(1) = e
        let f = |t: f64, x: &[C64], out: &mut [C64]| out[0] = x[0] * (2.0 * t);
        let x = dormand_prince(f, &[C64::new(1.0, 0.0)], 1.0, 0.1, Tolerances::default()).unwrap();
        assert!((x[0].re - 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn step_cap_reports_failure() {
        let tol = Tolerances {
            max_steps: 3,
            ..Tolerances::default()
        };
        let r = dormand_prince(rotate(100.0), &[C64::new(1.0, 0.0)], 10.0, 1e-3, tol);
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
