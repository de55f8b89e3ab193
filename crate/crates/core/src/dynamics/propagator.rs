#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::Matrix3;

use crate::linalg;
use crate::{CMatrix, C64};

/// Linear map of the mode amplitudes `(a1, a2, b)` over a time `time`:
/// `a_i(t) = sum_j m[i][j] a_j(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    pub m: Matrix3<C64>,
    pub time: f64,
}

impl ModeMatrix {
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    /// `max |M^dagger M - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.m.adjoint() * self.m - Matrix3::identity();
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Occupations `(|M_1k|^2, |M_2k|^2, |M_3k|^2)` reached from a single
    /// excitation initially in mode `k`.
    pub fn occupations_from(&self, k: usize) -> [f64; 3] {
        [self.m[(0, k)].norm_sqr(), self.m[(1, k)].norm_sqr(), self.m[(2, k)].norm_sqr()]
    }
}

/// Closed-form lossless propagator at coupling `g` and detuning `delta`.
///
/// With `Omega = g sqrt(1 + delta^2 / 8 g^2)` and `w = sqrt(2) Omega`, every
/// element carries `e^{i delta t / 2}` except the constant half of the
/// cavity block.
pub fn propagator(g: f64, delta: f64, t: f64) -> ModeMatrix {
    let omega = (g * g + delta * delta / 8.0).sqrt();
    let w = 2f64.sqrt() * omega;
    let (s, c) = (w * t).sin_cos();
    // sin(w t) / w, finite as w -> 0
    let sinc = if w == 0.0 { t } else { s / w };
    let phase = C64::from_polar(1.0, delta * t / 2.0);
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);

    let diff = phase * (C64::new(c, 0.0) - i * (delta / 2.0) * sinc);
    let m11 = (one + diff) * 0.5;
    let m12 = (one - diff) * 0.5;
    let m13 = -phase * (g * sinc);
    let m33 = phase * (C64::new(c, 0.0) + i * (delta / 2.0) * sinc);

    ModeMatrix {
        m: Matrix3::new(m11, m12, m13, m12, m11, -m13, -m13, m13, m33),
        time: t,
    }
}

/// Propagator with dissipation, as the exponential of the amplitude
/// equations of motion
/// `a1' = -k1/2 a1 - g b`, `a2' = -k2/2 a2 + g b`,
/// `b' = g (a1 - a2) + (i delta - kb/2) b`.
pub fn propagator_lossy(g: f64, delta: f64, kappa_b: f64, kappa_1: f64, kappa_2: f64, t: f64) -> ModeMatrix {
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let a = CMatrix::from_row_slice(
        3,
        3,
        &[
            r(-kappa_1 / 2.0),
            z,
            r(-g),
            z,
            r(-kappa_2 / 2.0),
            r(g),
            r(g),
            r(-g),
            C64::new(-kappa_b / 2.0, delta),
        ],
    );
    let e = linalg::expm(&(a * r(t)));
    ModeMatrix {
        m: Matrix3::from_fn(|i, j| e[(i, j)]),
        time: t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn identity_at_zero() {
        let m = propagator(1.0, 0.3, 0.0);
        assert!((m.m - Matrix3::identity()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn resonant_swap() {
        let g = 2.0;
        let m = propagator(g, 0.0, PI / (2f64.sqrt() * g));
        assert!((m.get(0, 1).norm() - 1.0).abs() < 1e-14);
        assert!((m.get(1, 0).norm() - 1.0).abs() < 1e-14);
        assert!(m.get(0, 0).norm() < 1e-14 && m.get(1, 1).norm() < 1e-14);
        for k in 0..2 {
            assert!(m.get(2, k).norm() < 1e-14 && m.get(k, 2).norm() < 1e-14);
        }
    }

    #[test]
    fn fifty_fifty() {
        let g = 1.0;
        let delta = (8.0f64 / 3.0).sqrt() * g;
        let t = 2.0 * PI / (8.0 * g * g + delta * delta).sqrt();
        let m = propagator(g, delta, t);
        let h = 0.5f64.sqrt();
        assert!((m.get(0, 0).norm() - h).abs() < 1e-14);
        assert!((m.get(0, 1).norm() - h).abs() < 1e-14);
        assert!(m.get(0, 2).norm() < 1e-14);
    }

    #[test]
    fn closed_form_matches_exponential() {
        for &(g, d, t) in &[(1.0, 0.0, 0.7), (1.3, 2.1, 3.3), (0.4, -1.5, 10.0)] {
            let a = propagator(g, d, t);
            let b = propagator_lossy(g, d, 0.0, 0.0, 0.0, t);
            assert!((a.m - b.m).iter().all(|z| z.norm() < 1e-12));
        }
    }
}
