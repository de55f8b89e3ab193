//! Closed-form operating points of the detuned conversion and the link budget.
//!
//! A conversion pulse of length `t_BS = 2 pi / sqrt(8 g^2 + delta^2)` returns
//! the bus to vacuum and mixes the two cavities with angle
//! `theta = (pi / 2)(1 - delta t_BS / 2 pi)`.

use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::propagator_lossy;
use crate::error::require;
use crate::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default signal velocity in PTFE-filled coax, as a fraction of `c`.
pub const DEFAULT_VELOCITY_FACTOR: f64 = 0.7;

/// `3 sqrt(3) pi / (8 sqrt(32))`, the leading-order loss of the 50:50 pulse
/// in units of `kappa_b / g`.
pub const FIFTY_LOSS_COEFFICIENT: f64 = 3.0 * 1.732_050_807_568_877_2 * PI / (8.0 * 5.656_854_249_492_381);

/// Detuned conversion setting for one mixing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub theta: f64,
    pub delta: f64,
    pub duration: f64,
    /// Energy left in the cavities after one pulse, from the lossy
    /// single-excitation propagator.
    pub efficiency_estimate: f64,
}

impl OperatingPoint {
    /// Operating point at detuning `delta`.
    pub fn from_detuning(g: f64, delta: f64, kappa_b: f64) -> Result<Self> {
        check_g(g)?;
        require(delta.is_finite() && delta >= 0.0, "delta", delta, "must be finite and non-negative")?;
        require(kappa_b.is_finite() && kappa_b >= 0.0, "kappa_b", kappa_b, "must be finite and non-negative")?;
        let duration = bs_time(g, delta);
        let m = propagator_lossy(g, delta, kappa_b, 0.0, 0.0, duration);
        let occ = m.occupations_from(0);
        Ok(Self {
            theta: angle_for_detuning(g, delta),
            delta,
            duration,
            efficiency_estimate: (occ[0] + occ[1]).clamp(0.0, 1.0),
        })
    }

    /// Operating point producing mixing angle `theta`.
    pub fn for_angle(g: f64, theta: f64, kappa_b: f64) -> Result<Self> {
        let delta = detuning_for_angle(g, theta)?;
        let mut p = Self::from_detuning(g, delta, kappa_b)?;
        p.theta = theta;
        Ok(p)
    }

    /// Resonant full swap.
    pub fn swap(g: f64, kappa_b: f64) -> Result<Self> {
        Self::from_detuning(g, 0.0, kappa_b)
    }

    /// Balanced beamsplitter, `theta = pi / 4`.
    pub fn fifty_fifty(g: f64, kappa_b: f64) -> Result<Self> {
        Self::for_angle(g, PI / 4.0, kappa_b)
    }
}

fn check_g(g: f64) -> Result<()> {
    require(g.is_finite() && g > 0.0, "g", g, "must be finite and positive")
}

/// Mixing angle `theta = (pi / 2)(1 - delta / sqrt(8 g^2 + delta^2))`.
pub fn angle_for_detuning(g: f64, delta: f64) -> f64 {
    FRAC_PI_2 * (1.0 - delta / (8.0 * g * g + delta * delta).sqrt())
}

/// Non-negative detuning giving mixing angle `theta` in `(0, pi/2]`.
pub fn detuning_for_angle(g: f64, theta: f64) -> Result<f64> {
    check_g(g)?;
    require(theta > 0.0 && theta <= FRAC_PI_2, "theta", theta, "must lie in (0, pi/2]")?;
    // u = delta / sqrt(8 g^2 + delta^2) = 1 - 2 theta / pi
    let x = theta / FRAC_PI_2;
    let u = 1.0 - x;
    // 1 - u^2 = x (2 - x) without cancellation near u -> 1
    let delta = 8f64.sqrt() * g * u / (x * (2.0 - x)).sqrt();
    if delta.is_finite() && delta >= 0.0 {
        return Ok(delta);
    }
    bisect_detuning(g, theta)
}

fn bisect_detuning(g: f64, theta: f64) -> Result<f64> {
    let mut hi = g;
    while angle_for_detuning(g, hi) > theta {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "no finite detuning reaches this angle",
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if angle_for_detuning(g, mid) > theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pulse length `2 pi / sqrt(8 g^2 + delta^2)` that returns the bus to vacuum.
pub fn bs_time(g: f64, delta: f64) -> f64 {
    2.0 * PI / (8.0 * g * g + delta * delta).sqrt()
}

/// Order of the swap-efficiency formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `(1 + exp(-pi kappa_b / sqrt(32) g))^2 / 4`.
    Exact,
    /// `1 - pi kappa_b / (sqrt(32) g)`.
    FirstOrder,
}

/// Energy efficiency of the resonant swap with bus loss `kappa_b`.
pub fn swap_efficiency(g: f64, kappa_b: f64, order: Order) -> Result<f64> {
    check_g(g)?;
    require(kappa_b.is_finite() && kappa_b >= 0.0, "kappa_b", kappa_b, "must be finite and non-negative")?;
    let limit = 32f64.sqrt() * g;
    if kappa_b >= limit {
        return Err(Error::Overdamped { kappa_b, limit });
    }
    let x = PI * kappa_b / limit;
    Ok(match order {
        Order::Exact => 0.25 * (1.0 + (-x).exp()).powi(2),
        Order::FirstOrder => 1.0 - x,
    })
}

/// Leading-order inefficiency of the 50:50 pulse and the resulting Bell
/// infidelity; the two coincide.
pub fn fifty_infidelity(g: f64, kappa_b: f64) -> (f64, f64) {
    let v = FIFTY_LOSS_COEFFICIENT * kappa_b / g;
    (v, v)
}

/// Cable energy attenuation length `v Q / omega` and the single-pass loss of
/// a cable of length `cable_length` (all SI units, `mode_freq` in Hz).
pub fn attenuation_budget(q_factor: f64, mode_freq: f64, phase_velocity: f64, cable_length: f64) -> Result<(f64, f64)> {
    for (name, v) in [
        ("q_factor", q_factor),
        ("mode_freq", mode_freq),
        ("phase_velocity", phase_velocity),
        ("cable_length", cable_length),
    ] {
        require(v.is_finite() && v > 0.0, name, v, "must be finite and positive")?;
    }
    let length = phase_velocity * q_factor / (2.0 * PI * mode_freq);
    Ok((length, cable_length / length))
}

/// [`attenuation_budget`] at the default velocity `0.7 c`.
pub fn attenuation_budget_default(q_factor: f64, mode_freq: f64, cable_length: f64) -> Result<(f64, f64)> {
    attenuation_budget(q_factor, mode_freq, DEFAULT_VELOCITY_FACTOR * SPEED_OF_LIGHT, cable_length)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_value() {
        let c = 3.0 * 3f64.sqrt() * PI / (8.0 * 32f64.sqrt());
        assert!((FIFTY_LOSS_COEFFICIENT - c).abs() < 1e-15);
    }

    #[test]
    fn endpoint_angles() {
        assert_eq!(detuning_for_angle(1.0, FRAC_PI_2).unwrap(), 0.0);
        assert!(detuning_for_angle(1.0, 0.0).is_err());
        assert!(detuning_for_angle(1.0, 1.6).is_err());
        let tiny = detuning_for_angle(1.0, 1e-12).unwrap();
        assert!(tiny.is_finite() && tiny > 1e5);
    }

    #[test]
    fn bisection_agrees_with_closed_form() {
        for &theta in &[0.1, 0.5, 1.2, 1.5] {
            let a = detuning_for_angle(2.0, theta).unwrap();
            let b = bisect_detuning(2.0, theta).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }
}
