
#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result, C64};

/// Mode amplitudes `(a1, a2, b)` at time `t` for a coherent amplitude
/// `alpha0` starting in cavity 1, resonant pumps and bus decay `kappa_b`.
///
/// With the loaded frequency `g~ = g sqrt(1 - kappa_b^2 / 32 g^2)`:
/// `a1 - a2 = alpha0 e^{-kappa_b t/4} (cos(sqrt2 g~ t) + kappa_b/(4 sqrt2 g~) sin(sqrt2 g~ t))`,
/// `a1 + a2 = alpha0`, and
/// `b = alpha0 e^{-kappa_b t/4} g/(sqrt2 g~) sin(sqrt2 g~ t)`.
pub fn semiclassical_resonant(alpha0: C64, g: f64, kappa_b: f64, t: f64) -> Result<(C64, C64, C64)> {
    let limit = 32f64.sqrt() * g;
    if !(g > 0.0) || !(kappa_b >= 0.0) || kappa_b >= limit {
        return Err(Error::Overdamped { kappa_b, limit });
    }
    let g_loaded = g * (1.0 - kappa_b * kappa_b / (32.0 * g * g)).sqrt();
    let w = 2f64.sqrt() * g_loaded;
    let (s, c) = (w * t).sin_cos();
    let env = (-kappa_b * t / 4.0).exp();
    let diff = alpha0 * (env * (c + kappa_b / (4.0 * w) * s));
    let b = alpha0 * (env * g / w * s);
    Ok(((alpha0 + diff) * 0.5, (alpha0 - diff) * 0.5, b))
}
