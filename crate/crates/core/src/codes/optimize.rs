use core::f64::consts::PI;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::code::{build_code, cat_unchecked, encode_words, CodeKind, LogicalCode, Parity, CARDINALS};
use super::loss::{loss_kraus, parity_branches};
use crate::error::require;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Cat amplitudes searched when fitting a basis.
pub const ALPHA_SEARCH_RANGE: (f64, f64) = (0.3, 2.5);
const ALPHA_TOL: f64 = 0.01;
const PHASE_GRID: usize = 360;
/// Branches lighter than this carry no usable state.
const EMPTY_BRANCH: f64 = 1e-14;

/// A received branch: unnormalised operator and the Bloch angles it should
/// reproduce.
pub type BranchState = (CMatrix, (f64, f64));

/// Mean fidelity of `ops` against targets built from `(w0, w1)` rotated by
/// `exp(i phi n)`, as a Fourier series in `phi`: entry `k` multiplies
/// `exp(i phi (k - dim + 1))`.
fn phase_spectrum(w0: &CVector, w1: &CVector, ops: &[BranchState], normalize: bool) -> Vec<C64> {
    let d = w0.len();
    let mut s = alloc::vec![C64::new(0.0, 0.0); 2 * d - 1];
    if ops.is_empty() {
        return s;
    }
    for (rho, bloch) in ops {
        let tr = rho.trace().re;
        let weight = if normalize {
            if tr <= EMPTY_BRANCH {
                continue;
            }
            1.0 / tr
        } else {
            1.0
        };
        let t = encode_words(w0, w1, *bloch);
        for m in 0..d {
            if t[m].norm_sqr() == 0.0 {
                continue;
            }
            for n in 0..d {
                s[m + d - 1 - n] += t[n].conj() * rho[(n, m)] * t[m] * weight;
            }
        }
    }
    let count = ops.len() as f64;
    s.iter_mut().for_each(|z| *z /= count);
    s
}

fn eval_phase(s: &[C64], phi: f64) -> f64 {
    let d = s.len().div_ceil(2);
    s.iter()
        .enumerate()
        .map(|(k, z)| (z * C64::from_polar(1.0, phi * (k as f64 - (d as f64 - 1.0)))).re)
        .sum()
}

/// Maximises over the deterministic rotation: a uniform grid, then a
/// parabola through the best point and its neighbours.
fn best_phase(s: &[C64]) -> (f64, f64) {
    let h = 2.0 * PI / PHASE_GRID as f64;
    let values: Vec<f64> = (0..PHASE_GRID).map(|k| eval_phase(s, k as f64 * h)).collect();
    let (k, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let fm = values[(k + PHASE_GRID - 1) % PHASE_GRID];
    let fp = values[(k + 1) % PHASE_GRID];
    let curvature = fm - 2.0 * best + fp;
    let phi0 = k as f64 * h;
    if curvature < 0.0 {
        let shift = 0.5 * h * (fm - fp) / curvature;
        let phi = phi0 + shift;
        let v = eval_phase(s, phi);
        if v > best {
            return (phi - 2.0 * PI * (phi / (2.0 * PI)).floor(), v);
        }
    }
    (phi0, best)
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn candidate(kind: CodeKind, alpha: f64, dim: usize, parity: Parity) -> Result<LogicalCode> {
    let base = match kind {
        CodeKind::Cat => cat_unchecked(alpha, dim)?,
        CodeKind::Binomial => build_code(kind, 0.0, dim)?,
        CodeKind::Fock { .. } => {
            return Err(Error::InvalidParameter {
                name: "code",
                value: 0.0,
                reason: "Fock codes have no parity-tracked basis",
            })
        }
    };
    base.for_parity(parity)
}

fn score(code: &LogicalCode, ops: &[BranchState], normalize: bool) -> (f64, f64) {
    let [w0, w1] = code.words();
    best_phase(&phase_spectrum(w0, w1, ops, normalize))
}

/// Fits the basis for one parity outcome to received branch states: cat
/// size over [`ALPHA_SEARCH_RANGE`] (cat codes only) and the deterministic
/// rotation, maximising the mean normalised fidelity. Returns the rotated
/// basis and its score. With no populated branch the unrotated basis at
/// `alpha_hint` is returned with score 0.
pub fn fit_post_transfer_basis(
    kind: CodeKind,
    parity: Parity,
    dim: usize,
    alpha_hint: f64,
    ops: &[BranchState],
) -> Result<(LogicalCode, f64)> {
    if ops.iter().all(|(rho, _)| rho.trace().re <= EMPTY_BRANCH) {
        return Ok((candidate(kind, alpha_hint, dim, parity)?, 0.0));
    }
    let alpha = match kind {
        CodeKind::Cat => {
            let (lo, hi) = ALPHA_SEARCH_RANGE;
            let mut objective = |a: f64| match candidate(kind, a, dim, parity) {
                Ok(code) => score(&code, ops, true).1,
                Err(_) => f64::NEG_INFINITY,
            };
            golden_max(&mut objective, lo, hi, ALPHA_TOL).0
        }
        _ => 0.0,
    };
    let code = candidate(kind, alpha, dim, parity)?;
    let (phi, value) = score(&code, ops, true);
    Ok((code.rotated(phi), value))
}

/// Fits only the deterministic rotation `exp(i phi n)` of `code` to
/// received branch states, maximising the mean normalised fidelity.
pub fn fit_rotation(code: &LogicalCode, ops: &[BranchState]) -> (LogicalCode, f64) {
    let (phi, value) = score(code, ops, true);
    (code.rotated(phi), value)
}

/// Branch states after photon loss `eta` and an ideal parity measurement,
/// for each input Bloch point.
fn loss_branches(code: &LogicalCode, eta: f64, points: &[(f64, f64)]) -> Result<(Vec<BranchState>, Vec<BranchState>)> {
    let kraus = loss_kraus(code.dim, eta)?;
    let [w0, w1] = code.words();
    let mut even = Vec::with_capacity(points.len());
    let mut odd = Vec::with_capacity(points.len());
    for &bloch in points {
        let psi = encode_words(w0, w1, bloch);
        let mut rho = CMatrix::zeros(code.dim, code.dim);
        for k in &kraus {
            let v = k * &psi;
            rho += &v * v.adjoint();
        }
        let (e, o) = parity_branches(&rho);
        even.push((e, bloch));
        odd.push((o, bloch));
    }
    Ok((even, odd))
}

/// Basis maximising the mean cardinal-state fidelity after photon loss
/// `eta` and the parity outcome `parity`.
pub fn post_transfer_basis(code: &LogicalCode, eta: f64, parity: Parity) -> Result<LogicalCode> {
    let points: Vec<(f64, f64)> = CARDINALS.iter().map(|c| c.bloch()).collect();
    let (even, odd) = loss_branches(code, eta, &points)?;
    let ops = match parity {
        Parity::Even => even,
        Parity::Odd => odd,
    };
    Ok(fit_post_transfer_basis(code.kind, parity, code.dim, code.alpha, &ops)?.0)
}

/// Mean parity-tracked fidelity after photon loss `eta` over the six
/// cardinal states, each outcome scored in its own fitted basis.
pub fn corrected_fidelity(code: &LogicalCode, eta: f64) -> Result<f64> {
    let points: Vec<(f64, f64)> = CARDINALS.iter().map(|c| c.bloch()).collect();
    corrected_fidelity_over(code, eta, &points)
}

/// [`corrected_fidelity`] averaged over arbitrary input Bloch points.
pub fn corrected_fidelity_over(code: &LogicalCode, eta: f64, points: &[(f64, f64)]) -> Result<f64> {
    require(!points.is_empty(), "points", 0.0, "need at least one input state")?;
    let (even, odd) = loss_branches(code, eta, points)?;
    let mut total = 0.0;
    for (parity, ops) in [(Parity::Even, &even), (Parity::Odd, &odd)] {
        let (basis, _) = fit_post_transfer_basis(code.kind, parity, code.dim, code.alpha, ops)?;
        let [w0, w1] = basis.words();
        total += eval_phase(&phase_spectrum(w0, w1, ops, false), 0.0);
    }
    Ok(total.clamp(0.0, 1.0))
}

fn check_eta(eta: f64) -> Result<()> {
    require(eta > 0.0 && eta <= 1.0, "eta", eta, "must lie in (0, 1]")
}

/// Cat amplitude in `alpha_range` maximising [`corrected_fidelity`] at
/// transmissivity `eta`, with that fidelity.
///
/// Candidates are built at `dim` and renormalised there, so large amplitudes
/// in a small cavity are scored with their truncated words.
pub fn optimal_alpha(eta: f64, alpha_range: (f64, f64), dim: usize) -> Result<(f64, f64)> {
    check_eta(eta)?;
    let (lo, hi) = alpha_range;
    require(lo.is_finite() && lo > 0.0, "alpha_range.0", lo, "must be positive")?;
    require(hi.is_finite() && hi > lo, "alpha_range.1", hi, "must exceed the lower bound")?;
    let mut failure = None;
    let best = golden_max(
        |a| match cat_unchecked(a, dim).and_then(|c| corrected_fidelity(&c, eta)) {
            Ok(f) => f,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        ALPHA_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Corrected fidelities of the optimal cat and of the binomial code.
pub fn compare_binomial(eta: f64, dim: usize) -> Result<(f64, f64)> {
    let (_, cat) = optimal_alpha(eta, ALPHA_SEARCH_RANGE, dim)?;
    let binomial = corrected_fidelity(&build_code(CodeKind::Binomial, 0.0, dim)?, eta)?;
    Ok((cat, binomial))
}
