use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::require;
use crate::fock::{ModeSpace, QState, Repr};
use crate::{tol, CVector, Error, Result, C64};

/// Encoding family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// `|0_L> = |lo>`, `|1_L> = |hi>`; the standard choice is `(0, 1)`.
    Fock { lo: usize, hi: usize },
    /// Four-component cat with real amplitude `alpha`.
    Cat,
    /// `|0_L> = (|0> + |4>)/sqrt(2)`, `|1_L> = |2>`.
    Binomial,
}

impl CodeKind {
    pub const FOCK: CodeKind = CodeKind::Fock { lo: 0, hi: 1 };

    pub fn name(&self) -> &'static str {
        match self {
            CodeKind::Fock { .. } => "fock",
            CodeKind::Cat => "cat",
            CodeKind::Binomial => "binomial",
        }
    }
}

/// Which parity sector the codewords of a [`LogicalCode`] occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSpace {
    /// The encoding as prepared.
    Logical,
    /// Relabelled onto the words reached by one photon loss.
    Error,
}

/// Photon-number parity outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// The six cardinal states of the logical Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinal {
    PlusZ,
    MinusZ,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

pub const CARDINALS: [Cardinal; 6] = [
    Cardinal::PlusZ,
    Cardinal::MinusZ,
    Cardinal::PlusX,
    Cardinal::MinusX,
    Cardinal::PlusY,
    Cardinal::MinusY,
];

impl Cardinal {
    /// Bloch angles `(theta, phi)`; `+z` is `|0_L>`.
    pub fn bloch(&self) -> (f64, f64) {
        match self {
            Cardinal::PlusZ => (0.0, 0.0),
            Cardinal::MinusZ => (PI, 0.0),
            Cardinal::PlusX => (FRAC_PI_2, 0.0),
            Cardinal::MinusX => (FRAC_PI_2, PI),
            Cardinal::PlusY => (FRAC_PI_2, FRAC_PI_2),
            Cardinal::MinusY => (FRAC_PI_2, 3.0 * FRAC_PI_2),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Cardinal::PlusZ => "+z",
            Cardinal::MinusZ => "-z",
            Cardinal::PlusX => "+x",
            Cardinal::MinusX => "-x",
            Cardinal::PlusY => "+y",
            Cardinal::MinusY => "-y",
        }
    }
}

/// A qubit encoded in one truncated cavity.
///
/// `error_i` is the normalised image of `codeword_i` under one photon loss
/// (absent for Fock codes). Codewords may carry a deterministic rotation
/// `exp(i phase n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalCode {
    pub kind: CodeKind,
    pub alpha: f64,
    pub phase: f64,
    pub dim: usize,
    pub space: CodeSpace,
    pub codeword_0: QState,
    pub codeword_1: QState,
    pub error_0: Option<QState>,
    pub error_1: Option<QState>,
    /// Mean photon number of the equal mixture of the two codewords.
    pub mean_photons: f64,
}

/// Builds the encoding `kind` in a cavity of dimension `dim`. `alpha` is
/// only read for cat codes.
pub fn build_code(kind: CodeKind, alpha: f64, dim: usize) -> Result<LogicalCode> {
    require(dim >= 2, "dim", dim as f64, "must be at least 2")?;
    match kind {
        CodeKind::Fock { lo, hi } => {
            if lo == hi || lo >= dim || hi >= dim {
                return Err(Error::InvalidParameter {
                    name: "fock levels",
                    value: hi.max(lo) as f64,
                    reason: "levels must be distinct and below the truncation",
                });
            }
            assemble(kind, 0.0, dim, fock(dim, lo), fock(dim, hi), None)
        }
        CodeKind::Binomial => {
            require(dim >= 5, "dim", dim as f64, "binomial code needs dimension >= 5")?;
            let h = C64::new(0.5f64.sqrt(), 0.0);
            let w0 = (fock(dim, 0) + fock(dim, 4)) * h;
            let errors = (fock(dim, 3), fock(dim, 1));
            assemble(kind, 0.0, dim, w0, fock(dim, 2), Some(errors))
        }
        CodeKind::Cat => {
            require(alpha.is_finite() && alpha > 0.0, "alpha", alpha, "must be positive")?;
            let deficit = (0..4).map(|r| cat_deficit(alpha, r, dim)).fold(0.0, f64::max);
            if deficit > tol::TRUNCATION_DEFICIT {
                return Err(Error::Truncation {
                    deficit,
                    limit: tol::TRUNCATION_DEFICIT,
                    dim,
                });
            }
            cat_unchecked(alpha, dim)
        }
    }
}

/// Cat code without the truncation check, renormalised at `dim`.
pub(crate) fn cat_unchecked(alpha: f64, dim: usize) -> Result<LogicalCode> {
    let words = [2, 0, 1, 3].map(|r| cat_word(alpha, r, dim));
    let [w0, w1, e0, e1] = words;
    assemble(CodeKind::Cat, alpha, dim, w0, w1, Some((e0, e1)))
}

fn fock(dim: usize, n: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[n] = C64::new(1.0, 0.0);
    v
}

/// Unnormalised `sum_{n = r mod 4} alpha^n / sqrt(n!) |n>` truncated at `dim`.
fn cat_series(alpha: f64, r: usize, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = 1.0;
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        if n % 4 == r {
            v[n] = C64::new(c, 0.0);
        }
    }
    v
}

fn cat_word(alpha: f64, r: usize, dim: usize) -> CVector {
    let v = cat_series(alpha, r, dim);
    let norm = v.norm();
    if norm > 0.0 {
        v / C64::new(norm, 0.0)
    } else {
        v
    }
}

/// Norm lost to truncation relative to the untruncated word.
fn cat_deficit(alpha: f64, r: usize, dim: usize) -> f64 {
    let x = alpha * alpha;
    // sum over n = r (mod 4) of x^n / n!
    let full = match r {
        0 => 0.5 * (x.cosh() + x.cos()),
        1 => 0.5 * (x.sinh() + x.sin()),
        2 => 0.5 * (x.cosh() - x.cos()),
        _ => 0.5 * (x.sinh() - x.sin()),
    };
    // the tail is computed directly; subtracting from `full` cancels badly
    let mut term = 1.0;
    let mut tail = 0.0;
    for n in 1..dim + 200 {
        term *= x / n as f64;
        if n >= dim && n % 4 == r {
            tail += term;
        }
        if n >= dim && term < 1e-300 {
            break;
        }
    }
    if full > 0.0 {
        tail / full
    } else {
        0.0
    }
}

fn assemble(
    kind: CodeKind,
    alpha: f64,
    dim: usize,
    w0: CVector,
    w1: CVector,
    errors: Option<(CVector, CVector)>,
) -> Result<LogicalCode> {
    let space = ModeSpace::single(dim)?;
    let mean = |v: &CVector| -> f64 { v.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum() };
    let mean_photons = 0.5 * (mean(&w0) + mean(&w1));
    let (error_0, error_1) = match errors {
        Some((e0, e1)) => (Some(QState::pure(space.clone(), e0)?), Some(QState::pure(space.clone(), e1)?)),
        None => (None, None),
    };
    Ok(LogicalCode {
        kind,
        alpha,
        phase: 0.0,
        dim,
        space: CodeSpace::Logical,
        codeword_0: QState::pure(space.clone(), w0)?,
        codeword_1: QState::pure(space, w1)?,
        error_0,
        error_1,
        mean_photons,
    })
}

fn rotate(state: &QState, phase: f64) -> QState {
    match state.repr() {
        Repr::Pure(v) => {
            let w = CVector::from_fn(v.len(), |n, _| v[n] * C64::from_polar(1.0, phase * n as f64));
            QState::pure(state.space().clone(), w).expect("rotation keeps the norm")
        }
        Repr::Mixed(_) => unreachable!("codewords are pure"),
    }
}

impl LogicalCode {
    /// Amplitude vectors of the two codewords.
    pub fn words(&self) -> [&CVector; 2] {
        [
            self.codeword_0.amplitudes().expect("codewords are pure"),
            self.codeword_1.amplitudes().expect("codewords are pure"),
        ]
    }

    /// Amplitude vectors of the two error words, if the code has them.
    pub fn error_words(&self) -> Option<[&CVector; 2]> {
        match (&self.error_0, &self.error_1) {
            (Some(a), Some(b)) => Some([a.amplitudes()?, b.amplitudes()?]),
            _ => None,
        }
    }

    /// Parity of the codewords, if definite.
    pub fn parity(&self) -> Option<Parity> {
        let parity_of = |v: &CVector| -> Option<usize> {
            let mut p = None;
            for (n, a) in v.iter().enumerate() {
                if a.norm() > 0.0 {
                    match p {
                        None => p = Some(n % 2),
                        Some(q) if q != n % 2 => return None,
                        _ => {}
                    }
                }
            }
            p
        };
        let [w0, w1] = self.words();
        match (parity_of(w0)?, parity_of(w1)?) {
            (0, 0) => Some(Parity::Even),
            (1, 1) => Some(Parity::Odd),
            _ => None,
        }
    }

    /// Same code with every word rotated by `exp(i phase n)` on top of the
    /// current phase.
    pub fn rotated(&self, phase: f64) -> Self {
        Self {
            phase: self.phase + phase,
            codeword_0: rotate(&self.codeword_0, phase),
            codeword_1: rotate(&self.codeword_1, phase),
            error_0: self.error_0.as_ref().map(|s| rotate(s, phase)),
            error_1: self.error_1.as_ref().map(|s| rotate(s, phase)),
            ..self.clone()
        }
    }

    /// The code relabelled onto its error words. The new error words are
    /// the images of one further loss, so the relation `a |w_i> ~ |e_i>`
    /// still holds.
    pub fn relabeled(&self) -> Result<Self> {
        let (e0, e1) = match (&self.error_0, &self.error_1) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return Err(Error::InvalidParameter {
                name: "code",
                value: 0.0,
                reason: "Fock codes have no error space",
            }),
        };
        let lower = |s: &QState| -> Result<QState> {
            let v = s.amplitudes().expect("codewords are pure");
            let w = CVector::from_fn(v.len(), |n, _| if n + 1 < v.len() { v[n + 1] * ((n + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) });
            QState::pure(s.space().clone(), w)
        };
        let mean = |s: &QState| -> f64 { s.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum() };
        Ok(Self {
            space: match self.space {
                CodeSpace::Logical => CodeSpace::Error,
                CodeSpace::Error => CodeSpace::Logical,
            },
            error_0: Some(lower(&e0)?),
            error_1: Some(lower(&e1)?),
            mean_photons: 0.5 * (mean(&e0) + mean(&e1)),
            codeword_0: e0,
            codeword_1: e1,
            ..self.clone()
        })
    }

    /// Basis for a parity outcome: the code itself or its relabelling.
    pub fn for_parity(&self, parity: Parity) -> Result<Self> {
        match parity {
            Parity::Even => Ok(self.clone()),
            Parity::Odd => self.relabeled(),
        }
    }
}

/// `cos(theta/2) |0_L> + e^{i phi} sin(theta/2) |1_L>`.
pub fn encode(code: &LogicalCode, bloch: (f64, f64)) -> QState {
    let [w0, w1] = code.words();
    let v = encode_words(w0, w1, bloch);
    QState::pure(code.codeword_0.space().clone(), v).expect("codewords are orthonormal")
}

pub(crate) fn encode_words(w0: &CVector, w1: &CVector, (theta, phi): (f64, f64)) -> CVector {
    let c0 = C64::new((theta / 2.0).cos(), 0.0);
    let c1 = C64::from_polar((theta / 2.0).sin(), phi);
    w0 * c0 + w1 * c1
}

/// Populations `(p0, p1, leakage)` of a single-cavity state in the code
/// words (or the error words) of `code`.
pub fn logical_overlaps(state: &QState, code: &LogicalCode, use_error_space: bool) -> Result<(f64, f64, f64)> {
    if state.space().modes() != 1 || state.space().total() != code.dim {
        return Err(Error::DimensionMismatch {
            expected: code.dim,
            found: state.space().total(),
        });
    }
    let [w0, w1] = if use_error_space {
        code.error_words().ok_or(Error::InvalidParameter {
            name: "use_error_space",
            value: 1.0,
            reason: "Fock codes have no error space",
        })?
    } else {
        code.words()
    };
    let rho = state.density_matrix();
    let p0 = w0.dotc(&(&rho * w0)).re;
    let p1 = w1.dotc(&(&rho * w1)).re;
    let trace = rho.trace().re;
    Ok((p0, p1, trace - p0 - p1))
}
