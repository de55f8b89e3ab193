use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::codes::{encode_words, Cardinal, LogicalCode};
use crate::error::require;
use crate::fock::{fidelity, ModeSpace, QState};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Branches lighter than this are dropped from outcomes.
pub(crate) const EMPTY: f64 = 1e-15;

/// Classical assignment errors of a parity readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    /// Probability of reporting even when the state is even.
    pub p_correct_g: f64,
    /// Probability of reporting odd when the state is odd.
    pub p_correct_e: f64,
    pub enabled: bool,
}

impl Default for MeasurementModel {
    fn default() -> Self {
        Self::IDEAL
    }
}

impl MeasurementModel {
    /// Perfect assignment.
    pub const IDEAL: MeasurementModel = MeasurementModel {
        p_correct_g: 1.0,
        p_correct_e: 1.0,
        enabled: false,
    };

    /// Assignment fidelities 0.99 (even) and 0.98 (odd).
    pub fn reference() -> Self {
        Self {
            p_correct_g: 0.99,
            p_correct_e: 0.98,
            enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_correct_g", self.p_correct_g), ("p_correct_e", self.p_correct_e)] {
            require((0.5..=1.0).contains(&p), name, p, "must lie in [0.5, 1]")?;
        }
        Ok(())
    }

    /// `[[P(even | even), P(even | odd)], [P(odd | even), P(odd | odd)]]`,
    /// reported outcome by row and actual parity by column.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        if self.enabled {
            [
                [self.p_correct_g, 1.0 - self.p_correct_e],
                [1.0 - self.p_correct_g, self.p_correct_e],
            ]
        } else {
            [[1.0, 0.0], [0.0, 1.0]]
        }
    }
}

/// Durations of the blocks of the multi-round entangling flow (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolTiming {
    pub initialize: f64,
    pub attempt: f64,
    pub reset_avg: f64,
    pub tomography: f64,
}

impl Default for ProtocolTiming {
    fn default() -> Self {
        Self {
            initialize: 2208e-9,
            attempt: 2364e-9,
            reset_avg: 774e-9,
            tomography: 2280e-9,
        }
    }
}

impl ProtocolTiming {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("initialize", self.initialize),
            ("attempt", self.attempt),
            ("reset_avg", self.reset_avg),
            ("tomography", self.tomography),
        ] {
            require(v.is_finite() && v >= 0.0, name, v, "must be finite and non-negative")?;
        }
        Ok(())
    }
}

/// One reported measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub probability: f64,
    /// Normalised post-measurement state.
    pub state: QState,
    /// Fidelity to the ideal state of this branch, when one is defined.
    pub fidelity: Option<f64>,
    /// Qubit-level fidelity after decoding, when requested.
    pub decoded_fidelity: Option<f64>,
}

/// Result of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub branches: Vec<Branch>,
    /// Probability-weighted mean fidelity over branches that carry one.
    pub weighted_fidelity: f64,
    pub success_probability: f64,
    /// Duration of the protocol (s).
    pub elapsed: f64,
}

impl ProtocolOutcome {
    pub(crate) fn new(branches: Vec<Branch>, success_probability: f64, elapsed: f64) -> Self {
        let (num, den) = branches
            .iter()
            .filter_map(|b| b.fidelity.map(|f| (b.probability * f, b.probability)))
            .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        let weighted_fidelity = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
        Self {
            branches,
            weighted_fidelity,
            success_probability,
            elapsed,
        }
    }

    pub fn branch(&self, label: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.label == label)
    }

    pub fn probability(&self, label: &str) -> f64 {
        self.branch(label).map_or(0.0, |b| b.probability)
    }

    /// Probability-weighted decoded fidelity over branches that carry one.
    pub fn weighted_decoded_fidelity(&self) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for b in &self.branches {
            if let Some(f) = b.decoded_fidelity {
                num += b.probability * f;
                den += b.probability;
            }
        }
        (den > 0.0).then(|| num / den)
    }
}

pub(crate) fn branch(label: &str, probability: f64, state: QState, fidelity: Option<f64>) -> Branch {
    Branch {
        label: label.to_string(),
        probability,
        state,
        fidelity,
        decoded_fidelity: None,
    }
}

/// Keeps the entries of `rho` whose row and column occupation of `mode`
/// both have parity `odd`.
pub(crate) fn parity_project(space: &ModeSpace, rho: &CMatrix, mode: usize, odd: bool) -> CMatrix {
    let keep: Vec<bool> = (0..space.total())
        .map(|i| (space.occupation_of(i, mode) % 2 == 1) == odd)
        .collect();
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        if keep[r] && keep[c] {
            rho[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Reported-outcome operators `(even, odd)` from the physical parity blocks
/// under the assignment model.
pub(crate) fn confuse(model: &MeasurementModel, even: &CMatrix, odd: &CMatrix) -> [CMatrix; 2] {
    let c = model.confusion();
    let mix = |row: [f64; 2]| even * C64::new(row[0], 0.0) + odd * C64::new(row[1], 0.0);
    [mix(c[0]), mix(c[1])]
}

/// QND parity measurement of `mode`. With the assignment model enabled the
/// reported label is confused classically; each reported branch holds the
/// matching mixture of projected states and its fidelity to the projection
/// with the same label.
pub fn parity_measure(state: &QState, mode: usize, model: &MeasurementModel) -> Result<ProtocolOutcome> {
    model.validate()?;
    let space = state.space();
    space.check_mode(mode)?;
    let rho = state.normalized().density_matrix();
    let even = parity_project(space, &rho, mode, false);
    let odd = parity_project(space, &rho, mode, true);
    let reported = confuse(model, &even, &odd);
    let mut branches = Vec::new();
    for ((label, op), ideal) in ["even", "odd"].iter().zip(&reported).zip([&even, &odd]) {
        let p = op.trace().re;
        if p <= EMPTY {
            continue;
        }
        let post = QState::mixed(space.clone(), op / C64::new(p, 0.0))?;
        let f = if ideal.trace().re > EMPTY {
            fidelity(&post, &QState::mixed(space.clone(), ideal.clone())?)?
        } else {
            0.0
        };
        branches.push(branch(label, p, post, Some(f)));
    }
    normalize_branches(&mut branches);
    Ok(ProtocolOutcome::new(branches, 1.0, 0.0))
}

pub(crate) fn normalize_branches(branches: &mut [Branch]) {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    if total > 0.0 {
        branches.iter_mut().for_each(|b| b.probability /= total);
    }
}

/// Logical measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalBasis {
    X,
    Y,
    Z,
}

impl LogicalBasis {
    pub fn cardinals(&self) -> (Cardinal, Cardinal) {
        match self {
            LogicalBasis::X => (Cardinal::PlusX, Cardinal::MinusX),
            LogicalBasis::Y => (Cardinal::PlusY, Cardinal::MinusY),
            LogicalBasis::Z => (Cardinal::PlusZ, Cardinal::MinusZ),
        }
    }
}

/// Default probability that a logical readout reports the wrong outcome.
pub const DEFAULT_DECODE_ERROR: f64 = 0.02;

/// Single-qubit vector `cos(theta/2) |0> + e^{i phi} sin(theta/2) |1>`.
pub(crate) fn qubit_vector(bloch: (f64, f64)) -> CVector {
    let e0 = CVector::from_column_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let e1 = CVector::from_column_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    encode_words(&e0, &e1, bloch)
}

/// Probabilities `(p_plus, p_minus)` of a logical readout along `basis`:
/// population outside the code is split evenly, then the outcome flips with
/// probability `decode_error`.
pub(crate) fn logical_probabilities(
    rho: &CMatrix,
    code: &LogicalCode,
    basis: LogicalBasis,
    decode_error: f64,
) -> (f64, f64) {
    let [w0, w1] = code.words();
    let (plus, minus) = basis.cardinals();
    let tp = encode_words(w0, w1, plus.bloch());
    let tm = encode_words(w0, w1, minus.bloch());
    let pp = tp.dotc(&(rho * &tp)).re;
    let pm = tm.dotc(&(rho * &tm)).re;
    let leak = (rho.trace().re - pp - pm).max(0.0);
    let (a, b) = (pp + leak / 2.0, pm + leak / 2.0);
    let total = a + b;
    let (a, b) = (a / total, b / total);
    ((1.0 - decode_error) * a + decode_error * b, (1.0 - decode_error) * b + decode_error * a)
}

/// Projective logical readout of a single cavity along `basis`. Post-states
/// are the qubit eigenstates of the reported outcome.
pub fn logical_measure(state: &QState, code: &LogicalCode, basis: LogicalBasis, decode_error: f64) -> Result<ProtocolOutcome> {
    require((0.0..=0.5).contains(&decode_error), "decode_error", decode_error, "must lie in [0, 0.5]")?;
    if state.space().modes() != 1 || state.space().total() != code.dim {
        return Err(Error::DimensionMismatch {
            expected: code.dim,
            found: state.space().total(),
        });
    }
    let rho = state.normalized().density_matrix();
    let (pp, pm) = logical_probabilities(&rho, code, basis, decode_error);
    let (plus, minus) = basis.cardinals();
    let qubit = ModeSpace::single(2)?;
    let mut branches = Vec::new();
    for (c, p) in [(plus, pp), (minus, pm)] {
        if p > EMPTY {
            let post = QState::pure(qubit.clone(), qubit_vector(c.bloch()))?;
            branches.push(branch(c.label(), p, post, Some(1.0)));
        }
    }
    Ok(ProtocolOutcome::new(branches, 1.0, 0.0))
}

/// Qubit-level fidelity of a cavity operator read out by the decoder: the
/// code-space block with leakage added evenly to both logical populations,
/// which leaves the Bloch vector unchanged, shrunk by `1 - 2 decode_error`.
pub(crate) fn decoded_fidelity(rho: &CMatrix, code: &LogicalCode, bloch: (f64, f64), decode_error: f64) -> f64 {
    let tr = rho.trace().re;
    if tr <= EMPTY {
        return 0.0;
    }
    let words = code.words();
    let q = CMatrix::from_fn(2, 2, |i, j| words[i].dotc(&(rho * words[j])) / C64::new(tr, 0.0));
    let shrink = 1.0 - 2.0 * decode_error;
    let x = 2.0 * q[(0, 1)].re * shrink;
    let y = -2.0 * q[(0, 1)].im * shrink;
    let z = (q[(0, 0)].re - q[(1, 1)].re) * shrink;
    let (theta, phi) = bloch;
    let target = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    (0.5 * (1.0 + x * target[0] + y * target[1] + z * target[2])).clamp(0.0, 1.0)
}
