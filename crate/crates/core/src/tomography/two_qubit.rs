use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::mle::{least_squares_density, MleOptions, MleReport};
use super::wigner::{wigner, GridSpec};
use super::mle_reconstruct;
use crate::codes::{encode_words, Cardinal, LogicalCode};
use crate::error::require;
use crate::fock::{ModeSpace, QState};
use crate::linalg::{self, TraceConstraint};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Labels of [`pauli_expectations`]; the first letter acts on cavity 1.
pub const PAULI_LABELS: [&str; 16] = [
    "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

const BASES: [(char, Cardinal, Cardinal); 3] = [
    ('x', Cardinal::PlusX, Cardinal::MinusX),
    ('y', Cardinal::PlusY, Cardinal::MinusY),
    ('z', Cardinal::PlusZ, Cardinal::MinusZ),
];

/// Cavity-1 states conditioned on the two outcomes of one cavity-2 logical
/// measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTomogram {
    pub p_plus: f64,
    pub p_minus: f64,
    pub rho_plus: QState,
    pub rho_minus: QState,
}

impl ConditionalTomogram {
    /// `p_minus` is set to `1 - p_plus`; the states are normalised.
    pub fn new(p_plus: f64, rho_plus: QState, rho_minus: QState) -> Result<Self> {
        require((0.0..=1.0).contains(&p_plus), "p_plus", p_plus, "must lie in [0, 1]")?;
        if rho_plus.space() != rho_minus.space() || rho_plus.space().modes() != 1 {
            return Err(Error::InvalidSpace("conditional states must share one single-mode space"));
        }
        rho_plus.validate()?;
        rho_minus.validate()?;
        Ok(Self {
            p_plus,
            p_minus: 1.0 - p_plus,
            rho_plus: rho_plus.normalized(),
            rho_minus: rho_minus.normalized(),
        })
    }

    fn dim(&self) -> usize {
        self.rho_plus.space().total()
    }
}

/// Conditional cavity-1 tomograms for cavity-2 measurements along `x`, `y`
/// and `z`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoQubitTomogramSet {
    pub x: Option<ConditionalTomogram>,
    pub y: Option<ConditionalTomogram>,
    pub z: Option<ConditionalTomogram>,
}

impl TwoQubitTomogramSet {
    fn get(&self, basis: char) -> Result<&ConditionalTomogram> {
        match basis {
            'x' => self.x.as_ref(),
            'y' => self.y.as_ref(),
            _ => self.z.as_ref(),
        }
        .ok_or(Error::MissingBasis(basis))
    }

    /// Simulated tomograms of a two-cavity state `(cavity 1, cavity 2)`.
    ///
    /// Cavity 2 is measured in the logical basis of `code_2`; population
    /// outside the code space is assigned to either outcome with equal
    /// probability.
    pub fn from_state(state: &QState, code_2: &LogicalCode) -> Result<Self> {
        let space = state.space();
        if space.modes() != 2 {
            return Err(Error::InvalidSpace("two-qubit tomography needs a two-mode state"));
        }
        let d1 = space.dim(0)?;
        let d2 = space.dim(1)?;
        if d2 != code_2.dim {
            return Err(Error::DimensionMismatch {
                expected: code_2.dim,
                found: d2,
            });
        }
        let rho = state.normalized().density_matrix();
        let [w0, w1] = code_2.words();
        let code_projector = w0 * w0.adjoint() + w1 * w1.adjoint();
        let leak = (CMatrix::identity(d2, d2) - code_projector) * C64::new(0.5, 0.0);
        let single = ModeSpace::single(d1)?;
        let mut out = TwoQubitTomogramSet::default();
        for (basis, plus, minus) in BASES {
            let branch = |c: Cardinal| -> (f64, CMatrix) {
                let t = encode_words(w0, w1, c.bloch());
                let m = &t * t.adjoint() + &leak;
                let mut r = CMatrix::zeros(d1, d1);
                for i1 in 0..d1 {
                    for j1 in 0..d1 {
                        let mut acc = C64::new(0.0, 0.0);
                        for i2 in 0..d2 {
                            for j2 in 0..d2 {
                                acc += rho[(i1 * d2 + i2, j1 * d2 + j2)] * m[(j2, i2)];
                            }
                        }
                        r[(i1, j1)] = acc;
                    }
                }
                let r = linalg::hermitian_part(&r);
                (r.trace().re, r)
            };
            let (pp, rp) = branch(plus);
            let (pm, rm) = branch(minus);
            let conditional = |p: f64, r: CMatrix| -> Result<QState> {
                if p > 1e-14 {
                    QState::mixed(single.clone(), r / C64::new(p, 0.0))
                } else {
                    Ok(QState::maximally_mixed(single.clone()))
                }
            };
            let p_plus = (pp / (pp + pm)).clamp(0.0, 1.0);
            let tomo = ConditionalTomogram::new(p_plus, conditional(pp, rp)?, conditional(pm, rm)?)?;
            match basis {
                'x' => out.x = Some(tomo),
                'y' => out.y = Some(tomo),
                _ => out.z = Some(tomo),
            }
        }
        Ok(out)
    }

    /// Replaces every conditional state by its Wigner-MLE reconstruction at
    /// dimension `dim`, sampled on `spec`.
    pub fn through_wigner(&self, spec: &GridSpec, dim: usize) -> Result<Self> {
        let redo = |t: &Option<ConditionalTomogram>| -> Result<Option<ConditionalTomogram>> {
            match t {
                None => Ok(None),
                Some(t) => {
                    let plus = mle_reconstruct(&wigner(&t.rho_plus, spec)?, dim)?;
                    let minus = mle_reconstruct(&wigner(&t.rho_minus, spec)?, dim)?;
                    Ok(Some(ConditionalTomogram::new(t.p_plus, plus, minus)?))
                }
            }
        };
        Ok(Self {
            x: redo(&self.x)?,
            y: redo(&self.y)?,
            z: redo(&self.z)?,
        })
    }
}

/// Reconstructed logical two-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitResult {
    /// `4 x 4` density matrix, cavity 1 first, trace at most 1.
    pub rho: CMatrix,
    /// Pauli expectations in [`PAULI_LABELS`] order.
    pub paulis: [f64; 16],
    /// Joint probabilities `p(k, l)`: cavity-2 outcome `l` outer
    /// (`+x, -x, +y, -y, +z, -z`), cavity-1 outcome `k` inner in the same order.
    pub joint: Vec<f64>,
    pub report: MleReport,
}

impl TwoQubitResult {
    pub fn trace(&self) -> f64 {
        self.paulis[0]
    }

    /// `<psi| rho |psi>` for a logical two-qubit vector.
    pub fn overlap(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.rho * psi)).re
    }
}

fn cardinal_outcomes() -> [Cardinal; 6] {
    [
        Cardinal::PlusX,
        Cardinal::MinusX,
        Cardinal::PlusY,
        Cardinal::MinusY,
        Cardinal::PlusZ,
        Cardinal::MinusZ,
    ]
}

fn qubit_projector(c: Cardinal) -> CMatrix {
    let e0 = CVector::from_column_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let e1 = CVector::from_column_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let v = encode_words(&e0, &e1, c.bloch());
    &v * v.adjoint()
}

/// Two-qubit state from conditional cavity-1 tomograms.
///
/// Forms `p(k, l) = p_l Tr[rho_l Pi_k]` with pure logical projectors `Pi_k`
/// of `code_1` for all 36 outcome pairs and fits them with `Tr[rho_L
/// (pi_k x pi_l)]` over positive matrices with trace at most 1, so
/// population outside the cavity-1 code space lowers the trace.
pub fn two_qubit_reconstruct(tomos: &TwoQubitTomogramSet, code_1: &LogicalCode) -> Result<TwoQubitResult> {
    two_qubit_reconstruct_with(tomos, code_1, MleOptions::default())
}

pub(crate) fn two_qubit_reconstruct_with(
    tomos: &TwoQubitTomogramSet,
    code_1: &LogicalCode,
    options: MleOptions,
) -> Result<TwoQubitResult> {
    let conditionals = [tomos.get('x')?, tomos.get('y')?, tomos.get('z')?];
    for t in conditionals {
        if t.dim() != code_1.dim {
            return Err(Error::DimensionMismatch {
                expected: code_1.dim,
                found: t.dim(),
            });
        }
    }
    let [w0, w1] = code_1.words();
    let outcomes = cardinal_outcomes();
    let targets: Vec<CVector> = outcomes.iter().map(|c| encode_words(w0, w1, c.bloch())).collect();
    let mut joint = Vec::with_capacity(36);
    let mut ops = Vec::with_capacity(36);
    for (b, t) in conditionals.iter().enumerate() {
        for (sign, (p, rho)) in [(t.p_plus, &t.rho_plus), (t.p_minus, &t.rho_minus)].into_iter().enumerate() {
            let l = outcomes[2 * b + sign];
            let m = rho.density_matrix();
            for (k, v) in outcomes.iter().zip(&targets) {
                joint.push(p * v.dotc(&(&m * v)).re);
                ops.push(linalg::kron(&qubit_projector(*k), &qubit_projector(l)));
            }
        }
    }
    let (rho, report) = least_squares_density(&ops, &joint, 4, TraceConstraint::AtMostUnit, options)?;
    let paulis = pauli_expectations(&rho)?;
    Ok(TwoQubitResult {
        rho,
        paulis,
        joint,
        report,
    })
}

fn pauli(i: usize) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let j = C64::new(0.0, 1.0);
    let entries = match i {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -j, j, z],
        _ => [o, z, z, -o],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

fn check_two_qubit(rho: &CMatrix) -> Result<()> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.nrows(),
        });
    }
    Ok(())
}

/// `Tr[rho (sigma_i x sigma_j)]` for `i, j` in `I, X, Y, Z`, first index on
/// cavity 1. The `II` entry is the trace.
pub fn pauli_expectations(rho: &CMatrix) -> Result<[f64; 16]> {
    check_two_qubit(rho)?;
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            let op = linalg::kron(&pauli(i), &pauli(j));
            out[4 * i + j] = (rho * op).trace().re;
        }
    }
    Ok(out)
}

/// Wootters concurrence of the normalised two-qubit state.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Degenerate("two-qubit state has no weight"));
    }
    let r = linalg::hermitian_part(rho) / C64::new(tr, 0.0);
    let yy = linalg::kron(&pauli(2), &pauli(2));
    let flipped = &yy * r.map(|z| z.conj()) * &yy;
    let s = linalg::sqrt_psd(&r);
    let inner = linalg::hermitian_part(&(&s * flipped * &s));
    let (vals, _) = linalg::eigh(&inner);
    let mut roots: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Qubit density matrix `<w_i| rho |w_j>` of a single-cavity state in the
/// code words of `code`.
pub fn logical_density(state: &QState, code: &LogicalCode) -> Result<CMatrix> {
    if state.space().modes() != 1 || state.space().total() != code.dim {
        return Err(Error::DimensionMismatch {
            expected: code.dim,
            found: state.space().total(),
        });
    }
    let rho = state.density_matrix();
    let words = code.words();
    Ok(CMatrix::from_fn(2, 2, |i, j| words[i].dotc(&(&rho * words[j]))))
}
