use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::measure::{
    branch, confuse, decoded_fidelity, normalize_branches, MeasurementModel, ProtocolOutcome, DEFAULT_DECODE_ERROR, EMPTY,
};
use crate::codes::{
    encode_words, fit_post_transfer_basis, fit_rotation, parity_branches, BranchState, CodeKind, LogicalCode, Parity,
    CARDINALS,
};
use crate::dynamics::{EvolveConfig, Evolver, ThreeModeParams, CAVITY_2};
use crate::error::require;
use crate::fock::{partial_trace_operator, ModeSpace, QState};
use crate::linalg::{hermitian_part, kron};
use crate::{CMatrix, Error, Result, C64};

/// Truncations and solver options of a protocol simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    /// Cavity dimension for Fock-state protocols; transfers use the code
    /// dimension instead.
    pub cavity_dim: usize,
    pub bus_dim: usize,
    /// Mean thermal occupation of cavity 2 at the start.
    pub thermal_cavity_2: f64,
    /// Mean thermal occupation of the bus at the start.
    pub thermal_bus: f64,
    pub evolve: EvolveConfig,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self::fock()
    }
}

impl SimSettings {
    /// Few-photon Fock-state protocols.
    pub fn fock() -> Self {
        Self {
            cavity_dim: 5,
            bus_dim: 5,
            thermal_cavity_2: 0.0,
            thermal_bus: 0.0,
            evolve: EvolveConfig::default(),
        }
    }

    /// Cat-code transfers.
    pub fn cat() -> Self {
        Self {
            cavity_dim: 15,
            bus_dim: 5,
            ..Self::fock()
        }
    }

    /// Settings suited to `code`.
    pub fn for_code(code: &LogicalCode) -> Self {
        match code.kind {
            CodeKind::Cat => Self {
                cavity_dim: code.dim,
                ..Self::cat()
            },
            _ => Self {
                cavity_dim: code.dim,
                ..Self::fock()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.cavity_dim >= 2, "cavity_dim", self.cavity_dim as f64, "must be at least 2")?;
        require(self.bus_dim >= 2, "bus_dim", self.bus_dim as f64, "must be at least 2")?;
        for (name, v) in [("thermal_cavity_2", self.thermal_cavity_2), ("thermal_bus", self.thermal_bus)] {
            require(v.is_finite() && v >= 0.0, name, v, "must be finite and non-negative")?;
        }
        Ok(())
    }
}

/// Truncated thermal state with mean occupation `nbar` (vacuum at zero).
pub(crate) fn thermal(dim: usize, nbar: f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    if nbar <= 0.0 {
        m[(0, 0)] = C64::new(1.0, 0.0);
        return m;
    }
    let ratio = nbar / (1.0 + nbar);
    let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    for (n, w) in weights.iter().enumerate() {
        m[(n, n)] = C64::new(w / total, 0.0);
    }
    m
}

/// Options of [`transfer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferOptions {
    pub track_parity: bool,
    pub decode: bool,
    pub model: MeasurementModel,
    pub decode_error: f64,
    /// Defaults to [`SimSettings::for_code`].
    pub settings: Option<SimSettings>,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            track_parity: false,
            decode: false,
            model: MeasurementModel::IDEAL,
            decode_error: DEFAULT_DECODE_ERROR,
            settings: None,
        }
    }
}

impl TransferOptions {
    pub fn tracked() -> Self {
        Self {
            track_parity: true,
            ..Self::default()
        }
    }

    fn validate(&self, code: &LogicalCode) -> Result<()> {
        self.model.validate()?;
        require((0.0..=0.5).contains(&self.decode_error), "decode_error", self.decode_error, "must lie in [0, 0.5]")?;
        if self.track_parity && matches!(code.kind, CodeKind::Fock { .. }) {
            return Err(Error::InvalidParameter {
                name: "track_parity",
                value: 1.0,
                reason: "parity tracking needs a cat or binomial code",
            });
        }
        Ok(())
    }
}

/// Linear map from encoded cavity-1 inputs to received cavity-2 operators,
/// obtained by evolving `|w_i><w_j|` with cavity 2 and bus in their initial
/// states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferChannel {
    code: LogicalCode,
    received: [[CMatrix; 2]; 2],
    duration: f64,
}

impl TransferChannel {
    /// Resonant swap of `code` from cavity 1 to cavity 2 under `params`.
    pub fn simulate(code: &LogicalCode, params: &ThreeModeParams, settings: &SimSettings) -> Result<Self> {
        settings.validate()?;
        let params = params.with_delta(0.0);
        params.check_underdamped()?;
        let d = code.dim;
        let space = ModeSpace::new(&[d, d, settings.bus_dim])?;
        let rest = kron(&thermal(d, settings.thermal_cavity_2), &thermal(settings.bus_dim, settings.thermal_bus));
        let [w0, w1] = code.words();
        let init = |a: &crate::CVector, b: &crate::CVector| kron(&(a * b.adjoint()), &rest);
        let ops = [init(w0, w0), init(w1, w1), init(w0, w1)];
        let duration = params.t_swap();
        let evolver = Evolver::for_operators(&space, &params, duration, settings.evolve, &[&ops[0], &ops[1], &ops[2]])?;
        let mut out = Vec::with_capacity(3);
        for op in &ops {
            out.push(partial_trace_operator(&space, &evolver.propagate(op)?, &[CAVITY_2])?);
        }
        let r01 = out.pop().expect("three operators");
        let r11 = out.pop().expect("three operators");
        let r00 = out.pop().expect("three operators");
        let r10 = r01.adjoint();
        Ok(Self {
            code: code.clone(),
            received: [[r00, r01], [r10, r11]],
            duration,
        })
    }

    pub fn code(&self) -> &LogicalCode {
        &self.code
    }

    /// Swap duration (s).
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Cavity-2 density matrix received for the input Bloch point.
    pub fn received(&self, (theta, phi): (f64, f64)) -> CMatrix {
        let c = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)];
        let mut rho = CMatrix::zeros(self.code.dim, self.code.dim);
        for i in 0..2 {
            for j in 0..2 {
                rho += &self.received[i][j] * (c[i] * c[j].conj());
            }
        }
        hermitian_part(&rho)
    }

    /// Reported parity branches `(even, odd)` of the received state.
    fn reported(&self, bloch: (f64, f64), model: &MeasurementModel) -> [CMatrix; 2] {
        let (even, odd) = parity_branches(&self.received(bloch));
        confuse(model, &even, &odd)
    }

    /// Receiver bases fitted over the six cardinal inputs.
    pub fn calibrate(&self, options: &TransferOptions) -> Result<TransferBases> {
        options.validate(&self.code)?;
        let code = &self.code;
        let points: Vec<(f64, f64)> = CARDINALS.iter().map(|c| c.bloch()).collect();
        let whole: Vec<BranchState> = points.iter().map(|&b| (self.received(b), b)).collect();
        let fit = |parity: Parity, ops: &[BranchState]| -> Result<LogicalCode> {
            Ok(fit_post_transfer_basis(code.kind, parity, code.dim, code.alpha, ops)?.0)
        };
        let no_syndrome = match code.kind {
            CodeKind::Fock { .. } => fit_rotation(code, &whole).0,
            _ => fit(Parity::Even, &whole)?,
        };
        if !options.track_parity {
            return Ok(TransferBases {
                even: None,
                odd: None,
                no_syndrome,
            });
        }
        let mut even = Vec::with_capacity(points.len());
        let mut odd = Vec::with_capacity(points.len());
        for &b in &points {
            let [e, o] = self.reported(b, &options.model);
            even.push((e, b));
            odd.push((o, b));
        }
        Ok(TransferBases {
            even: Some(fit(Parity::Even, &even)?),
            odd: Some(fit(Parity::Odd, &odd)?),
            no_syndrome,
        })
    }

    /// Outcome for one input, scored in calibrated bases.
    pub fn outcome(&self, bases: &TransferBases, bloch: (f64, f64), options: &TransferOptions) -> Result<ProtocolOutcome> {
        options.validate(&self.code)?;
        let single = ModeSpace::single(self.code.dim)?;
        let mut branches = Vec::new();
        let scored: Vec<(&str, CMatrix, &LogicalCode)> = match (&bases.even, &bases.odd, options.track_parity) {
            (Some(e), Some(o), true) => {
                let [re, ro] = self.reported(bloch, &options.model);
                alloc::vec![("even", re, e), ("odd", ro, o)]
            }
            (_, _, true) => {
                return Err(Error::InvalidParameter {
                    name: "track_parity",
                    value: 1.0,
                    reason: "bases were calibrated without parity tracking",
                })
            }
            _ => alloc::vec![("none", self.received(bloch), &bases.no_syndrome)],
        };
        for (label, op, basis) in scored {
            let p = op.trace().re;
            if p <= EMPTY {
                continue;
            }
            let [w0, w1] = basis.words();
            let t = encode_words(w0, w1, bloch);
            let f = (t.dotc(&(&op * &t)).re / p).clamp(0.0, 1.0);
            let state = QState::mixed(single.clone(), &op / C64::new(p, 0.0))?;
            let mut b = branch(label, p, state, Some(f));
            if options.decode {
                b.decoded_fidelity = Some(decoded_fidelity(&op, basis, bloch, options.decode_error));
            }
            branches.push(b);
        }
        normalize_branches(&mut branches);
        Ok(ProtocolOutcome::new(branches, 1.0, self.duration))
    }

    /// Fidelity of the received state, ignoring any syndrome, against the
    /// no-syndrome basis.
    pub fn no_syndrome_fidelity(&self, bases: &TransferBases, bloch: (f64, f64)) -> f64 {
        let [w0, w1] = bases.no_syndrome.words();
        let t = encode_words(w0, w1, bloch);
        t.dotc(&(&self.received(bloch) * &t)).re.clamp(0.0, 1.0)
    }
}

/// Receiver bases: one per reported parity when tracking, and one fitted to
/// the unconditioned received states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferBases {
    pub even: Option<LogicalCode>,
    pub odd: Option<LogicalCode>,
    pub no_syndrome: LogicalCode,
}

/// Encodes `bloch` in `code` in cavity 1, swaps it to cavity 2 on resonance
/// and scores the received state. With tracking, cavity 2 parity is read and
/// each reported branch is scored in its own receiver basis; the bases are
/// fitted over the six cardinal inputs.
pub fn transfer(code: &LogicalCode, bloch: (f64, f64), params: &ThreeModeParams, options: &TransferOptions) -> Result<ProtocolOutcome> {
    let settings = options.settings.unwrap_or_else(|| SimSettings::for_code(code));
    let channel = TransferChannel::simulate(code, params, &settings)?;
    let bases = channel.calibrate(options)?;
    channel.outcome(&bases, bloch, options)
}

/// Per-input transfer statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow {
    pub label: String,
    /// Probability of reporting odd parity (0 without tracking).
    pub p_odd: f64,
    pub no_syndrome: f64,
    /// Fidelity given a reported even parity (tracking only).
    pub even: Option<f64>,
    /// Fidelity given a reported odd parity (tracking only).
    pub odd: Option<f64>,
    /// Probability-weighted fidelity of the protocol outcome.
    pub weighted: f64,
    pub decoded: Option<f64>,
}

/// Transfer statistics over the six cardinal inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub code: String,
    pub alpha: f64,
    pub rows: Vec<TransferRow>,
    pub mean: TransferRow,
    pub bases: TransferBases,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<Option<f64>> = values.collect();
    if v.iter().any(|x| x.is_none()) || v.is_empty() {
        return None;
    }
    Some(v.iter().map(|x| x.unwrap_or(0.0)).sum::<f64>() / v.len() as f64)
}

/// [`transfer`] for all six cardinal inputs, sharing one simulation.
pub fn transfer_report(code: &LogicalCode, params: &ThreeModeParams, options: &TransferOptions) -> Result<TransferReport> {
    let settings = options.settings.unwrap_or_else(|| SimSettings::for_code(code));
    let channel = TransferChannel::simulate(code, params, &settings)?;
    let bases = channel.calibrate(options)?;
    let mut rows = Vec::with_capacity(CARDINALS.len());
    for c in CARDINALS {
        let out = channel.outcome(&bases, c.bloch(), options)?;
        let fid = |label: &str| out.branch(label).and_then(|b| b.fidelity);
        rows.push(TransferRow {
            label: c.label().to_string(),
            p_odd: out.probability("odd"),
            no_syndrome: channel.no_syndrome_fidelity(&bases, c.bloch()),
            even: fid("even"),
            odd: fid("odd"),
            weighted: out.weighted_fidelity,
            decoded: out.weighted_decoded_fidelity(),
        });
    }
    let n = rows.len() as f64;
    let mean = TransferRow {
        label: "mean".to_string(),
        p_odd: rows.iter().map(|r| r.p_odd).sum::<f64>() / n,
        no_syndrome: rows.iter().map(|r| r.no_syndrome).sum::<f64>() / n,
        even: mean_of(rows.iter().map(|r| r.even)),
        odd: mean_of(rows.iter().map(|r| r.odd)),
        weighted: rows.iter().map(|r| r.weighted).sum::<f64>() / n,
        decoded: mean_of(rows.iter().map(|r| r.decoded)),
    };
    Ok(TransferReport {
        code: code.kind.name().to_string(),
        alpha: code.alpha,
        rows,
        mean,
        bases,
    })
}
