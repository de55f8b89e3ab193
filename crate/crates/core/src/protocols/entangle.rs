use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::measure::{branch, normalize_branches, parity_project, MeasurementModel, ProtocolOutcome, EMPTY};
use super::transfer::SimSettings;
use crate::beamsplitter::{bs_time, detuning_for_angle};
use crate::codes::{build_code, CodeKind};
use crate::dynamics::{Evolver, LossChannel, ThreeModeParams, CAVITY_1, CAVITY_2};
use crate::error::require;
use crate::fock::{partial_trace_operator, ModeSpace, QState};
use crate::linalg::{eigh, hermitian_part};
use crate::tomography::{two_qubit_reconstruct, TwoQubitResult, TwoQubitTomogramSet};
use crate::{CMatrix, CVector, Result, C64};

/// Outcome of an entangling protocol with its loss-free target.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementResult {
    pub outcome: ProtocolOutcome,
    /// Two-cavity state produced by the same sequence without dissipation.
    pub target: QState,
    /// Logical two-qubit reconstruction of the (successful) output.
    pub tomography: TwoQubitResult,
}

impl EntanglementResult {
    /// Fidelity of the successful branch.
    pub fn fidelity(&self) -> f64 {
        self.outcome.weighted_fidelity
    }
}

/// Two-cavity state after exactly one bus photon jump, restricted to one
/// photon in the cavities as heralded by a single odd parity.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpConditioned {
    /// Probability of exactly one bus jump.
    pub probability: f64,
    /// Fraction of the one-jump weight with the remaining photon in the
    /// cavities rather than the bus.
    pub in_cavities: f64,
    /// Normalised one-photon two-cavity state.
    pub state: QState,
    /// Overlap with the nearest maximally entangled single-photon state,
    /// `(p01 + p10) / 2 + |rho_{01,10}|`.
    pub symmetric_overlap: f64,
}

/// One constant-coupling segment: `(g1, g2)` and duration.
type Segment = ((f64, f64), f64);

fn three_mode_space(settings: &SimSettings) -> Result<ModeSpace> {
    settings.validate()?;
    ModeSpace::new(&[settings.cavity_dim, settings.cavity_dim, settings.bus_dim])
}

fn fock_input(space: &ModeSpace, n1: usize, n2: usize) -> Result<CMatrix> {
    Ok(QState::basis(space.clone(), &[n1, n2, 0])?.density_matrix())
}

fn evolver(space: &ModeSpace, params: &ThreeModeParams, settings: &SimSettings, seg: Segment, rho: &CMatrix) -> Result<Evolver> {
    let ((g1, g2), t) = seg;
    Evolver::for_operator(space, params, t, settings.evolve.with_couplings(g1, g2), rho)
}

/// Runs the segments, splitting the result by the number of bus jumps
/// (last entry: `max_jumps` or more).
fn run_resolved(
    space: &ModeSpace,
    params: &ThreeModeParams,
    settings: &SimSettings,
    segments: &[Segment],
    rho0: &CMatrix,
    max_jumps: usize,
) -> Result<Vec<CMatrix>> {
    let n = space.total();
    let mut blocks = alloc::vec![CMatrix::zeros(n, n); max_jumps + 1];
    blocks[0] = rho0.clone();
    for &seg in segments {
        let mut next = alloc::vec![CMatrix::zeros(n, n); max_jumps + 1];
        for (i, b) in blocks.iter().enumerate() {
            if b.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let parts = evolver(space, params, settings, seg, b)?.propagate_resolved(b, LossChannel::Bus, max_jumps)?;
            for (j, p) in parts.into_iter().enumerate() {
                next[(i + j).min(max_jumps)] += p;
            }
        }
        blocks = next;
    }
    Ok(blocks)
}

fn run(space: &ModeSpace, params: &ThreeModeParams, settings: &SimSettings, segments: &[Segment], rho0: &CMatrix) -> Result<CMatrix> {
    let mut rho = rho0.clone();
    for &seg in segments {
        rho = evolver(space, params, settings, seg, &rho)?.propagate(&rho)?;
    }
    Ok(hermitian_part(&rho))
}

fn cavities(space: &ModeSpace, rho: &CMatrix) -> Result<CMatrix> {
    Ok(hermitian_part(&partial_trace_operator(space, rho, &[CAVITY_1, CAVITY_2])?))
}

/// Dominant eigenvector of a (nearly pure) loss-free output.
fn pure_part(rho: &CMatrix) -> CVector {
    let (_, vecs) = eigh(rho);
    vecs.column(rho.nrows() - 1).into_owned()
}

fn overlap(psi: &CVector, rho: &CMatrix) -> f64 {
    psi.dotc(&(rho * psi)).re
}

/// `(p01 + p10) / 2 + |rho_{01,10}|` of a normalised two-cavity operator
/// with cavity dimension `d`.
pub fn max_entangled_fidelity(rho: &CMatrix, d: usize) -> f64 {
    let tr = rho.trace().re;
    if tr <= 0.0 {
        return 0.0;
    }
    let (a, b) = (1, d);
    ((rho[(a, a)].re + rho[(b, b)].re) / 2.0 + rho[(a, b)].norm()) / tr
}

fn fifty_fifty(params: &ThreeModeParams) -> Result<(ThreeModeParams, Segment)> {
    params.check_underdamped()?;
    let delta = detuning_for_angle(params.g, FRAC_PI_4)?;
    let t = bs_time(params.g, delta);
    Ok((params.with_delta(delta), ((params.g, params.g), t)))
}

fn two_cavity_space(d: usize) -> Result<ModeSpace> {
    ModeSpace::new(&[d, d])
}

fn tomography(state: &QState, code_hi: usize, d: usize) -> Result<TwoQubitResult> {
    let code = build_code(CodeKind::Fock { lo: 0, hi: code_hi }, 0.0, d)?;
    two_qubit_reconstruct(&TwoQubitTomogramSet::from_state(state, &code)?, &code)
}

/// A single photon in cavity 1 through the detuned 50:50 beamsplitter.
/// Scored against the loss-free output; the logical reconstruction uses the
/// Fock code `|0>, |1>` in both cavities.
pub fn entangle_single_photon(params: &ThreeModeParams, settings: &SimSettings) -> Result<EntanglementResult> {
    let space = three_mode_space(settings)?;
    let (p, seg) = fifty_fifty(params)?;
    let rho0 = fock_input(&space, 1, 0)?;
    let out = cavities(&space, &run(&space, &p, settings, &[seg], &rho0)?)?;
    let ideal = cavities(&space, &run(&space, &p.without_loss(), settings, &[seg], &rho0)?)?;
    let psi = pure_part(&ideal);
    let pair = two_cavity_space(settings.cavity_dim)?;
    let tr = out.trace().re;
    let state = QState::mixed(pair.clone(), &out / C64::new(tr, 0.0))?;
    let f = overlap(&psi, &out) / tr;
    let tomo = tomography(&state, 1, settings.cavity_dim)?;
    let outcome = ProtocolOutcome::new(alloc::vec![branch("all", 1.0, state, Some(f.clamp(0.0, 1.0)))], 1.0, seg.1);
    Ok(EntanglementResult {
        outcome,
        target: QState::pure(pair, psi)?,
        tomography: tomo,
    })
}

/// Reported parity branches of both cavities of a two-cavity operator,
/// labelled `"<cavity 1>,<cavity 2>"`.
fn joint_parity(pair: &ModeSpace, rho: &CMatrix, model: &MeasurementModel) -> Vec<(alloc::string::String, CMatrix)> {
    let c = model.confusion();
    let parities = [false, true];
    let names = ["even", "odd"];
    let mut physical = [[CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)], [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)]];
    for (a, &pa) in parities.iter().enumerate() {
        let first = parity_project(pair, rho, 0, pa);
        for (b, &pb) in parities.iter().enumerate() {
            physical[a][b] = parity_project(pair, &first, 1, pb);
        }
    }
    let mut out = Vec::with_capacity(4);
    for r1 in 0..2 {
        for r2 in 0..2 {
            let mut m = CMatrix::zeros(rho.nrows(), rho.ncols());
            for a in 0..2 {
                for b in 0..2 {
                    let w = c[r1][a] * c[r2][b];
                    if w > 0.0 {
                        m += &physical[a][b] * C64::new(w, 0.0);
                    }
                }
            }
            out.push((format!("{},{}", names[r1], names[r2]), m));
        }
    }
    out
}

/// One photon in each cavity through the 50:50 beamsplitter, then a
/// simultaneous parity readout of both cavities. Success is a reported
/// `even,even`; the successful state is scored against the loss-free output
/// and reconstructed in the Fock code `|0>, |2>`.
pub fn entangle_hom(params: &ThreeModeParams, model: &MeasurementModel, settings: &SimSettings) -> Result<EntanglementResult> {
    model.validate()?;
    require(settings.cavity_dim >= 4, "cavity_dim", settings.cavity_dim as f64, "must be at least 4")?;
    let space = three_mode_space(settings)?;
    let (p, seg) = fifty_fifty(params)?;
    let rho0 = fock_input(&space, 1, 1)?;
    let out = cavities(&space, &run(&space, &p, settings, &[seg], &rho0)?)?;
    let ideal = cavities(&space, &run(&space, &p.without_loss(), settings, &[seg], &rho0)?)?;
    let psi = pure_part(&ideal);
    let d = settings.cavity_dim;
    let pair = two_cavity_space(d)?;
    let mut branches = Vec::new();
    let mut success = None;
    for (label, m) in joint_parity(&pair, &out, model) {
        let prob = m.trace().re;
        if prob <= EMPTY {
            continue;
        }
        let state = QState::mixed(pair.clone(), &m / C64::new(prob, 0.0))?;
        let fid = if label == "even,even" {
            success = Some(state.clone());
            Some((overlap(&psi, &m) / prob).clamp(0.0, 1.0))
        } else {
            None
        };
        branches.push(branch(&label, prob, state, fid));
    }
    normalize_branches(&mut branches);
    let p_success = branches.iter().find(|b| b.label == "even,even").map_or(0.0, |b| b.probability);
    let tomo = match &success {
        Some(s) => tomography(s, 2, d)?,
        None => tomography(&QState::mixed(pair.clone(), ideal.clone())?, 2, d)?,
    };
    Ok(EntanglementResult {
        outcome: ProtocolOutcome::new(branches, p_success, seg.1),
        target: QState::pure(pair, psi)?,
        tomography: tomo,
    })
}

fn jump_conditioned(
    space: &ModeSpace,
    params: &ThreeModeParams,
    settings: &SimSettings,
    segments: &[Segment],
) -> Result<JumpConditioned> {
    let rho0 = fock_input(space, 1, 1)?;
    let blocks = run_resolved(space, params, settings, segments, &rho0, 2)?;
    let one = cavities(space, &blocks[1])?;
    let prob = one.trace().re;
    require(prob > EMPTY, "kappa_b", params.kappa_b, "no bus jump occurs")?;
    let d = settings.cavity_dim;
    let pair = two_cavity_space(d)?;
    let single = CMatrix::from_fn(one.nrows(), one.ncols(), |r, c| {
        if pair.excitations(r) == 1 && pair.excitations(c) == 1 {
            one[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let kept = single.trace().re;
    require(kept > EMPTY, "kappa_b", params.kappa_b, "no photon remains in the cavities")?;
    let normed = &single / C64::new(kept, 0.0);
    Ok(JumpConditioned {
        probability: prob,
        in_cavities: kept / prob,
        symmetric_overlap: max_entangled_fidelity(&normed, d),
        state: QState::mixed(pair, normed)?,
    })
}

/// HOM sequence conditioned on exactly one bus photon jump. The remaining
/// photon is shared symmetrically between the cavities.
pub fn hom_jump_conditioned(params: &ThreeModeParams, settings: &SimSettings) -> Result<JumpConditioned> {
    let space = three_mode_space(settings)?;
    let (p, seg) = fifty_fifty(params)?;
    jump_conditioned(&space, &p, settings, &[seg])
}

/// Alternative routes to a single-photon Bell state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternateScheme {
    /// Half of the photon into the bus (`g2 = 0` for `pi / (4 g)`), then the
    /// bus fully into cavity 2 (`g1 = 0` for `pi / (2 g)`).
    SequentialHalfSwap,
    /// Simultaneous resonant conversion with `g1 = (sqrt(2) - 1) g`,
    /// `g2 = g` for `pi / sqrt(g1^2 + g2^2)`.
    UnequalCouplings,
}

impl AlternateScheme {
    fn segments(&self, g: f64) -> Vec<Segment> {
        match self {
            AlternateScheme::SequentialHalfSwap => {
                alloc::vec![((g, 0.0), FRAC_PI_4 / g), ((0.0, g), FRAC_PI_2 / g)]
            }
            AlternateScheme::UnequalCouplings => {
                let g1 = (2f64.sqrt() - 1.0) * g;
                alloc::vec![((g1, g), PI / (g1 * g1 + g * g).sqrt())]
            }
        }
    }
}

/// Result of an alternate entangling scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternateResult {
    /// Single-photon run; the fidelity is the overlap with the nearest
    /// maximally entangled single-photon state.
    pub outcome: ProtocolOutcome,
    /// Two-photon run conditioned on one bus jump; absent without bus loss.
    pub jump: Option<JumpConditioned>,
}

/// Runs an alternate scheme on resonance: a single photon for the Bell
/// fidelity and a photon pair for the jump-conditioned symmetry diagnostic.
pub fn asymmetric_entangle(scheme: AlternateScheme, params: &ThreeModeParams, settings: &SimSettings) -> Result<AlternateResult> {
    params.check_underdamped()?;
    let space = three_mode_space(settings)?;
    let p = params.with_delta(0.0);
    let segments = scheme.segments(p.g);
    let rho0 = fock_input(&space, 1, 0)?;
    let out = cavities(&space, &run(&space, &p, settings, &segments, &rho0)?)?;
    let tr = out.trace().re;
    let d = settings.cavity_dim;
    let state = QState::mixed(two_cavity_space(d)?, &out / C64::new(tr, 0.0))?;
    let f = max_entangled_fidelity(&out, d);
    let elapsed = segments.iter().map(|s| s.1).sum();
    let outcome = ProtocolOutcome::new(alloc::vec![branch("all", 1.0, state, Some(f.clamp(0.0, 1.0)))], 1.0, elapsed);
    Ok(AlternateResult {
        outcome,
        jump: if p.kappa_b > 0.0 {
            Some(jump_conditioned(&space, &p, settings, &segments)?)
        } else {
            None
        },
    })
}
