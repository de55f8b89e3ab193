use alloc::vec::Vec;

use super::generator::{Basis, Envelope, Generator, LossChannel, SectorMask};
use super::integrate::{dormand_prince, rk4, taylor, Integrator, Tolerances};
use super::ThreeModeParams;
use crate::error::require;
use crate::fock::{ModeSpace, QState, Repr};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Options for master-equation evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub integrator: Integrator,
    pub tolerances: Tolerances,
    pub envelope: Envelope,
    /// Per-cavity couplings `(g1, g2)` replacing the common `g`.
    pub couplings: Option<(f64, f64)>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            integrator: Integrator::Auto,
            tolerances: Tolerances::default(),
            envelope: Envelope::Rectangular,
            couplings: None,
        }
    }
}

impl EvolveConfig {
    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn with_couplings(mut self, g1: f64, g2: f64) -> Self {
        self.couplings = Some((g1, g2));
        self
    }
}

fn check_three_mode(space: &ModeSpace) -> Result<()> {
    if space.modes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: space.modes(),
        });
    }
    Ok(())
}

/// Reusable master-equation propagator for a fixed space, parameter set and
/// duration. Operators are propagated on the basis of states with at most
/// `cap` excitations.
#[derive(Debug, Clone)]
pub struct Evolver {
    basis: Basis,
    generator: Generator,
    duration: f64,
    config: EvolveConfig,
}

impl Evolver {
    pub fn new(space: &ModeSpace, params: &ThreeModeParams, duration: f64, config: EvolveConfig, cap: usize) -> Result<Self> {
        check_three_mode(space)?;
        params.validate()?;
        require(duration.is_finite() && duration >= 0.0, "t", duration, "must be finite and non-negative")?;
        let couplings = config.couplings.unwrap_or((params.g, params.g));
        require(couplings.0.is_finite(), "g1", couplings.0, "must be finite")?;
        require(couplings.1.is_finite(), "g2", couplings.1, "must be finite")?;
        if matches!(config.integrator, Integrator::Taylor) && !config.envelope.is_constant() {
            return Err(Error::InvalidParameter {
                name: "integrator",
                value: 0.0,
                reason: "Taylor propagation needs a rectangular envelope",
            });
        }
        let basis = Basis::capped(space, cap);
        let generator = Generator::new(&basis, params, couplings, config.envelope, duration);
        Ok(Self {
            basis,
            generator,
            duration,
            config,
        })
    }

    /// Evolver sized for the support of `rho`.
    pub fn for_operator(space: &ModeSpace, params: &ThreeModeParams, duration: f64, config: EvolveConfig, rho: &CMatrix) -> Result<Self> {
        Self::new(space, params, duration, config, Basis::support_cap(space, rho))
    }

    /// Evolver sized for the joint support of several operators.
    pub fn for_operators(
        space: &ModeSpace,
        params: &ThreeModeParams,
        duration: f64,
        config: EvolveConfig,
        ops: &[&CMatrix],
    ) -> Result<Self> {
        let cap = ops.iter().map(|m| Basis::support_cap(space, m)).max().unwrap_or(0);
        Self::new(space, params, duration, config, cap)
    }

    pub fn space(&self) -> &ModeSpace {
        &self.basis.space
    }

    /// Number of basis states actually propagated.
    pub fn reduced_dim(&self) -> usize {
        self.basis.len()
    }

    fn run<F>(&self, f: F, x0: &[C64], bound: f64) -> Result<Vec<C64>>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let t = self.duration;
        let h0 = if bound > 0.0 { (1.0 / bound).min(t) } else { t };
        match self.config.integrator {
            Integrator::Taylor => taylor(f, x0, t, bound, 1),
            Integrator::Auto if self.generator.is_autonomous() => taylor(f, x0, t, bound, 1),
            Integrator::Auto | Integrator::DormandPrince => {
                dormand_prince(f, x0, t, h0, self.config.tolerances)
            }
            Integrator::Rk4 { steps } => rk4(f, x0, t, steps),
        }
    }

    /// Propagates an arbitrary (not necessarily Hermitian) full-space operator.
    pub fn propagate(&self, rho: &CMatrix) -> Result<CMatrix> {
        let x0 = self.restrict_checked(rho)?;
        let n = self.basis.len();
        let g = &self.generator;
        let mask = SectorMask::of(&self.basis, &x0);
        let basis = &self.basis;
        let out = self.run(|t, x, o| g.apply(t, x, o, None, &mask, basis), x0.as_slice(), g.norm_bound())?;
        Ok(self.basis.embed(&CMatrix::from_vec(n, n, out)))
    }

    /// Propagates `rho` while counting jumps on `channel`.
    ///
    /// Entry `k` of the result is the unnormalised state after exactly `k`
    /// jumps; the last entry collects `max_jumps` or more.
    pub fn propagate_resolved(&self, rho: &CMatrix, channel: LossChannel, max_jumps: usize) -> Result<Vec<CMatrix>> {
        let x0 = self.restrict_checked(rho)?;
        let n = self.basis.len();
        let nn = n * n;
        let blocks = max_jumps + 1;
        let mut stacked = alloc::vec![C64::new(0.0, 0.0); nn * blocks];
        stacked[..nn].copy_from_slice(x0.as_slice());
        let g = &self.generator;
        let has = g.has_channel(channel);
        let mask = SectorMask::of(&self.basis, &x0);
        let basis = &self.basis;
        let f = |t: f64, x: &[C64], o: &mut [C64]| {
            for b in 0..blocks {
                let (xb, ob) = (&x[b * nn..(b + 1) * nn], &mut o[b * nn..(b + 1) * nn]);
                g.apply(t, xb, ob, if has { Some(channel) } else { None }, &mask, basis);
            }
            if has {
                for b in 0..blocks {
                    let src = &x[b * nn..(b + 1) * nn];
                    let dst = (b + 1).min(max_jumps);
                    g.add_jump(channel, src, &mut o[dst * nn..(dst + 1) * nn], &mask, basis);
                }
            }
        };
        let out = self.run(f, &stacked, g.norm_bound())?;
        Ok((0..blocks)
            .map(|b| self.basis.embed(&CMatrix::from_column_slice(n, n, &out[b * nn..(b + 1) * nn])))
            .collect())
    }

    /// Unitary evolution of a pure full-space vector (dissipation ignored).
    pub fn propagate_vector(&self, psi: &CVector, min_steps: usize) -> Result<CVector> {
        if psi.len() != self.basis.space.total() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.space.total(),
                found: psi.len(),
            });
        }
        let x0 = self.basis.restrict_vector(psi);
        if (x0.norm_squared() - psi.norm_squared()).abs() > 1e-12 * psi.norm_squared().max(1.0) {
            return Err(Error::InvalidSpace("state has weight above the excitation cap"));
        }
        let g = &self.generator;
        let f = |t: f64, x: &[C64], o: &mut [C64]| g.apply_hamiltonian(t, x, o);
        let bound = g.hamiltonian_norm_bound();
        let out = match self.config.integrator {
            Integrator::Taylor | Integrator::Auto if g.is_autonomous() => {
                taylor(f, x0.as_slice(), self.duration, bound, min_steps)?
            }
            Integrator::Rk4 { steps } => rk4(f, x0.as_slice(), self.duration, steps.max(min_steps))?,
            _ => {
                let h0 = if bound > 0.0 { (1.0 / bound).min(self.duration) } else { self.duration };
                dormand_prince(f, x0.as_slice(), self.duration, h0, self.config.tolerances)?
            }
        };
        Ok(self.basis.embed_vector(&CVector::from_vec(out)))
    }

    fn restrict_checked(&self, rho: &CMatrix) -> Result<CMatrix> {
        let x0 = self.basis.restrict(rho)?;
        let full: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        let kept: f64 = x0.iter().map(|z| z.norm_sqr()).sum();
        if (full - kept).abs() > 1e-12 * full.max(1.0) {
            return Err(Error::InvalidSpace("operator has weight above the excitation cap"));
        }
        Ok(x0)
    }
}

/// Unitary evolution under the conversion Hamiltonian for time `t`; loss
/// rates in `params` are ignored. `steps` sets the minimum number of
/// propagation substeps.
pub fn evolve_hamiltonian(state: &QState, params: &ThreeModeParams, t: f64, steps: usize) -> Result<QState> {
    let space = state.space();
    check_three_mode(space)?;
    let lossless = params.without_loss();
    match state.repr() {
        Repr::Pure(psi) => {
            let cap = Basis::support_cap_vector(space, psi);
            let ev = Evolver::new(space, &lossless, t, EvolveConfig::default(), cap)?;
            let out = ev.propagate_vector(psi, steps.max(1))?;
            QState::pure(space.clone(), out)?.with_weight(state.trace_weight())
        }
        Repr::Mixed(rho) => {
            let ev = Evolver::for_operator(space, &lossless, t, EvolveConfig::default(), rho)?;
            QState::mixed(space.clone(), ev.propagate(rho)?)
        }
    }
}

/// Master-equation evolution for time `t` with collapse operators
/// `sqrt(kappa) a` on every mode and cavity dephasing per `params.dephasing`.
pub fn evolve_lindblad(state: &QState, params: &ThreeModeParams, t: f64, config: EvolveConfig) -> Result<QState> {
    let space = state.space();
    check_three_mode(space)?;
    let rho = state.density_matrix();
    let ev = Evolver::for_operator(space, params, t, config, &rho)?;
    QState::mixed(space.clone(), ev.propagate(&rho)?)
}

/// Like [`evolve_lindblad`] but split by the number of jumps on `channel`.
pub fn evolve_lindblad_resolved(
    state: &QState,
    params: &ThreeModeParams,
    t: f64,
    config: EvolveConfig,
    channel: LossChannel,
    max_jumps: usize,
) -> Result<Vec<CMatrix>> {
    let space = state.space();
    check_three_mode(space)?;
    let rho = state.density_matrix();
    let ev = Evolver::for_operator(space, params, t, config, &rho)?;
    ev.propagate_resolved(&rho, channel, max_jumps)
}
