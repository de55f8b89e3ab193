//! Master-equation generator on an excitation-capped basis.
//!
//! The conversion Hamiltonian conserves `n1 + n2 + nb` and every collapse
//! operator either keeps or lowers it, so a state whose support has at most
//! `K` excitations never leaves `{N <= K}`. All dynamics run on that basis.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::{DephasingModel, ThreeModeParams};
use crate::fock::ModeSpace;
use crate::{tol, CMatrix, CVector, Error, Result, C64};

pub(crate) const CAVITY_1: usize = 0;
pub(crate) const CAVITY_2: usize = 1;
pub(crate) const BUS: usize = 2;

const ABSENT: usize = usize::MAX;

/// Amplitude-damping channel of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossChannel {
    Cavity1,
    Cavity2,
    Bus,
}

impl LossChannel {
    pub(crate) fn mode(self) -> usize {
        match self {
            LossChannel::Cavity1 => CAVITY_1,
            LossChannel::Cavity2 => CAVITY_2,
            LossChannel::Bus => BUS,
        }
    }
}

/// Time dependence of the conversion pumps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Envelope {
    /// Instant on and off.
    #[default]
    Rectangular,
    /// Raised-cosine rise and fall of the given duration (s).
    CosineRamp { rise: f64 },
}

/// Rise time of the cosine-shaped pump edges.
pub const DEFAULT_RAMP: f64 = 48e-9;

impl Envelope {
    pub fn value(&self, t: f64, duration: f64) -> f64 {
        match *self {
            Envelope::Rectangular => 1.0,
            Envelope::CosineRamp { rise } => {
                let rise = rise.min(duration / 2.0);
                if rise <= 0.0 {
                    return 1.0;
                }
                let edge = t.min(duration - t);
                if edge >= rise {
                    1.0
                } else {
                    let x = edge.max(0.0) / rise;
                    0.5 * (1.0 - (core::f64::consts::PI * x).cos())
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Envelope::Rectangular)
    }
}

/// Basis states of a three-mode space with at most `cap` excitations,
/// ordered by total excitation number so that each sector is contiguous.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    pub space: ModeSpace,
    pub full: Vec<usize>,
    pos: Vec<usize>,
    sector: Vec<usize>,
    ranges: Vec<(usize, usize)>,
}

impl Basis {
    pub fn capped(space: &ModeSpace, cap: usize) -> Self {
        let mut by_sector: Vec<Vec<usize>> = alloc::vec![Vec::new(); cap + 1];
        for i in 0..space.total() {
            let e = space.excitations(i);
            if e <= cap {
                by_sector[e].push(i);
            }
        }
        let mut full = Vec::new();
        let mut sector = Vec::new();
        let mut ranges = Vec::with_capacity(cap + 1);
        let mut pos = alloc::vec![ABSENT; space.total()];
        for (e, members) in by_sector.into_iter().enumerate() {
            let start = full.len();
            for i in members {
                pos[i] = full.len();
                full.push(i);
                sector.push(e);
            }
            ranges.push((start, full.len()));
        }
        Self {
            space: space.clone(),
            full,
            pos,
            sector,
            ranges,
        }
    }

    pub fn len(&self) -> usize {
        self.full.len()
    }

    pub fn position(&self, full_index: usize) -> Option<usize> {
        match self.pos[full_index] {
            ABSENT => None,
            p => Some(p),
        }
    }

    /// Largest excitation number carrying weight in `m`.
    pub fn support_cap(space: &ModeSpace, m: &CMatrix) -> usize {
        let n = space.total();
        let mut cap = 0;
        for c in 0..n {
            for r in 0..n {
                if m[(r, c)].norm() > tol::SUPPORT {
                    cap = cap.max(space.excitations(r)).max(space.excitations(c));
                }
            }
        }
        cap
    }

    pub fn support_cap_vector(space: &ModeSpace, v: &CVector) -> usize {
        v.iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol::SUPPORT)
            .map(|(i, _)| space.excitations(i))
            .max()
            .unwrap_or(0)
    }

    /// Restricts a full-space operator; fails if it has weight outside the basis.
    pub fn restrict(&self, m: &CMatrix) -> Result<CMatrix> {
        let n = self.space.total();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
        let k = self.len();
        let out = CMatrix::from_fn(k, k, |r, c| m[(self.full[r], self.full[c])]);
        Ok(out)
    }

    pub fn restrict_vector(&self, v: &CVector) -> CVector {
        CVector::from_fn(self.len(), |r, _| v[self.full[r]])
    }

    pub fn embed(&self, m: &CMatrix) -> CMatrix {
        let n = self.space.total();
        let mut out = CMatrix::zeros(n, n);
        for (c, &fc) in self.full.iter().enumerate() {
            for (r, &fr) in self.full.iter().enumerate() {
                out[(fr, fc)] = m[(r, c)];
            }
        }
        out
    }

    pub fn embed_vector(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.space.total());
        for (r, &fr) in self.full.iter().enumerate() {
            out[fr] = v[r];
        }
        out
    }

    fn occupation(&self, k: usize, mode: usize) -> usize {
        self.space.occupation_of(self.full[k], mode)
    }

    /// Position of the state with one more photon in `mode`, if present.
    fn raised(&self, k: usize, mode: usize) -> Option<usize> {
        let full = self.full[k];
        if self.space.occupation_of(full, mode) + 1 >= self.space.dims()[mode] {
            return None;
        }
        self.position(full + self.space.stride(mode))
    }
}

/// Excitation-number differences `N_row - N_col` that an operator occupies.
///
/// Every term of the generator preserves this difference, so entries
/// outside the mask stay zero and are skipped.
#[derive(Debug, Clone)]
pub(crate) struct SectorMask {
    /// Per column sector, the contiguous row ranges inside the mask.
    rows: Vec<Vec<(usize, usize)>>,
}

impl SectorMask {
    pub fn of(basis: &Basis, m: &CMatrix) -> Self {
        let sectors = basis.ranges.len();
        let mut present = alloc::vec![false; 2 * sectors];
        for c in 0..basis.len() {
            for r in 0..basis.len() {
                if m[(r, c)].norm() > tol::SUPPORT {
                    present[basis.sector[r] + sectors - basis.sector[c]] = true;
                }
            }
        }
        Self::from_differences(basis, &present)
    }

    fn from_differences(basis: &Basis, present: &[bool]) -> Self {
        let sectors = basis.ranges.len();
        let rows = (0..sectors)
            .map(|mc| {
                let mut out: Vec<(usize, usize)> = Vec::new();
                for (nr, &(a, b)) in basis.ranges.iter().enumerate() {
                    if a == b || !present[nr + sectors - mc] {
                        continue;
                    }
                    match out.last_mut() {
                        Some(last) if last.1 == a => last.1 = b,
                        _ => out.push((a, b)),
                    }
                }
                out
            })
            .collect();
        Self { rows }
    }
}

#[derive(Debug, Clone)]
struct Jump {
    channel: LossChannel,
    /// Position of the state with one more photon, or `ABSENT`.
    up: Vec<usize>,
    /// `sqrt(kappa (n + 1))` for each position.
    amp: Vec<f64>,
}

/// `L(rho) = -i e(t) [Hc, rho] + F o rho + sum_c L_c rho L_c^dagger`
/// where `F_ij = -i (D_i - D_j^*) - w_ij` collects the detuning, the
/// anti-Hermitian no-jump decay and elementwise dephasing.
#[derive(Debug, Clone)]
pub(crate) struct Generator {
    n: usize,
    hc: Vec<Vec<(usize, C64)>>,
    diag: Vec<C64>,
    decay: Vec<C64>,
    jumps: Vec<Jump>,
    envelope: Envelope,
    duration: f64,
    hc_norm: f64,
    decay_norm: f64,
    jump_norm: f64,
}

impl Generator {
    pub fn new(
        basis: &Basis,
        params: &ThreeModeParams,
        couplings: (f64, f64),
        envelope: Envelope,
        duration: f64,
    ) -> Self {
        let n = basis.len();
        let (g1, g2) = couplings;
        let i = C64::new(0.0, 1.0);

        // H/hbar = i g1 (a1 b^dag - a1^dag b) - i g2 (a2 b^dag - a2^dag b) - delta b^dag b
        let mut hc: Vec<Vec<(usize, C64)>> = alloc::vec![Vec::new(); n];
        for k in 0..n {
            let nb = basis.occupation(k, BUS) as f64;
            for (mode, sign) in [(CAVITY_1, 1.0), (CAVITY_2, -1.0)] {
                let g = if mode == CAVITY_1 { g1 } else { g2 };
                if g == 0.0 {
                    continue;
                }
                let nc = basis.occupation(k, mode) as f64;
                // a_c b^dag |src> = amp |k> with src = k + e_c - e_b
                if basis.occupation(k, mode) + 1 < basis.space.dims()[mode] && nb >= 1.0 {
                    let src = basis.full[k] + basis.space.stride(mode) - basis.space.stride(BUS);
                    if let Some(src) = basis.position(src) {
                        let amp = ((nc + 1.0) * nb).sqrt();
                        hc[k].push((src, i * (sign * g * amp)));
                        hc[src].push((k, -i * (sign * g * amp)));
                    }
                }
            }
        }
        for row in hc.iter_mut() {
            row.sort_by_key(|e| e.0);
        }

        let kappas = [params.kappa_1, params.kappa_2, params.kappa_b];
        let diag: Vec<C64> = (0..n)
            .map(|k| {
                let nb = basis.occupation(k, BUS) as f64;
                let loss: f64 = (0..3).map(|m| kappas[m] * basis.occupation(k, m) as f64).sum();
                C64::new(-params.delta * nb, -0.5 * loss)
            })
            .collect();

        let gammas = [params.gamma_phi_1, params.gamma_phi_2];
        let mut decay = alloc::vec![C64::new(0.0, 0.0); n * n];
        let mut decay_norm: f64 = 0.0;
        for c in 0..n {
            for r in 0..n {
                let mut w = 0.0;
                for (m, &gamma) in gammas.iter().enumerate() {
                    if gamma == 0.0 {
                        continue;
                    }
                    let nr = basis.occupation(r, m) as f64;
                    let nc = basis.occupation(c, m) as f64;
                    w += match params.dephasing {
                        DephasingModel::Diffusive => gamma * (nr - nc) * (nr - nc),
                        DephasingModel::PhaseRandomizing => {
                            if nr == nc {
                                0.0
                            } else {
                                gamma
                            }
                        }
                    };
                }
                let f = -i * (diag[r] - diag[c].conj()) - C64::new(w, 0.0);
                decay_norm = decay_norm.max(f.norm());
                decay[c * n + r] = f;
            }
        }

        let mut jumps = Vec::new();
        let mut jump_norm = 0.0;
        for (channel, kappa) in [
            (LossChannel::Cavity1, params.kappa_1),
            (LossChannel::Cavity2, params.kappa_2),
            (LossChannel::Bus, params.kappa_b),
        ] {
            if kappa == 0.0 {
                continue;
            }
            let mode = channel.mode();
            let up: Vec<usize> = (0..n).map(|k| basis.raised(k, mode).unwrap_or(ABSENT)).collect();
            let amp: Vec<f64> = (0..n)
                .map(|k| (kappa * (basis.occupation(k, mode) as f64 + 1.0)).sqrt())
                .collect();
            let max_amp = (0..n).filter(|&k| up[k] != ABSENT).map(|k| amp[k]).fold(0.0, f64::max);
            jump_norm += max_amp * max_amp;
            jumps.push(Jump { channel, up, amp });
        }

        let hc_norm = hc
            .iter()
            .map(|row| row.iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max);

        Self {
            n,
            hc,
            diag,
            decay,
            jumps,
            envelope,
            duration,
            hc_norm,
            decay_norm,
            jump_norm,
        }
    }

    #[cfg(test)]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_autonomous(&self) -> bool {
        self.envelope.is_constant()
    }

    /// Upper bound on the induced max-norm of the superoperator.
    pub fn norm_bound(&self) -> f64 {
        2.0 * self.hc_norm + self.decay_norm + self.jump_norm
    }

    /// Upper bound on the norm of `-i H` acting on vectors.
    pub fn hamiltonian_norm_bound(&self) -> f64 {
        self.hc_norm + self.diag.iter().map(|d| d.re.abs()).fold(0.0, f64::max)
    }

    pub fn has_channel(&self, channel: LossChannel) -> bool {
        self.jumps.iter().any(|j| j.channel == channel)
    }

    /// Writes `L(x)` to `out` for an `n x n` column-major block, omitting the
    /// jump term of `skip`. Only entries inside `mask` are computed; the rest
    /// of `out` is zeroed.
    pub fn apply(&self, t: f64, x: &[C64], out: &mut [C64], skip: Option<LossChannel>, mask: &SectorMask, basis: &Basis) {
        let n = self.n;
        let e = self.envelope.value(t, self.duration);
        let zero = C64::new(0.0, 0.0);
        let mie = C64::new(0.0, -e);
        for c in 0..n {
            let ranges = &mask.rows[basis.sector[c]];
            let col = &x[c * n..(c + 1) * n];
            let dst = &mut out[c * n..(c + 1) * n];
            let fcol = &self.decay[c * n..(c + 1) * n];
            dst.fill(zero);
            for &(a, b) in ranges {
                for r in a..b {
                    dst[r] = fcol[r] * col[r];
                }
            }
            if e == 0.0 {
                continue;
            }
            // (Hc x)[:, c]
            for &(a, b) in ranges {
                for r in a..b {
                    let mut acc = zero;
                    for &(k, v) in &self.hc[r] {
                        acc += v * col[k];
                    }
                    dst[r] += mie * acc;
                }
            }
            // -(x Hc)[:, c] = -sum_k x[:, k] conj(Hc[c, k])
            for &(k, v) in &self.hc[c] {
                let w = -mie * v.conj();
                let src = &x[k * n..(k + 1) * n];
                for &(a, b) in ranges {
                    for r in a..b {
                        dst[r] += w * src[r];
                    }
                }
            }
        }
        for jump in &self.jumps {
            if Some(jump.channel) == skip {
                continue;
            }
            Self::sandwich(n, jump, x, out, mask, basis);
        }
    }

    /// Adds `L_c x L_c^dagger` for `channel` to `out`.
    pub fn add_jump(&self, channel: LossChannel, x: &[C64], out: &mut [C64], mask: &SectorMask, basis: &Basis) {
        if let Some(jump) = self.jumps.iter().find(|j| j.channel == channel) {
            Self::sandwich(self.n, jump, x, out, mask, basis);
        }
    }

    fn sandwich(n: usize, jump: &Jump, x: &[C64], out: &mut [C64], mask: &SectorMask, basis: &Basis) {
        for c in 0..n {
            let uc = jump.up[c];
            if uc == ABSENT {
                continue;
            }
            let ac = jump.amp[c];
            let src = &x[uc * n..(uc + 1) * n];
            let dst = &mut out[c * n..(c + 1) * n];
            for &(a, b) in &mask.rows[basis.sector[c]] {
                for r in a..b {
                    let ur = jump.up[r];
                    if ur != ABSENT {
                        dst[r] += src[ur] * (jump.amp[r] * ac);
                    }
                }
            }
        }
    }

    /// Writes `-i H(t) psi` to `out`.
    pub fn apply_hamiltonian(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let e = self.envelope.value(t, self.duration);
        let mi = C64::new(0.0, -1.0);
        for (r, row) in self.hc.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &(k, v) in row {
                acc += v * psi[k];
            }
            out[r] = mi * (acc * e + C64::new(self.diag[r].re, 0.0) * psi[r]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capped_basis_size() {
        let s = ModeSpace::new(&[15, 15, 5]).unwrap();
        let b = Basis::capped(&s, 14);
        let expect = (0..s.total()).filter(|&i| s.excitations(i) <= 14).count();
        assert_eq!(b.len(), expect);
        assert!(b.len() < s.total());
    }

    #[test]
    fn envelope_shape() {
        let e = Envelope::CosineRamp { rise: 10.0 };
        assert_eq!(e.value(0.0, 100.0), 0.0);
        assert!((e.value(5.0, 100.0) - 0.5).abs() < 1e-15);
        assert_eq!(e.value(50.0, 100.0), 1.0);
        assert!((e.value(95.0, 100.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coupling_is_hermitian() {
        let s = ModeSpace::new(&[3, 3, 3]).unwrap();
        let b = Basis::capped(&s, 6);
        let p = ThreeModeParams::lossless(1.0, 0.5);
        let g = Generator::new(&b, &p, (1.0, 0.7), Envelope::Rectangular, 1.0);
        let n = g.dim();
        let mut h = CMatrix::zeros(n, n);
        for (r, row) in g.hc.iter().enumerate() {
            for &(c, v) in row {
                h[(r, c)] += v;
            }
        }
        assert!(crate::linalg::max_abs_diff(&h, &h.adjoint()) < 1e-15);
    }
}
