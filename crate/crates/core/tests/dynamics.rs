use std::f64::consts::PI;

use buslink_core::dynamics::{
    evolve_hamiltonian, evolve_lindblad, evolve_lindblad_resolved, propagator, propagator_lossy, semiclassical_resonant,
    EvolveConfig, Envelope, Integrator, LossChannel, ThreeModeParams, BUS, CAVITY_1, CAVITY_2,
};
use buslink_core::fock::{annihilation, coherent_state, partial_trace, ModeSpace, QState};
use buslink_core::{angular, C64};
use proptest::prelude::*;

fn space(d: usize) -> ModeSpace {
    ModeSpace::new(&[d, d, d]).unwrap()
}

fn occupations(state: &QState) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (m, o) in out.iter_mut().enumerate() {
        *o = state.mean_photons(m).unwrap();
    }
    out
}

fn eta_exact(g: f64, kappa_b: f64) -> f64 {
    0.25 * (1.0 + (-PI * kappa_b / (32f64.sqrt() * g)).exp()).powi(2)
}

#[test]
fn vacuum_is_stationary() {
    let s = space(3);
    let p = ThreeModeParams::from_hz(560e3, 300e3);
    let out = evolve_hamiltonian(&QState::vacuum(s.clone()), &p, 1e-6, 1).unwrap();
    assert!((out.populations()[0] - 1.0).abs() < 1e-14);
}

#[test]
fn resonant_swap_moves_the_photon() {
    let s = space(3);
    let p = ThreeModeParams::from_hz(560e3, 0.0);
    let input = QState::basis(s, &[1, 0, 0]).unwrap();
    let out = evolve_hamiltonian(&input, &p, p.t_swap(), 1).unwrap();
    assert!((occupations(&out)[CAVITY_2] - 1.0).abs() < 1e-6);
    assert!(out.amplitudes().map(|v| (v.norm() - 1.0).abs() < 1e-9).unwrap());
}

#[test]
fn closed_system_limit_of_lindblad() {
    let s = space(3);
    let p = ThreeModeParams::from_hz(560e3, 400e3);
    let input = QState::basis(s, &[1, 1, 0]).unwrap();
    let a = evolve_hamiltonian(&input, &p, 7e-7, 1).unwrap();
    let b = evolve_lindblad(&input, &p, 7e-7, EvolveConfig::default()).unwrap();
    let diff = (a.density_matrix() - b.density_matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-7);
}

#[test]
fn lossy_single_photon_transfer() {
    let s = space(2);
    let p = ThreeModeParams::reference_loss_only();
    let input = QState::basis(s, &[1, 0, 0]).unwrap();
    let out = evolve_lindblad(&input, &p, p.t_swap(), EvolveConfig::default()).unwrap();
    let eta = occupations(&out)[CAVITY_2];
    assert!((eta - eta_exact(p.g, p.kappa_b)).abs() < 0.005);
    assert!((eta - 0.899).abs() < 0.005);
}

#[test]
fn integrators_agree() {
    let s = space(3);
    let p = ThreeModeParams::reference_loss_only().with_delta(angular(900e3));
    let input = QState::basis(s, &[1, 1, 0]).unwrap();
    let t = 5e-7;
    let a = evolve_lindblad(&input, &p, t, EvolveConfig::default()).unwrap();
    let b = evolve_lindblad(&input, &p, t, EvolveConfig::default().with_integrator(Integrator::DormandPrince)).unwrap();
    let c = evolve_lindblad(&input, &p, t, EvolveConfig::default().with_integrator(Integrator::Rk4 { steps: 4000 })).unwrap();
    let d_ab = (a.density_matrix() - b.density_matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d_ac = (a.density_matrix() - c.density_matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(d_ab < 1e-8, "{d_ab}");
    assert!(d_ac < 1e-8, "{d_ac}");
}

#[test]
fn bus_decay_without_coupling() {
    let s = space(3);
    let kappa = angular(110e3);
    let p = ThreeModeParams::lossless(0.0, 0.0).with_kappa_b(kappa);
    let input = QState::basis(s, &[0, 0, 1]).unwrap();
    for &t in &[2e-7, 1.5e-6, 4e-6] {
        let out = evolve_lindblad(&input, &p, t, EvolveConfig::default()).unwrap();
        assert!((occupations(&out)[BUS] - (-kappa * t).exp()).abs() < 1e-6);
    }
}

#[test]
fn coherent_input_tracks_semiclassical_amplitudes() {
    let d = 7;
    let sp = space(d);
    let p = ThreeModeParams::reference_loss_only();
    let alpha = C64::new(0.6, 0.0);
    let vac = QState::vacuum(ModeSpace::single(d).unwrap());
    let input = QState::product(&[coherent_state(d, alpha).unwrap(), vac.clone(), vac]).unwrap();
    let t = p.t_swap();
    let out = evolve_lindblad(&input, &p, t, EvolveConfig::default()).unwrap();
    let (a1, a2, b) = semiclassical_resonant(alpha, p.g, p.kappa_b, t).unwrap();
    for (mode, expect) in [(CAVITY_1, a1), (CAVITY_2, a2), (BUS, b)] {
        let a = annihilation(&sp, mode).unwrap();
        let got = out.expectation(&a).unwrap();
        assert!((got - expect).norm() < 5e-3, "mode {mode}: {got} vs {expect}");
    }
    assert!((out.mean_photons(CAVITY_2).unwrap() - a2.norm_sqr()).abs() < 5e-3);
}

#[test]
fn trace_drift_over_ten_swaps() {
    let s = space(3);
    let p = ThreeModeParams::reference_full();
    let input = QState::basis(s, &[1, 1, 0]).unwrap();
    let out = evolve_lindblad(&input, &p, 10.0 * p.t_swap(), EvolveConfig::default()).unwrap();
    assert!((out.density_matrix().trace().re - 1.0).abs() < 1e-8);
    out.validate().unwrap();
}

#[test]
fn cosine_ramp_runs_and_conserves_trace() {
    let s = space(2);
    let p = ThreeModeParams::reference_loss_only();
    let cfg = EvolveConfig::default().with_envelope(Envelope::CosineRamp { rise: 48e-9 });
    let input = QState::basis(s, &[1, 0, 0]).unwrap();
    let out = evolve_lindblad(&input, &p, p.t_swap() + 48e-9, cfg).unwrap();
    assert!((out.density_matrix().trace().re - 1.0).abs() < 1e-8);
    assert!(occupations(&out)[CAVITY_2] > 0.85);
    let bad = EvolveConfig::default()
        .with_envelope(Envelope::CosineRamp { rise: 48e-9 })
        .with_integrator(Integrator::Taylor);
    assert!(evolve_lindblad(&input, &p, 1e-7, bad).is_err());
}

#[test]
fn jump_resolved_blocks_sum_to_full_state() {
    let s = space(3);
    let p = ThreeModeParams::reference_loss_only().with_delta(angular(914.5e3));
    let input = QState::basis(s.clone(), &[1, 1, 0]).unwrap();
    let t = 5.5e-7;
    let blocks = evolve_lindblad_resolved(&input, &p, t, EvolveConfig::default(), LossChannel::Bus, 2).unwrap();
    let full = evolve_lindblad(&input, &p, t, EvolveConfig::default()).unwrap().density_matrix();
    let sum = blocks.iter().fold(full.clone() * C64::new(0.0, 0.0), |acc, b| acc + b);
    let diff = (sum - full).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-10);
    // one bus jump leaves exactly one photon in the cavities plus bus
    let one = QState::mixed(s, blocks[1].clone()).unwrap();
    let red = partial_trace(&one, &[0, 1]).unwrap();
    assert!(red.trace_weight() > 0.0);
}

#[test]
fn wrong_mode_count_rejected() {
    let s = ModeSpace::new(&[3, 3]).unwrap();
    let p = ThreeModeParams::from_hz(560e3, 0.0);
    assert!(evolve_hamiltonian(&QState::vacuum(s), &p, 1e-7, 1).is_err());
}

#[test]
fn propagator_matches_lossy_exponential_at_zero_loss() {
    let m1 = propagator(1.7, 0.9, 2.3);
    let m2 = propagator_lossy(1.7, 0.9, 0.0, 0.0, 0.0, 2.3);
    assert!((m1.m - m2.m).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn lossy_propagator_predicts_single_photon_transfer() {
    let p = ThreeModeParams::reference_loss_only();
    let m = propagator_lossy(p.g, 0.0, p.kappa_b, 0.0, 0.0, p.t_swap());
    assert!((m.occupations_from(0)[1] - eta_exact(p.g, p.kappa_b)).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagator_is_unitary(g in 0.1f64..5.0, d in -10.0f64..10.0, t in 0.0f64..20.0) {
        prop_assert!(propagator(g, d, t).unitarity_error() < 1e-10);
    }

    #[test]
    fn bus_is_eliminated_at_bs_time(g in 0.1f64..5.0, ratio in 0.0f64..6.0) {
        let d = ratio * g;
        let t = 2.0 * PI / (8.0 * g * g + d * d).sqrt();
        let m = propagator(g, d, t);
        prop_assert!(m.get(0, 2).norm() < 1e-10);
        prop_assert!(m.get(1, 2).norm() < 1e-10);
        prop_assert!((m.get(2, 2).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_excitation_oracle(gk in 100e3f64..1e6, dk in -2e6f64..2e6, t in 0.0f64..2e-6, mode in 0usize..3) {
        let p = ThreeModeParams::from_hz(gk, dk);
        let s = space(2);
        let mut occ = [0usize; 3];
        occ[mode] = 1;
        let out = evolve_hamiltonian(&QState::basis(s, &occ).unwrap(), &p, t, 1).unwrap();
        let expect = propagator(p.g, p.delta, t).occupations_from(mode);
        let got = occupations(&out);
        for k in 0..3 {
            prop_assert!((got[k] - expect[k]).abs() < 1e-8);
        }
    }
}
