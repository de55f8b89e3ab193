//! Finds the cavity dephasing rate that lowers single-photon transfer
//! efficiency at the reference operating point by 0.04.

use buslink_core::dynamics::{evolve_lindblad, DephasingModel, EvolveConfig, ThreeModeParams, CAVITY_2};
use buslink_core::fock::{ModeSpace, QState};

fn efficiency(gamma: f64) -> f64 {
    let p = ThreeModeParams::reference_loss_only().with_dephasing(gamma, gamma, DephasingModel::PhaseRandomizing);
    let input = QState::basis(ModeSpace::new(&[2, 2, 2]).unwrap(), &[1, 0, 0]).unwrap();
    let out = evolve_lindblad(&input, &p, p.t_swap(), EvolveConfig::default()).unwrap();
    out.mean_photons(CAVITY_2).unwrap()
}

fn main() {
    let base = efficiency(0.0);
    let target = base - 0.04;
    let (mut lo, mut hi) = (0.0, 1e7);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if efficiency(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    println!("baseline efficiency {base:.6}");
    println!("gamma_phi = {:.6e} rad/s (efficiency {:.6})", 0.5 * (lo + hi), efficiency(0.5 * (lo + hi)));
}
