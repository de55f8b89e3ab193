use std::f64::consts::{FRAC_1_SQRT_2, PI};

use buslink_core::codes::{build_code, CodeKind, LogicalCode};
use buslink_core::fock::{coherent_state, fidelity, ModeSpace, QState};
use buslink_core::linalg::project_density;
use buslink_core::linalg::TraceConstraint;
use buslink_core::tomography::*;
use buslink_core::{CMatrix, CVector, Error, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fock(dim: usize, n: usize) -> QState {
    QState::basis(ModeSpace::single(dim).unwrap(), &[n]).unwrap()
}

fn at_origin(grid: &WignerGrid) -> f64 {
    let i = grid.re.iter().position(|x| x.abs() < 1e-12).unwrap();
    let j = grid.im.iter().position(|x| x.abs() < 1e-12).unwrap();
    grid.get(i, j)
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize, rank: usize, max_n: usize) -> QState {
    let mut rho = CMatrix::zeros(dim, dim);
    for _ in 0..rank {
        let v = CVector::from_fn(dim, |n, _| {
            if n < max_n {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                c(0.0, 0.0)
            }
        });
        rho += &v * v.adjoint();
    }
    let tr = rho.trace().re;
    QState::mixed(ModeSpace::single(dim).unwrap(), rho / c(tr, 0.0)).unwrap()
}

fn noisy(grid: &WignerGrid, sigma: f64, seed: u64) -> WignerGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let values = grid.values.iter().map(|v| v + normal.sample(&mut rng)).collect();
    WignerGrid::new(grid.re.clone(), grid.im.clone(), values).unwrap()
}

#[test]
fn wigner_at_origin() {
    let spec = GridSpec::default_for(6);
    assert!((at_origin(&wigner(&fock(6, 0), &spec).unwrap()) - 2.0 / PI).abs() < 1e-14);
    assert!((at_origin(&wigner(&fock(6, 1), &spec).unwrap()) + 2.0 / PI).abs() < 1e-14);
}

#[test]
fn coherent_wigner_is_gaussian() {
    let alpha = c(1.0, 0.0);
    let state = coherent_state(30, alpha).unwrap();
    let grid = wigner(&state, &GridSpec::square(3.5, 61)).unwrap();
    for (k, beta) in grid.points().enumerate() {
        let oracle = 2.0 / PI * (-2.0 * (beta - alpha).norm_sqr()).exp();
        assert!((grid.values[k] - oracle).abs() < 1e-10);
    }
    assert!((grid.integral() - 1.0).abs() < 0.01);
}

#[test]
fn default_grid_captures_physical_states() {
    let cat = build_code(CodeKind::Cat, 1.3, 15).unwrap();
    for state in [fock(8, 0), fock(8, 3), random_state(&mut ChaCha8Rng::seed_from_u64(1), 8, 2, 4)] {
        let total = wigner(&state, &GridSpec::default_for(8)).unwrap().integral();
        assert!((0.9..=1.1).contains(&total), "{total}");
    }
    let total = wigner(&cat.codeword_0, &GridSpec::default_for(8)).unwrap().integral();
    assert!((0.9..=1.1).contains(&total), "{total}");
    let wide = GridSpec::default_for(16);
    assert!(wide.re.1 > 2.5 && (wide.re.1 - 6.0).abs() < 1e-12);
}

#[test]
fn normalization_examples() {
    let state = coherent_state(30, c(0.4, 0.2)).unwrap();
    let grid = normalize_wigner(&wigner(&state, &GridSpec::square(3.5, 61)).unwrap()).unwrap();
    let again = normalize_wigner(&grid).unwrap();
    assert!(grid.values.iter().zip(&again.values).all(|(a, b)| (a - b).abs() < 1e-12));
    let restored = normalize_wigner(&grid.scaled(0.97)).unwrap();
    assert!((restored.integral() - 1.0).abs() < 1e-12);
    assert!(restored.values.iter().zip(&grid.values).all(|(a, b)| (a - b).abs() < 1e-12));
    let zero = grid.scaled(0.0);
    assert!(matches!(normalize_wigner(&zero), Err(Error::Degenerate(_))));
}

#[test]
fn grid_validation() {
    assert!(wigner(&fock(4, 0), &GridSpec::square(1.0, 1)).is_err());
    assert!(WignerGrid::new(vec![0.0, 1.0, 3.0], vec![0.0, 1.0], vec![0.0; 6]).is_err());
    assert!(WignerGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0; 3]).is_err());
    let two_mode = QState::vacuum(ModeSpace::new(&[3, 3]).unwrap());
    assert!(wigner(&two_mode, &GridSpec::default_for(3)).is_err());
}

#[test]
fn mle_single_photon_roundtrip() {
    let grid = wigner(&fock(8, 1), &GridSpec::default_for(8)).unwrap();
    let rho = mle_reconstruct(&grid, 8).unwrap();
    assert!(fidelity(&rho, &fock(8, 1)).unwrap() > 0.999);
}

#[test]
fn mle_cat_codeword_roundtrip() {
    let cat = build_code(CodeKind::Cat, 1.3, 15).unwrap();
    for word in [&cat.codeword_0, &cat.codeword_1] {
        let grid = wigner(word, &GridSpec::default_for(8)).unwrap();
        let rho = mle_reconstruct(&grid, 8).unwrap().density_matrix();
        // overlap with the leading 8 amplitudes, which carry nearly all weight
        let head = CVector::from_fn(8, |n, _| word.amplitudes().unwrap()[n]);
        let f = head.dotc(&(&rho * &head)).re;
        assert!(f > 0.99, "{f}");
    }
}

#[test]
fn mle_stops_at_a_truncation_limited_optimum() {
    // the +x cat has weight beyond the fit dimension, so no state fits exactly
    let cat = build_code(CodeKind::Cat, 1.3, 15).unwrap();
    let plus = buslink_core::codes::encode(&cat, (std::f64::consts::FRAC_PI_2, 0.0));
    let grid = wigner(&plus, &GridSpec::default_for(15)).unwrap();
    let (rho, report) = mle_reconstruct_with(&grid, 8, MleOptions::default()).unwrap();
    assert!(report.iterations < MleOptions::default().max_iterations);
    let head = CVector::from_fn(8, |n, _| plus.amplitudes().unwrap()[n]);
    let f = head.dotc(&(&rho.density_matrix() * &head)).re / head.norm_squared();
    assert!(f > 0.99, "{f}");
}

#[test]
fn mle_noisy_rank_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = random_state(&mut rng, 8, 2, 5);
    let grid = wigner(&target, &GridSpec::default_for(8)).unwrap();
    let rho = mle_reconstruct(&noisy(&grid, 0.01, 11), 8).unwrap();
    let f = fidelity(&rho, &target).unwrap();
    assert!(f > 0.98, "{f}");
    assert!(1.0 - f < 0.02, "reconstruction error {}", 1.0 - f);
}

#[test]
fn mle_rejects_sparse_grids() {
    let grid = wigner(&fock(3, 0), &GridSpec::square(1.0, 2)).unwrap();
    assert!(mle_reconstruct(&grid, 3).is_err());
}

#[test]
fn mle_reports_non_convergence() {
    let grid = wigner(&fock(8, 2), &GridSpec::default_for(8)).unwrap();
    let options = MleOptions {
        max_iterations: 2,
        tolerance: 1e-10,
    };
    assert!(matches!(mle_reconstruct_with(&grid, 8, options), Err(Error::NoConvergence { .. })));
}

fn bell(a: C64, b: C64) -> CVector {
    // a |01> + b |10>
    CVector::from_column_slice(&[c(0.0, 0.0), a, b, c(0.0, 0.0)])
}

#[test]
fn pauli_examples() {
    let mixed = CMatrix::identity(4, 4) / c(4.0, 0.0);
    let p = pauli_expectations(&mixed).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-15 && p[1..].iter().all(|v| v.abs() < 1e-15));
    let v = bell(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
    let p = pauli_expectations(&(&v * v.adjoint())).unwrap();
    let at = |l: &str| p[PAULI_LABELS.iter().position(|x| *x == l).unwrap()];
    assert!((at("XX") - 1.0).abs() < 1e-14 && (at("YY") - 1.0).abs() < 1e-14 && (at("ZZ") + 1.0).abs() < 1e-14);
    for l in ["IX", "IY", "IZ", "XI", "YI", "ZI"] {
        assert!(at(l).abs() < 1e-14);
    }
    assert!(pauli_expectations(&CMatrix::identity(3, 3)).is_err());
}

#[test]
fn concurrence_examples() {
    let v = bell(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2));
    assert!((concurrence(&(&v * v.adjoint())).unwrap() - 1.0).abs() < 1e-7);
    assert!(concurrence(&(CMatrix::identity(4, 4) / c(4.0, 0.0))).unwrap() < 1e-12);
}

fn fock_code(hi: usize, dim: usize) -> LogicalCode {
    build_code(CodeKind::Fock { lo: 0, hi }, 0.0, dim).unwrap()
}

fn two_mode(dim: usize, amps: &[((usize, usize), C64)]) -> QState {
    let space = ModeSpace::new(&[dim, dim]).unwrap();
    let mut v = CVector::zeros(dim * dim);
    for &((a, b), z) in amps {
        v[space.index(&[a, b]).unwrap()] = z;
    }
    QState::pure(space, v).unwrap()
}

#[test]
fn bell_pipeline() {
    let code = fock_code(1, 4);
    let h = FRAC_1_SQRT_2;
    let state = two_mode(4, &[((0, 1), c(h, 0.0)), ((1, 0), c(0.0, h))]);
    let tomos = TwoQubitTomogramSet::from_state(&state, &code).unwrap();
    for t in [&tomos.x, &tomos.y, &tomos.z] {
        let t = t.as_ref().unwrap();
        assert_eq!(t.p_plus + t.p_minus, 1.0);
    }
    let result = two_qubit_reconstruct(&tomos, &code).unwrap();
    let target = bell(c(h, 0.0), c(0.0, h));
    assert!(result.overlap(&target) > 0.999);
    assert!((result.trace() - 1.0).abs() < 1e-3);
    assert_eq!(result.joint.len(), 36);
    assert!((concurrence(&result.rho).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn bell_pipeline_through_wigner() {
    let code = fock_code(1, 6);
    let h = FRAC_1_SQRT_2;
    let state = two_mode(6, &[((0, 1), c(h, 0.0)), ((1, 0), c(0.0, h))]);
    let tomos = TwoQubitTomogramSet::from_state(&state, &code).unwrap();
    let measured = tomos.through_wigner(&GridSpec::default_for(6), 6).unwrap();
    let result = two_qubit_reconstruct(&measured, &code).unwrap();
    assert!(result.overlap(&bell(c(h, 0.0), c(0.0, h))) > 0.999);
    assert!(result.trace() > 0.999);
}

#[test]
fn product_state_is_separable() {
    let code = fock_code(1, 3);
    let s = 0.6f64.sqrt();
    let t = 0.4f64.sqrt();
    // (s|0> + t|1>) x (t|0> + i s|1>)
    let state = two_mode(
        3,
        &[((0, 0), c(s * t, 0.0)), ((0, 1), c(0.0, s * s)), ((1, 0), c(t * t, 0.0)), ((1, 1), c(0.0, t * s))],
    );
    let tomos = TwoQubitTomogramSet::from_state(&state, &code).unwrap();
    let result = two_qubit_reconstruct(&tomos, &code).unwrap();
    assert!(concurrence(&result.rho).unwrap() < 1e-3);
}

#[test]
fn leakage_lowers_the_trace() {
    let code = fock_code(2, 5);
    let h = FRAC_1_SQRT_2;
    let state = two_mode(5, &[((2, 0), c(h, 0.0)), ((0, 2), c(-h, 0.0))]);
    let tomos = TwoQubitTomogramSet::from_state(&state, &code).unwrap();
    let error = fock(5, 1).density_matrix();
    let inject = |t: &Option<ConditionalTomogram>| {
        let t = t.as_ref().unwrap();
        let mix = |r: &QState| {
            let m = r.density_matrix() * c(0.99, 0.0) + &error * c(0.01, 0.0);
            QState::mixed(ModeSpace::single(5).unwrap(), m).unwrap()
        };
        Some(ConditionalTomogram::new(t.p_plus, mix(&t.rho_plus), mix(&t.rho_minus)).unwrap())
    };
    let dirty = TwoQubitTomogramSet {
        x: inject(&tomos.x),
        y: inject(&tomos.y),
        z: inject(&tomos.z),
    };
    let result = two_qubit_reconstruct(&dirty, &code).unwrap();
    assert!((result.trace() - 0.99).abs() < 2e-3, "{}", result.trace());
}

#[test]
fn missing_basis_is_reported() {
    let code = fock_code(1, 3);
    let state = two_mode(3, &[((0, 0), c(1.0, 0.0))]);
    let mut tomos = TwoQubitTomogramSet::from_state(&state, &code).unwrap();
    tomos.y = None;
    assert!(matches!(two_qubit_reconstruct(&tomos, &code), Err(Error::MissingBasis('y'))));
    let wrong = fock_code(1, 4);
    assert!(two_qubit_reconstruct(&TwoQubitTomogramSet::from_state(&state, &code).unwrap(), &wrong).is_err());
}

#[test]
fn logical_density_of_codeword() {
    let cat = build_code(CodeKind::Cat, 1.3, 15).unwrap();
    let q = logical_density(&cat.codeword_1, &cat).unwrap();
    assert!((q[(1, 1)].re - 1.0).abs() < 1e-12 && q[(0, 0)].norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wigner_is_linear(seed in 0u64..1000, a in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = random_state(&mut rng, 6, 2, 6);
        let r2 = random_state(&mut rng, 6, 1, 6);
        let mix = r1.density_matrix() * c(a, 0.0) + r2.density_matrix() * c(1.0 - a, 0.0);
        let mixed = QState::mixed(ModeSpace::single(6).unwrap(), mix).unwrap();
        let spec = GridSpec::square(2.0, 9);
        let (w1, w2, w) = (wigner(&r1, &spec).unwrap(), wigner(&r2, &spec).unwrap(), wigner(&mixed, &spec).unwrap());
        for k in 0..w.len() {
            prop_assert!((w.values[k] - a * w1.values[k] - (1.0 - a) * w2.values[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn mle_output_is_physical(seed in 0u64..1000, sigma in 0.0f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = random_state(&mut rng, 4, 2, 4);
        let grid = noisy(&wigner(&target, &GridSpec::square(2.0, 9)).unwrap(), sigma, seed);
        let rho = mle_reconstruct(&grid, 4).unwrap().density_matrix();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(buslink_core::linalg::min_eigenvalue(&rho) > -1e-12);
        prop_assert!(buslink_core::linalg::max_abs_diff(&rho, &rho.adjoint()) < 1e-14);
        let again = project_density(&rho, TraceConstraint::Unit);
        prop_assert!(buslink_core::linalg::max_abs_diff(&again, &rho) < 1e-10);
    }

    #[test]
    fn roundtrip_contraction(seed in 0u64..1000, sigma in 0.001f64..0.02) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = 1 + (seed % 3) as usize;
        let target = random_state(&mut rng, 8, rank, 5);
        let grid = noisy(&wigner(&target, &GridSpec::default_for(8)).unwrap(), sigma, seed + 1);
        let f = fidelity(&mle_reconstruct(&grid, 8).unwrap(), &target).unwrap();
        prop_assert!(f >= 1.0 - 5.0 * sigma, "sigma {} fidelity {}", sigma, f);
    }
}
