use std::f64::consts::{FRAC_PI_2, PI};

use buslink_core::codes::*;
use buslink_core::fock::{annihilation, coherent_state, fidelity, parity_op, ModeSpace, QState};
use buslink_core::{CVector, C64};
use proptest::prelude::*;

const DIM: usize = 15;

fn cat(alpha: f64) -> LogicalCode {
    build_code(CodeKind::Cat, alpha, DIM).unwrap()
}

fn support(state: &QState) -> Vec<usize> {
    state
        .populations()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-20)
        .map(|(n, _)| n)
        .collect()
}

#[test]
fn fock_code_words() {
    let code = build_code(CodeKind::FOCK, 0.0, 5).unwrap();
    assert_eq!(code.codeword_0.populations()[0], 1.0);
    assert_eq!(code.codeword_1.populations()[1], 1.0);
    assert!(code.error_0.is_none());
    let two = build_code(CodeKind::Fock { lo: 0, hi: 2 }, 0.0, 5).unwrap();
    assert_eq!(two.codeword_1.populations()[2], 1.0);
    assert!(build_code(CodeKind::Fock { lo: 0, hi: 5 }, 0.0, 5).is_err());
}

#[test]
fn cat_support_mod_four() {
    let code = cat(1.3);
    for (state, r) in [
        (&code.codeword_0, 2),
        (&code.codeword_1, 0),
        (code.error_0.as_ref().unwrap(), 1),
        (code.error_1.as_ref().unwrap(), 3),
    ] {
        assert!(support(state).iter().all(|n| n % 4 == r));
    }
}

#[test]
fn cat_small_alpha_limit() {
    let code = build_code(CodeKind::Cat, 0.05, DIM).unwrap();
    let s = ModeSpace::single(DIM).unwrap();
    let two = QState::basis(s.clone(), &[2]).unwrap();
    let zero = QState::basis(s, &[0]).unwrap();
    assert!(fidelity(&code.codeword_0, &two).unwrap() > 1.0 - 1e-3);
    assert!(fidelity(&code.codeword_1, &zero).unwrap() > 1.0 - 1e-3);
}

#[test]
fn cat_mean_photons() {
    // equal mixture of the n = 2 mod 4 and n = 0 mod 4 words
    let x: f64 = 1.69;
    let n0 = x * (x.sinh() + x.sin()) / (x.cosh() - x.cos());
    let n1 = x * (x.sinh() - x.sin()) / (x.cosh() + x.cos());
    let code = cat(1.3);
    assert!((code.mean_photons - 0.5 * (n0 + n1)).abs() < 1e-6);
    // each word tends to |alpha|^2 as the cat grows
    let big = build_code(CodeKind::Cat, 3.0, 40).unwrap();
    assert!((big.mean_photons - 9.0).abs() < 0.01);
}

#[test]
fn binomial_mean_photons_is_two() {
    let code = build_code(CodeKind::Binomial, 0.0, DIM).unwrap();
    assert!((code.mean_photons - 2.0).abs() < 1e-14);
}

#[test]
fn codewords_orthogonal_and_parity_definite() {
    let s = ModeSpace::single(DIM).unwrap();
    let parity = parity_op(&s, 0).unwrap();
    for code in [cat(0.7), cat(1.3), cat(1.6), build_code(CodeKind::Binomial, 0.0, DIM).unwrap()] {
        let [w0, w1] = code.words();
        assert!(w0.dotc(w1).norm() < 1e-10);
        let e0 = code.error_0.as_ref().unwrap().amplitudes().unwrap();
        let e1 = code.error_1.as_ref().unwrap().amplitudes().unwrap();
        assert!(e0.dotc(e1).norm() < 1e-10);
        for w in [&code.codeword_0, &code.codeword_1] {
            assert!((w.expectation(&parity).unwrap().re - 1.0).abs() < 1e-10);
        }
        for e in [code.error_0.as_ref().unwrap(), code.error_1.as_ref().unwrap()] {
            assert!((e.expectation(&parity).unwrap().re + 1.0).abs() < 1e-10);
        }
        assert_eq!(code.parity(), Some(Parity::Even));
    }
}

#[test]
fn encode_examples() {
    let code = build_code(CodeKind::FOCK, 0.0, 4).unwrap();
    assert_eq!(encode(&code, (0.0, 0.0)), code.codeword_0);
    let plus = encode(&code, (FRAC_PI_2, 0.0));
    let v = plus.amplitudes().unwrap();
    assert!((v[0].re - 0.5f64.sqrt()).abs() < 1e-15 && (v[1].re - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn antipodal_cardinals_orthogonal() {
    for code in [cat(1.3), build_code(CodeKind::Binomial, 0.0, DIM).unwrap()] {
        for pair in CARDINALS.chunks(2) {
            let a = encode(&code, pair[0].bloch());
            let b = encode(&code, pair[1].bloch());
            assert!(a.amplitudes().unwrap().dotc(b.amplitudes().unwrap()).norm() < 1e-10);
        }
    }
}

#[test]
fn overlap_examples() {
    let code = cat(1.3);
    let (p0, p1, leak) = logical_overlaps(&code.codeword_0, &code, false).unwrap();
    assert!((p0 - 1.0).abs() < 1e-12 && p1.abs() < 1e-12 && leak.abs() < 1e-12);

    let fock = build_code(CodeKind::FOCK, 0.0, 4).unwrap();
    let two = QState::basis(ModeSpace::single(4).unwrap(), &[2]).unwrap();
    assert_eq!(logical_overlaps(&two, &fock, false).unwrap(), (0.0, 0.0, 1.0));
    assert!(logical_overlaps(&two, &fock, true).is_err());

    // one photon lost from a logical superposition
    let s = ModeSpace::single(DIM).unwrap();
    let a = annihilation(&s, 0).unwrap();
    let psi = encode(&code, (1.1, 0.4));
    let lost = QState::pure(s, a.apply(psi.amplitudes().unwrap()).unwrap()).unwrap();
    let (q0, q1, _) = logical_overlaps(&lost, &code, false).unwrap();
    assert!(q0.abs() < 1e-9 && q1.abs() < 1e-9);
    let (e0, e1, leak) = logical_overlaps(&lost, &code, true).unwrap();
    assert!((e0 + e1 - 1.0).abs() < 1e-9 && leak.abs() < 1e-9);
}

#[test]
fn loss_channel_examples() {
    let s = ModeSpace::single(6).unwrap();
    let one = QState::basis(s.clone(), &[1]).unwrap();
    assert_eq!(loss_channel(&one, 1.0).unwrap(), one);
    let out = loss_channel(&one, 0.7).unwrap();
    let p = out.populations();
    assert!((p[1] - 0.7).abs() < 1e-14 && (p[0] - 0.3).abs() < 1e-14);
    assert!(loss_channel(&one, 0.0).is_err());

    let d = 30;
    let alpha = C64::new(1.2, -0.5);
    let eta: f64 = 0.6;
    let input = coherent_state(d, alpha).unwrap();
    let out = loss_channel(&input, eta).unwrap();
    let expect = coherent_state(d, alpha * eta.sqrt()).unwrap();
    assert!(fidelity(&out, &expect).unwrap() > 1.0 - 1e-8);
    assert!((out.density_matrix().trace().re - 1.0).abs() < 1e-10);
}

#[test]
fn relabeled_code_is_the_error_space() {
    let code = cat(1.3);
    let odd = code.relabeled().unwrap();
    assert_eq!(odd.space, CodeSpace::Error);
    assert_eq!(&odd.codeword_0, code.error_0.as_ref().unwrap());
    assert_eq!(odd.parity(), Some(Parity::Odd));
    assert!(build_code(CodeKind::FOCK, 0.0, 3).unwrap().relabeled().is_err());
}

#[test]
fn optimal_alpha_at_measured_efficiency() {
    let (alpha, f) = optimal_alpha(0.84, ALPHA_SEARCH_RANGE, DIM).unwrap();
    assert!((alpha - 1.3).abs() < 0.1, "alpha* = {alpha}");
    assert!((f - 0.97).abs() < 0.01, "F = {f}");
}

#[test]
fn lossless_limit_is_flat() {
    for alpha in [0.6, 1.3, 2.0] {
        let code = build_code(CodeKind::Cat, alpha, 20).unwrap();
        assert!((corrected_fidelity(&code, 1.0).unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn infidelity_curves_are_u_shaped() {
    let d = 24;
    let alphas: Vec<f64> = (0..=20).map(|k| 0.5 + 0.1 * k as f64).collect();
    for eta in [0.75, 0.85, 0.95] {
        let infid: Vec<f64> = alphas
            .iter()
            .map(|&a| 1.0 - corrected_fidelity(&build_code(CodeKind::Cat, a, d).unwrap(), eta).unwrap())
            .collect();
        let k = (0..infid.len()).min_by(|&i, &j| infid[i].total_cmp(&infid[j])).unwrap();
        assert!(k > 0 && k < infid.len() - 1, "eta {eta}: minimum at the edge");
        assert!(infid[..k].windows(2).all(|w| w[0] > w[1]), "eta {eta}: not decreasing before the minimum");
        assert!(infid[k..].windows(2).all(|w| w[0] < w[1]), "eta {eta}: not increasing after the minimum");
    }
}

#[test]
fn post_transfer_basis_shrinks() {
    let code = cat(1.3);
    for parity in [Parity::Even, Parity::Odd] {
        let basis = post_transfer_basis(&code, 0.84, parity).unwrap();
        assert!((basis.alpha - 1.2).abs() < 0.1, "{parity:?}: {}", basis.alpha);
    }
    let same = post_transfer_basis(&code, 1.0, Parity::Even).unwrap();
    assert!((same.alpha - 1.3).abs() < 0.01);
    assert!(post_transfer_basis(&build_code(CodeKind::FOCK, 0.0, 4).unwrap(), 0.9, Parity::Even).is_err());
}

#[test]
fn cat_beats_binomial_by_a_few_percent() {
    let (cat, binomial) = compare_binomial(0.84, DIM).unwrap();
    let gap = cat - binomial;
    assert!(gap > 0.005 && gap < 0.05, "gap {gap}");
    let (c1, b1) = compare_binomial(1.0, DIM).unwrap();
    assert!((c1 - 1.0).abs() < 1e-6 && (b1 - 1.0).abs() < 1e-6);
}

/// Bloch angles of the cardinal set rotated about the axis `(theta, phi)` by `angle`.
fn rotated_cardinals(axis: (f64, f64), angle: f64) -> Vec<(f64, f64)> {
    let k = [axis.0.sin() * axis.1.cos(), axis.0.sin() * axis.1.sin(), axis.0.cos()];
    CARDINALS
        .iter()
        .map(|c| {
            let (t, p) = c.bloch();
            let v = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            let dot = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
            let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
            let r: Vec<f64> = (0..3)
                .map(|i| v[i] * angle.cos() + cross[i] * angle.sin() + k[i] * dot * (1.0 - angle.cos()))
                .collect();
            (r[2].clamp(-1.0, 1.0).acos(), r[1].atan2(r[0]))
        })
        .collect()
}

#[test]
fn objective_independent_of_cardinal_frame() {
    let code = cat(1.3);
    let base = corrected_fidelity(&code, 0.84).unwrap();
    for (axis, angle) in [((0.0, 0.0), 0.7), ((FRAC_PI_2, 0.3), 1.9), ((1.0, 2.0), PI / 3.0)] {
        let pts = rotated_cardinals(axis, angle);
        let f = corrected_fidelity_over(&code, 0.84, &pts).unwrap();
        assert!((f - base).abs() < 1e-6, "{f} vs {base}");
    }
}

#[test]
fn kraus_set_trace_complete() {
    for d in [2, 7, 15] {
        let ks = loss_kraus(d, 0.37).unwrap();
        let mut sum = buslink_core::CMatrix::zeros(d, d);
        for k in &ks {
            sum += k.adjoint() * k;
        }
        let dev = (sum - buslink_core::CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn single_loss_leaves_code_space(alpha in 0.4f64..1.6, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
        let code = build_code(CodeKind::Cat, alpha, DIM).unwrap();
        let psi = encode(&code, (theta, phi));
        let v = psi.amplitudes().unwrap();
        let lowered = CVector::from_fn(DIM, |n, _| if n + 1 < DIM { v[n + 1] * ((n + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) });
        let [w0, w1] = code.words();
        prop_assert!(w0.dotc(&lowered).norm() < 1e-9);
        prop_assert!(w1.dotc(&lowered).norm() < 1e-9);
    }

    #[test]
    fn loss_preserves_trace(eta in 0.01f64..1.0, n in 0usize..8) {
        let s = ModeSpace::single(8).unwrap();
        let out = loss_channel(&QState::basis(s, &[n]).unwrap(), eta).unwrap();
        prop_assert!((out.density_matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!((out.mean_photons(0).unwrap() - eta * n as f64).abs() < 1e-10);
    }
}
