//! Scenario pipelines. Each returns its tables and a JSON summary.

use std::f64::consts::PI;
use std::time::Instant;

use buslink_core::beamsplitter::{attenuation_budget, fifty_infidelity, SPEED_OF_LIGHT};
use buslink_core::codes::{build_code, corrected_fidelity, encode, optimal_alpha, CodeKind, LogicalCode};
use buslink_core::dynamics::{evolve_lindblad, EvolveConfig, ThreeModeParams, BUS, CAVITY_1, CAVITY_2};
use buslink_core::fock::{fidelity, ModeSpace, QState};
use buslink_core::protocols::{
    asymmetric_entangle, entangle_hom, entangle_hom_multiround, entangle_single_photon, hom_jump_conditioned,
    transfer_report, AlternateScheme, EntanglementResult, MultiRoundMethod, MultiRoundOptions, TransferOptions, TransferRow,
};
use buslink_core::tomography::{concurrence, mle_reconstruct_with, wigner, MleOptions, PAULI_LABELS};
use buslink_core::CVector;
use log::{debug, info};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bundle::{payload_hash, Cell, Metadata, ResultBundle, Table};
use crate::config::{derived, diagnose, Scenario, ScenarioConfig};
use crate::error::{AppError, AppResult};

type Output = (Vec<Table>, Value);

fn khz(angular: f64) -> f64 {
    angular / (2.0 * PI) / 1e3
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn opt(v: Option<f64>) -> Cell {
    v.map_or(Cell::Text(String::new()), Cell::Num)
}

/// Validates, runs and packages one scenario.
pub fn run(cfg: &ScenarioConfig, scenario: Scenario) -> AppResult<ResultBundle> {
    let problems = diagnose(cfg, scenario);
    if !problems.is_empty() {
        let text: Vec<String> = problems.iter().map(|d| d.to_string()).collect();
        return Err(AppError::Config(text.join("; ")));
    }
    info!("running {scenario}");
    let start = Instant::now();
    let (tables, summary) = match scenario {
        Scenario::SweepDetuning => sweep_detuning(cfg)?,
        Scenario::Transfer => transfer(cfg)?,
        Scenario::EntangleSingle => entangle_single(cfg)?,
        Scenario::EntangleHom => entangle_hom_scenario(cfg)?,
        Scenario::Multiround => multiround(cfg)?,
        Scenario::OptimalAlpha => optimal_alpha_scenario(cfg)?,
        Scenario::WignerExport => wigner_export(cfg)?,
        Scenario::LinkBudget => link_budget(cfg)?,
    };
    let wall = start.elapsed().as_secs_f64();
    info!("{scenario} finished in {wall:.2} s");
    let mut echo = cfg.clone();
    echo.scenario = Some(scenario);
    Ok(ResultBundle {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.name().into(),
            seed: cfg.seed,
            config: serde_json::to_value(&echo).expect("config serialises"),
            wall_time_s: wall,
            payload_sha256: payload_hash(&tables, &summary),
        },
        tables,
        summary,
    })
}

fn occupations(state: &QState) -> AppResult<[f64; 3]> {
    Ok([state.mean_photons(CAVITY_1)?, state.mean_photons(CAVITY_2)?, state.mean_photons(BUS)?])
}

fn sweep_detuning(cfg: &ScenarioConfig) -> AppResult<Output> {
    let s = &cfg.sweep;
    let params = cfg.params();
    let d = derived(cfg).ok_or_else(|| AppError::Config("physics.g_khz must be positive".into()))?;
    let mut deltas = linspace(s.delta_min_khz, s.delta_max_khz, s.delta_points);
    if s.operating_points {
        deltas.extend([0.0, d.delta50_khz]);
    }
    deltas.sort_by(f64::total_cmp);
    deltas.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    let times = linspace(0.0, s.t_max_ns, s.t_points);
    let input = QState::basis(ModeSpace::new(&[2, 2, 2])?, &[1, 0, 0])?;

    let blocks = deltas
        .par_iter()
        .map(|&delta| {
            let p = params.with_delta(2.0 * PI * delta * 1e3);
            times
                .iter()
                .map(|&t| Ok((delta, t, occupations(&evolve_lindblad(&input, &p, t * 1e-9, EvolveConfig::default())?)?)))
                .collect::<AppResult<Vec<_>>>()
        })
        .collect::<AppResult<Vec<_>>>()?;

    let mut table = Table::new("sweep_detuning", &["delta [kHz]", "t [ns]", "n1 [photons]", "n2 [photons]", "nb [photons]"]);
    for &(delta, t, n) in blocks.iter().flatten() {
        table.push(vec![delta.into(), t.into(), n[0].into(), n[1].into(), n[2].into()]);
    }
    let column = |target: f64| {
        blocks
            .iter()
            .find(|b| b.first().is_some_and(|r| (r.0 - target).abs() <= 1e-9 * target.abs().max(1.0)))
    };
    let peak = column(0.0).and_then(|b| b.iter().max_by(|a, b| a.2[1].total_cmp(&b.2[1])).map(|r| r.1));
    let crossing = column(d.delta50_khz).and_then(|b| {
        b.windows(2).find(|w| w[0].2[0] > w[0].2[1] && w[1].2[0] <= w[1].2[1]).map(|w| {
            let (f0, f1) = (w[0].2[0] - w[0].2[1], w[1].2[0] - w[1].2[1]);
            w[0].1 + (w[1].1 - w[0].1) * f0 / (f0 - f1)
        })
    });
    let summary = json!({
        "t_swap_ns": d.t_swap_ns,
        "t50_ns": d.t50_ns,
        "delta50_khz": d.delta50_khz,
        "resonant_peak_n2_t_ns": peak,
        "fifty_crossing_t_ns": crossing,
        "deltas": deltas.len(),
        "times": times.len(),
    });
    Ok((vec![table], summary))
}

fn transfer_row(table: &mut Table, row: &TransferRow) {
    table.push(vec![
        row.label.as_str().into(),
        row.no_syndrome.into(),
        opt(row.even),
        opt(row.odd),
        row.weighted.into(),
        row.p_odd.into(),
        opt(row.decoded),
    ]);
}

fn basis_json(code: &Option<LogicalCode>) -> Value {
    code.as_ref().map_or(Value::Null, |c| json!({ "alpha": c.alpha, "phase_rad": c.phase }))
}

fn transfer(cfg: &ScenarioConfig) -> AppResult<Output> {
    let code = cfg.build_code()?;
    let params = cfg.params();
    let options = TransferOptions {
        track_parity: cfg.track_parity(),
        decode: cfg.transfer.decode,
        model: cfg.measurement(),
        decode_error: cfg.errors.decode_error,
        settings: Some(cfg.settings(code.kind)),
    };
    debug!("transfer options {options:?}");
    let report = transfer_report(&code, &params, &options)?;
    let mut table = Table::new(
        "transfer",
        &[
            "state [label]",
            "no_syndrome [1]",
            "even [1]",
            "odd [1]",
            "weighted [1]",
            "p_odd [1]",
            "decoded [1]",
        ],
    );
    for row in &report.rows {
        transfer_row(&mut table, row);
    }
    transfer_row(&mut table, &report.mean);
    let m = &report.mean;
    let summary = json!({
        "code": report.code,
        "alpha": report.alpha,
        "track_parity": options.track_parity,
        "duration_ns": params.t_swap() * 1e9,
        "mean": {
            "no_syndrome": m.no_syndrome,
            "even": m.even,
            "odd": m.odd,
            "weighted": m.weighted,
            "p_odd": m.p_odd,
            "decoded": m.decoded,
        },
        "bases": {
            "even": basis_json(&report.bases.even),
            "odd": basis_json(&report.bases.odd),
            "no_syndrome": basis_json(&Some(report.bases.no_syndrome.clone())),
        },
    });
    Ok((vec![table], summary))
}

fn pauli_table(result: &EntanglementResult) -> Table {
    let mut table = Table::new("paulis", &["pauli [label]", "expectation [1]"]);
    for (label, v) in PAULI_LABELS.iter().zip(result.tomography.paulis.iter()) {
        table.push(vec![(*label).into(), (*v).into()]);
    }
    table
}

fn tomography_json(result: &EntanglementResult) -> AppResult<Value> {
    let t = &result.tomography;
    Ok(json!({
        "trace": t.trace(),
        "concurrence": concurrence(&t.rho)?,
        "paulis": PAULI_LABELS.iter().zip(t.paulis.iter()).map(|(l, v)| (l.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    }))
}

fn entangle_single(cfg: &ScenarioConfig) -> AppResult<Output> {
    let params = cfg.params();
    let result = entangle_single_photon(&params, &cfg.settings(CodeKind::FOCK))?;
    let (oracle, _) = fifty_infidelity(params.g, params.kappa_b);
    let summary = json!({
        "fidelity": result.fidelity(),
        "infidelity": 1.0 - result.fidelity(),
        "closed_form_infidelity": oracle,
        "duration_ns": result.outcome.elapsed * 1e9,
        "tomography": tomography_json(&result)?,
    });
    Ok((vec![pauli_table(&result)], summary))
}

fn entangle_hom_scenario(cfg: &ScenarioConfig) -> AppResult<Output> {
    let params = cfg.params();
    let settings = cfg.settings(CodeKind::FOCK);
    let result = entangle_hom(&params, &cfg.measurement(), &settings)?;
    let mut branches = Table::new("branches", &["parities [label]", "probability [1]", "fidelity [1]"]);
    for b in &result.outcome.branches {
        branches.push(vec![b.label.as_str().into(), b.probability.into(), opt(b.fidelity)]);
    }
    let jump = if params.kappa_b > 0.0 {
        let j = hom_jump_conditioned(&params, &settings)?;
        json!({ "probability": j.probability, "in_cavities": j.in_cavities, "symmetric_overlap": j.symmetric_overlap })
    } else {
        Value::Null
    };
    let mut alternates = serde_json::Map::new();
    if cfg.entangle.alternate_schemes {
        for (name, scheme) in [
            ("sequential_half_swap", AlternateScheme::SequentialHalfSwap),
            ("unequal_couplings", AlternateScheme::UnequalCouplings),
        ] {
            let r = asymmetric_entangle(scheme, &params, &settings)?;
            alternates.insert(
                name.into(),
                json!({
                    "fidelity": r.outcome.weighted_fidelity,
                    "duration_ns": r.outcome.elapsed * 1e9,
                    "jump_symmetric_overlap": r.jump.map(|j| j.symmetric_overlap),
                }),
            );
        }
    }
    let summary = json!({
        "success_probability": result.outcome.success_probability,
        "fidelity": result.fidelity(),
        "infidelity": 1.0 - result.fidelity(),
        "duration_ns": result.outcome.elapsed * 1e9,
        "tomography": tomography_json(&result)?,
        "jump_conditioned": jump,
        "alternate_schemes": alternates,
    });
    Ok((vec![branches, pauli_table(&result)], summary))
}

fn multiround(cfg: &ScenarioConfig) -> AppResult<Output> {
    let m = &cfg.multiround;
    let options = MultiRoundOptions {
        method: match m.shots {
            Some(shots) => MultiRoundMethod::MonteCarlo { shots, seed: cfg.seed },
            None => MultiRoundMethod::Enumerate,
        },
        p_success_override: m.p_success,
        prep_failure: m.prep_failure,
        settings: cfg.settings(CodeKind::FOCK),
    };
    let out = entangle_hom_multiround(&cfg.params(), &cfg.measurement(), m.max_rounds, &m.timing(), &options)?;
    let mut table = Table::new(
        "multiround",
        &["rounds [1]", "cumulative_failure [1]", "cumulative_failure_error [1]", "fidelity [1]"],
    );
    for (k, &c) in out.cumulative.iter().enumerate() {
        let err = out.cumulative_error.as_ref().map(|e| e[k]);
        // fidelity of all states accepted within k + 1 rounds
        let accepted: f64 = out.fidelity_by_round[..=k].iter().sum::<f64>() / (k + 1) as f64;
        table.push(vec![(k + 1).into(), (1.0 - c).into(), opt(err), accepted.into()]);
    }
    let summary = json!({
        "method": if m.shots.is_some() { "monte_carlo" } else { "enumerate" },
        "p_round": out.p_round,
        "success_probability": out.outcome.success_probability,
        "fidelity": out.outcome.weighted_fidelity,
        "mean_rounds": out.mean_rounds,
        "mean_time_ns": out.mean_time * 1e9,
    });
    Ok((vec![table], summary))
}

fn optimal_alpha_scenario(cfg: &ScenarioConfig) -> AppResult<Output> {
    let o = &cfg.optimal_alpha;
    let alphas = linspace(o.alpha_min, o.alpha_max, o.curve_points);
    let pairs: Vec<(f64, f64)> = o.eta.iter().flat_map(|&e| alphas.iter().map(move |&a| (e, a))).collect();
    let curve = pairs
        .par_iter()
        .map(|&(eta, alpha)| Ok(1.0 - corrected_fidelity(&build_code(CodeKind::Cat, alpha, o.cavity_dim)?, eta)?))
        .collect::<AppResult<Vec<f64>>>()?;
    let optima = o
        .eta
        .par_iter()
        .map(|&eta| Ok(optimal_alpha(eta, (o.alpha_min, o.alpha_max), o.cavity_dim)?))
        .collect::<AppResult<Vec<(f64, f64)>>>()?;

    let mut curves = Table::new("curves", &["eta [1]", "alpha [1]", "infidelity [1]"]);
    for (&(eta, alpha), &inf) in pairs.iter().zip(&curve) {
        curves.push(vec![eta.into(), alpha.into(), inf.into()]);
    }
    let mut best = Table::new("optimum", &["eta [1]", "alpha [1]", "corrected_fidelity [1]"]);
    for (&eta, &(alpha, f)) in o.eta.iter().zip(&optima) {
        best.push(vec![eta.into(), alpha.into(), f.into()]);
    }
    let summary = json!({
        "optimum": o.eta.iter().zip(&optima).map(|(e, (a, f))| json!({ "eta": e, "alpha": a, "corrected_fidelity": f })).collect::<Vec<_>>(),
    });
    Ok((vec![curves, best], summary))
}

fn wigner_export(cfg: &ScenarioConfig) -> AppResult<Output> {
    let w = &cfg.wigner;
    let code = cfg.build_code()?;
    let cardinal = w.cardinal().ok_or_else(|| AppError::Config("wigner.state is not a cardinal label".into()))?;
    let state = encode(&code, cardinal.bloch());
    let grid = wigner(&state, &w.grid(code.dim))?;
    let mut table = Table::new("wigner", &["re [1]", "im [1]", "W [1]"]);
    for (k, v) in grid.values.iter().enumerate() {
        let beta = grid.point(k);
        table.push(vec![beta.re.into(), beta.im.into(), (*v).into()]);
    }
    let mut summary = json!({
        "code": code.kind.name(),
        "alpha": code.alpha,
        "state": cardinal.label(),
        "points": grid.len(),
        "integral": grid.integral(),
        "mean_photons": state.mean_photons(0)?,
    });
    if let Some(dim) = w.reconstruct_dim {
        let options = MleOptions {
            max_iterations: w.mle_max_iterations,
            tolerance: w.mle_tolerance,
        };
        let (rho, report) = mle_reconstruct_with(&grid, dim, options)?;
        let amps = state.amplitudes().ok_or(buslink_core::Error::Degenerate("encoded state is mixed"))?;
        let head = CVector::from_fn(dim, |n, _| if n < amps.len() { amps[n] } else { Default::default() });
        let norm = head.norm();
        let target = QState::pure(ModeSpace::single(dim)?, head / buslink_core::C64::new(norm, 0.0))?;
        summary["reconstruction"] = json!({
            "dim": dim,
            "fidelity": fidelity(&rho, &target)?,
            "iterations": report.iterations,
            "residual": report.residual,
        });
    }
    Ok((vec![table], summary))
}

fn link_budget(cfg: &ScenarioConfig) -> AppResult<Output> {
    let l = &cfg.link_budget;
    let velocity = l.velocity_fraction * SPEED_OF_LIGHT;
    let (length, loss) = attenuation_budget(l.q_factor, l.mode_freq_khz * 1e3, velocity, l.cable_length_m)?;
    let mut table = Table::new(
        "link_budget",
        &[
            "q_factor [1]",
            "mode_freq [kHz]",
            "phase_velocity [m/s]",
            "cable_length [m]",
            "attenuation_length [m]",
            "cable_loss [1]",
        ],
    );
    table.push(vec![l.q_factor.into(), l.mode_freq_khz.into(), velocity.into(), l.cable_length_m.into(), length.into(), loss.into()]);
    let summary = json!({
        "attenuation_length_m": length,
        "cable_loss": loss,
        "phase_velocity_m_per_s": velocity,
    });
    Ok((vec![table], summary))
}

/// Rates in cyclic kHz, for logging.
pub fn describe(params: &ThreeModeParams) -> String {
    format!(
        "g {:.1} kHz, delta {:.1} kHz, kappa_b {:.1} kHz, kappa_1 {:.3} kHz, kappa_2 {:.3} kHz, gamma_phi {:.3} kHz",
        khz(params.g),
        khz(params.delta),
        khz(params.kappa_b),
        khz(params.kappa_1),
        khz(params.kappa_2),
        khz(params.gamma_phi_1)
    )
}
