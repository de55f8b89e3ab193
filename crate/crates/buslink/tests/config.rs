use buslink::config::{apply_override, derived, diagnose, parse, Scenario, ScenarioConfig};
use buslink::AppError;
use buslink_core::dynamics::ThreeModeParams;
use proptest::prelude::*;
use serde_json::{json, Value};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn defaults_are_the_reference_device() {
    let cfg = parse("{}", &[]).unwrap();
    assert_eq!(cfg, ScenarioConfig::default());
    let p = cfg.params();
    let r = ThreeModeParams::reference_loss_only();
    assert!(close(p.g, r.g) && close(p.kappa_b, r.kappa_b));
    assert_eq!((p.kappa_1, p.gamma_phi_1), (0.0, 0.0));
}

#[test]
fn full_error_model_matches_reference() {
    let cfg = parse(r#"{"errors": {"cavity_loss": true, "dephasing": true}}"#, &[]).unwrap();
    let (p, r) = (cfg.params(), ThreeModeParams::reference_full());
    for (a, b) in [
        (p.kappa_1, r.kappa_1),
        (p.kappa_2, r.kappa_2),
        (p.gamma_phi_1, r.gamma_phi_1),
        (p.gamma_phi_2, r.gamma_phi_2),
    ] {
        assert!(close(a, b), "{a} vs {b}");
    }
    assert_eq!(p.dephasing, r.dephasing);
}

#[test]
fn parse_errors_name_line_and_field() {
    let text = "{\n  \"physics\": {\n    \"g_hz\": 560\n  }\n}";
    let AppError::Config(msg) = parse(text, &[]).unwrap_err() else { panic!() };
    assert!(msg.contains("line 3") && msg.contains("g_hz"), "{msg}");
    let text = "{\n  \"truncation\": {\"cavity_dim\": -3}\n}";
    let err = parse(text, &[]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("line 2"), "{err}");
    assert!(parse("{\"scenario\": \"teleport\"}", &[]).is_err());
}

#[test]
fn overrides() {
    let cfg = parse(
        r#"{"physics": {"g_khz": 500}}"#,
        &["physics.g_khz=600".into(), "code.kind=fock".into(), "multiround.shots=1000".into(), "output.dir=/tmp/x".into()],
    )
    .unwrap();
    assert_eq!(cfg.physics.g_khz, 600.0);
    assert_eq!(cfg.multiround.shots, Some(1000));
    assert_eq!(cfg.output.dir.to_str(), Some("/tmp/x"));
    assert!(!cfg.track_parity());
    let mut v = json!({});
    apply_override(&mut v, "a.b.c=[1,2]").unwrap();
    assert_eq!(v, json!({"a": {"b": {"c": [1, 2]}}}));
    assert!(apply_override(&mut v, "no-equals").is_err());
    assert!(apply_override(&mut v, "a..b=1").is_err());
    assert!(apply_override(&mut v, "a.b.c.d=1").is_err());
    assert!(parse("{}", &["physics.bogus=1".into()]).is_err());
}

#[test]
fn underdamped_violation_is_reported() {
    let cfg = parse(r#"{"physics": {"g_khz": 100, "kappa_b_khz": 600}}"#, &[]).unwrap();
    let d = diagnose(&cfg, Scenario::EntangleSingle);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].field, "physics.kappa_b_khz");
    assert!(d[0].message.contains("underdamped"), "{}", d[0].message);
    assert_eq!(derived(&cfg).unwrap().eta, None);
    // the bus is irrelevant to the link budget
    assert!(diagnose(&cfg, Scenario::LinkBudget).is_empty());
}

#[test]
fn reference_file_is_clean_with_derived_quantities() {
    let cfg = parse(r#"{"scenario": "transfer"}"#, &[]).unwrap();
    for s in Scenario::ALL {
        let d = diagnose(&ScenarioConfig { scenario: None, ..cfg.clone() }, s);
        assert!(d.is_empty(), "{s}: {d:?}");
    }
    let d = derived(&cfg).unwrap();
    assert!((d.t_swap_ns - 631.3).abs() < 0.1);
    assert!((d.t50_ns - 546.8).abs() < 0.1);
    assert!((d.delta50_khz - 914.5).abs() < 0.1);
    assert!((d.eta.unwrap() - 0.899).abs() < 0.001);
}

#[test]
fn scenario_specific_checks() {
    let cfg = parse(r#"{"scenario": "transfer"}"#, &[]).unwrap();
    assert_eq!(diagnose(&cfg, Scenario::Multiround)[0].field, "scenario");
    let fields = |text: &str, s: Scenario| -> Vec<String> {
        diagnose(&parse(text, &[]).unwrap(), s).into_iter().map(|d| d.field).collect()
    };
    assert_eq!(fields(r#"{"code": {"kind": "fock"}, "transfer": {"track_parity": true}}"#, Scenario::Transfer), ["transfer.track_parity"]);
    assert_eq!(fields(r#"{"wigner": {"state": "up"}}"#, Scenario::WignerExport), ["wigner.state"]);
    assert_eq!(fields(r#"{"truncation": {"cavity_dim": 3}}"#, Scenario::EntangleHom), ["truncation.cavity_dim"]);
    assert_eq!(fields(r#"{"multiround": {"max_rounds": 0}}"#, Scenario::Multiround), ["multiround.max_rounds"]);
    assert_eq!(fields(r#"{"optimal_alpha": {"eta": [1.5]}}"#, Scenario::OptimalAlpha), ["optimal_alpha.eta"]);
    assert_eq!(fields(r#"{"link_budget": {"q_factor": 0}}"#, Scenario::LinkBudget), ["link_budget"]);
    assert_eq!(fields(r#"{"errors": {"p_correct_g": 0.3}}"#, Scenario::LinkBudget), ["errors.p_correct_g"]);
    assert_eq!(fields(r#"{"code": {"alpha": 3.0}}"#, Scenario::Transfer), ["code"]);
    assert_eq!(fields(r#"{"sweep": {"t_points": 1}}"#, Scenario::SweepDetuning), ["sweep.t_points"]);
    assert_eq!(fields(r#"{"optimal_alpha": {"cavity_dim": 15}}"#, Scenario::OptimalAlpha), ["optimal_alpha.alpha_max"]);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = parse(r#"{"seed": 9, "multiround": {"p_success": 0.79}}"#, &[]).unwrap();
    let v: Value = serde_json::to_value(&cfg).unwrap();
    let back: ScenarioConfig = serde_json::from_value(v).unwrap();
    assert_eq!(back, cfg);
}

proptest! {
    #[test]
    fn numeric_override_is_exact(g in 1.0f64..1e4, seed in any::<u64>()) {
        let cfg = parse("{}", &[format!("physics.g_khz={g:?}"), format!("seed={seed}")]).unwrap();
        prop_assert_eq!(cfg.physics.g_khz, g);
        prop_assert_eq!(cfg.seed, seed);
    }
}
