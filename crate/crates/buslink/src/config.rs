//! Scenario configuration: JSON in cyclic kHz and ns, converted to SI
//! angular rates at the boundary.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use buslink_core::beamsplitter::{attenuation_budget, bs_time, detuning_for_angle, swap_efficiency, Order, SPEED_OF_LIGHT};
use buslink_core::codes::{build_code, Cardinal, CodeKind, LogicalCode, CARDINALS};
use buslink_core::dynamics::{DephasingModel, ThreeModeParams, CALIBRATED_GAMMA_PHI, REFERENCE_CAVITY_T1};
use buslink_core::protocols::{MeasurementModel, ProtocolTiming, SimSettings, DEFAULT_DECODE_ERROR};
use buslink_core::tomography::GridSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SweepDetuning,
    Transfer,
    EntangleSingle,
    EntangleHom,
    Multiround,
    OptimalAlpha,
    WignerExport,
    LinkBudget,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::SweepDetuning,
        Scenario::Transfer,
        Scenario::EntangleSingle,
        Scenario::EntangleHom,
        Scenario::Multiround,
        Scenario::OptimalAlpha,
        Scenario::WignerExport,
        Scenario::LinkBudget,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::SweepDetuning => "sweep_detuning",
            Scenario::Transfer => "transfer",
            Scenario::EntangleSingle => "entangle_single",
            Scenario::EntangleHom => "entangle_hom",
            Scenario::Multiround => "multiround",
            Scenario::OptimalAlpha => "optimal_alpha",
            Scenario::WignerExport => "wigner_export",
            Scenario::LinkBudget => "link_budget",
        }
    }

    /// Whether the scenario simulates the three-mode dynamics.
    pub fn uses_dynamics(&self) -> bool {
        matches!(
            self,
            Scenario::SweepDetuning | Scenario::Transfer | Scenario::EntangleSingle | Scenario::EntangleHom | Scenario::Multiround
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingKind {
    #[default]
    PhaseRandomizing,
    Diffusive,
}

/// Device rates as cyclic frequencies (kHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub g_khz: f64,
    pub delta_khz: f64,
    pub kappa_b_khz: f64,
    pub kappa_1_khz: f64,
    pub kappa_2_khz: f64,
    pub gamma_phi_khz: f64,
    pub dephasing_model: DephasingKind,
}

impl Default for Physics {
    fn default() -> Self {
        let cyclic_khz = |rate: f64| rate / (2.0 * PI) / 1e3;
        Self {
            g_khz: 560.0,
            delta_khz: 0.0,
            kappa_b_khz: 110.0,
            kappa_1_khz: cyclic_khz(1.0 / REFERENCE_CAVITY_T1[0]),
            kappa_2_khz: cyclic_khz(1.0 / REFERENCE_CAVITY_T1[1]),
            gamma_phi_khz: cyclic_khz(CALIBRATED_GAMMA_PHI),
            dephasing_model: DephasingKind::PhaseRandomizing,
        }
    }
}

/// Switches for each error source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorModel {
    pub bus_loss: bool,
    pub cavity_loss: bool,
    pub dephasing: bool,
    pub readout: bool,
    pub p_correct_g: f64,
    pub p_correct_e: f64,
    pub decode_error: f64,
    pub thermal_cavity: f64,
    pub thermal_bus: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        let m = MeasurementModel::reference();
        Self {
            bus_loss: true,
            cavity_loss: false,
            dephasing: false,
            readout: false,
            p_correct_g: m.p_correct_g,
            p_correct_e: m.p_correct_e,
            decode_error: DEFAULT_DECODE_ERROR,
            thermal_cavity: 0.0,
            thermal_bus: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    pub cavity_dim: Option<usize>,
    pub bus_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeChoice {
    #[default]
    Cat,
    Fock,
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub kind: CodeChoice,
    pub alpha: f64,
    pub fock_levels: [usize; 2],
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self {
            kind: CodeChoice::Cat,
            alpha: 1.3,
            fock_levels: [0, 1],
        }
    }
}

impl CodeConfig {
    pub fn kind(&self) -> CodeKind {
        match self.kind {
            CodeChoice::Cat => CodeKind::Cat,
            CodeChoice::Binomial => CodeKind::Binomial,
            CodeChoice::Fock => CodeKind::Fock {
                lo: self.fock_levels[0],
                hi: self.fock_levels[1],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub delta_min_khz: f64,
    pub delta_max_khz: f64,
    pub delta_points: usize,
    pub t_max_ns: f64,
    pub t_points: usize,
    /// Adds the swap and 50:50 detunings to the grid.
    pub operating_points: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            delta_min_khz: 0.0,
            delta_max_khz: 1500.0,
            delta_points: 31,
            t_max_ns: 1500.0,
            t_points: 151,
            operating_points: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferConfig {
    /// Defaults to on for cat and binomial codes, off for Fock codes.
    pub track_parity: Option<bool>,
    pub decode: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntangleConfig {
    /// Also runs the half-swap and unequal-coupling schemes.
    pub alternate_schemes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiRoundConfig {
    pub max_rounds: usize,
    /// Monte Carlo shots; exact enumeration when absent.
    pub shots: Option<usize>,
    pub p_success: Option<f64>,
    pub prep_failure: f64,
    pub initialize_ns: f64,
    pub attempt_ns: f64,
    pub reset_ns: f64,
    pub tomography_ns: f64,
}

impl Default for MultiRoundConfig {
    fn default() -> Self {
        let t = ProtocolTiming::default();
        Self {
            max_rounds: 3,
            shots: None,
            p_success: None,
            prep_failure: 0.0,
            initialize_ns: t.initialize * 1e9,
            attempt_ns: t.attempt * 1e9,
            reset_ns: t.reset_avg * 1e9,
            tomography_ns: t.tomography * 1e9,
        }
    }
}

impl MultiRoundConfig {
    pub fn timing(&self) -> ProtocolTiming {
        ProtocolTiming {
            initialize: self.initialize_ns * 1e-9,
            attempt: self.attempt_ns * 1e-9,
            reset_avg: self.reset_ns * 1e-9,
            tomography: self.tomography_ns * 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimalAlphaConfig {
    pub eta: Vec<f64>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub curve_points: usize,
    pub cavity_dim: usize,
}

impl Default for OptimalAlphaConfig {
    fn default() -> Self {
        Self {
            eta: vec![0.75, 0.84, 0.85, 0.95],
            alpha_min: 0.3,
            alpha_max: 2.5,
            curve_points: 45,
            cavity_dim: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerConfig {
    /// Cardinal label of the encoded state: +z, -z, +x, -x, +y, -y.
    pub state: String,
    pub extent: Option<f64>,
    pub points: Option<usize>,
    /// Reconstructs the state at this dimension from the grid.
    pub reconstruct_dim: Option<usize>,
    pub mle_max_iterations: usize,
    pub mle_tolerance: f64,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self {
            state: "+z".into(),
            extent: None,
            points: None,
            reconstruct_dim: None,
            mle_max_iterations: 5000,
            mle_tolerance: 1e-10,
        }
    }
}

impl WignerConfig {
    pub fn cardinal(&self) -> Option<Cardinal> {
        CARDINALS.iter().copied().find(|c| c.label() == self.state)
    }

    pub fn grid(&self, dim: usize) -> GridSpec {
        let base = GridSpec::default_for(dim);
        let extent = self.extent.unwrap_or(base.re.1);
        let points = self.points.unwrap_or(base.points_re);
        GridSpec::square(extent, points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudgetConfig {
    pub q_factor: f64,
    pub mode_freq_khz: f64,
    /// Phase velocity in units of c.
    pub velocity_fraction: f64,
    pub cable_length_m: f64,
}

impl Default for LinkBudgetConfig {
    fn default() -> Self {
        Self {
            q_factor: 51000.0,
            mode_freq_khz: 5.643e6,
            velocity_fraction: 0.7,
            cable_length_m: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// One scenario run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub physics: Physics,
    pub errors: ErrorModel,
    pub truncation: Truncation,
    pub code: CodeConfig,
    pub sweep: SweepConfig,
    pub transfer: TransferConfig,
    pub entangle: EntangleConfig,
    pub multiround: MultiRoundConfig,
    pub optimal_alpha: OptimalAlphaConfig,
    pub wigner: WignerConfig,
    pub link_budget: LinkBudgetConfig,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// Angular-rate parameters with the enabled error sources.
    pub fn params(&self) -> ThreeModeParams {
        let p = &self.physics;
        let khz = |f: f64| 2.0 * PI * f * 1e3;
        let mut out = ThreeModeParams::lossless(khz(p.g_khz), khz(p.delta_khz));
        if self.errors.bus_loss {
            out = out.with_kappa_b(khz(p.kappa_b_khz));
        }
        if self.errors.cavity_loss {
            out = out.with_cavity_loss(khz(p.kappa_1_khz), khz(p.kappa_2_khz));
        }
        if self.errors.dephasing {
            let model = match p.dephasing_model {
                DephasingKind::PhaseRandomizing => DephasingModel::PhaseRandomizing,
                DephasingKind::Diffusive => DephasingModel::Diffusive,
            };
            out = out.with_dephasing(khz(p.gamma_phi_khz), khz(p.gamma_phi_khz), model);
        }
        out
    }

    pub fn measurement(&self) -> MeasurementModel {
        if self.errors.readout {
            MeasurementModel {
                p_correct_g: self.errors.p_correct_g,
                p_correct_e: self.errors.p_correct_e,
                enabled: true,
            }
        } else {
            MeasurementModel::IDEAL
        }
    }

    /// Truncation for runs of `kind`, with overrides and thermal populations.
    pub fn settings(&self, kind: CodeKind) -> SimSettings {
        let base = match kind {
            CodeKind::Cat => SimSettings::cat(),
            _ => SimSettings::fock(),
        };
        SimSettings {
            cavity_dim: self.truncation.cavity_dim.unwrap_or(base.cavity_dim),
            bus_dim: self.truncation.bus_dim.unwrap_or(base.bus_dim),
            thermal_cavity_2: self.errors.thermal_cavity,
            thermal_bus: self.errors.thermal_bus,
            ..base
        }
    }

    pub fn build_code(&self) -> buslink_core::Result<LogicalCode> {
        let kind = self.code.kind();
        build_code(kind, self.code.alpha, self.settings(kind).cavity_dim)
    }

    pub fn track_parity(&self) -> bool {
        self.transfer.track_parity.unwrap_or(self.code.kind != CodeChoice::Fock)
    }
}

fn parse_error(err: serde_json::Error) -> AppError {
    AppError::Config(format!("line {} column {}: {err}", err.line(), err.column()))
}

/// Parses `text` and applies `--set key=value` overrides.
pub fn parse(text: &str, overrides: &[String]) -> AppResult<ScenarioConfig> {
    if overrides.is_empty() {
        return serde_json::from_str(text).map_err(parse_error);
    }
    let mut value: Value = serde_json::from_str(text).map_err(parse_error)?;
    for spec in overrides {
        apply_override(&mut value, spec)?;
    }
    serde_json::from_value(value).map_err(|e| AppError::Config(format!("after overrides: {e}")))
}

/// Reads a config file, or the defaults when `path` is `None`.
pub fn load(path: Option<&Path>, overrides: &[String]) -> AppResult<ScenarioConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| AppError::io(p, e))?,
        None => "{}".into(),
    };
    parse(&text, overrides)
}

/// Sets a dotted path such as `physics.g_khz=600`. The value is read as
/// JSON, falling back to a plain string.
pub fn apply_override(root: &mut Value, spec: &str) -> AppResult<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| AppError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(AppError::Config(format!("override key `{key}` has an empty segment")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| AppError::Config(format!("override `{key}`: `{part}` is not inside an object")))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| AppError::Config(format!("override `{key}` does not address an object field")))?;
    obj.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// One precondition violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Operating-point quantities implied by the `physics` settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub t_swap_ns: f64,
    pub t50_ns: f64,
    pub delta50_khz: f64,
    /// Single-photon swap efficiency; absent when the bus is overdamped.
    pub eta: Option<f64>,
}

pub fn derived(cfg: &ScenarioConfig) -> Option<Derived> {
    let p = cfg.params();
    if !(p.g.is_finite() && p.g > 0.0) {
        return None;
    }
    let d50 = detuning_for_angle(p.g, FRAC_PI_4).ok()?;
    Some(Derived {
        t_swap_ns: bs_time(p.g, 0.0) * 1e9,
        t50_ns: bs_time(p.g, d50) * 1e9,
        delta50_khz: d50 / (2.0 * PI) / 1e3,
        eta: swap_efficiency(p.g, p.kappa_b, Order::Exact).ok(),
    })
}

struct Report(Vec<Diagnostic>);

impl Report {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            field: field.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, field: &str, message: &str) {
        if !ok {
            self.push(field, message);
        }
    }

    fn core<T>(&mut self, field: &str, r: buslink_core::Result<T>) -> Option<T> {
        r.map_err(|e| self.push(field, e.to_string())).ok()
    }
}

/// Checks every precondition of `scenario` without simulating.
pub fn diagnose(cfg: &ScenarioConfig, scenario: Scenario) -> Vec<Diagnostic> {
    let mut r = Report(Vec::new());
    if let Some(s) = cfg.scenario {
        r.check(s == scenario, "scenario", &format!("config is for `{s}`, not `{scenario}`"));
    }
    let e = &cfg.errors;
    r.check((0.5..=1.0).contains(&e.p_correct_g), "errors.p_correct_g", "must lie in [0.5, 1]");
    r.check((0.5..=1.0).contains(&e.p_correct_e), "errors.p_correct_e", "must lie in [0.5, 1]");
    r.check((0.0..=0.5).contains(&e.decode_error), "errors.decode_error", "must lie in [0, 0.5]");

    if scenario.uses_dynamics() {
        let p = &cfg.physics;
        for (name, v) in [
            ("physics.kappa_b_khz", p.kappa_b_khz),
            ("physics.kappa_1_khz", p.kappa_1_khz),
            ("physics.kappa_2_khz", p.kappa_2_khz),
            ("physics.gamma_phi_khz", p.gamma_phi_khz),
        ] {
            r.check(v.is_finite() && v >= 0.0, name, "must be finite and non-negative");
        }
        r.check(p.delta_khz.is_finite(), "physics.delta_khz", "must be finite");
        if !(p.g_khz.is_finite() && p.g_khz > 0.0) {
            r.push("physics.g_khz", "must be finite and positive");
        } else if cfg.params().check_underdamped().is_err() {
            r.push(
                "physics.kappa_b_khz",
                format!(
                    "underdamped condition kappa_b < sqrt(32) g violated: {} kHz >= {:.1} kHz",
                    p.kappa_b_khz,
                    32f64.sqrt() * p.g_khz
                ),
            );
        }
    }

    match scenario {
        Scenario::SweepDetuning => {
            let s = &cfg.sweep;
            r.check(
                s.delta_min_khz.is_finite() && s.delta_max_khz.is_finite() && s.delta_min_khz <= s.delta_max_khz,
                "sweep.delta_max_khz",
                "detuning range must be finite with min <= max",
            );
            r.check(s.delta_points >= 1, "sweep.delta_points", "must be at least 1");
            r.check(s.t_max_ns.is_finite() && s.t_max_ns > 0.0, "sweep.t_max_ns", "must be finite and positive");
            r.check(s.t_points >= 2, "sweep.t_points", "must be at least 2");
        }
        Scenario::Transfer => {
            let kind = cfg.code.kind();
            r.core("truncation", cfg.settings(kind).validate());
            r.check(cfg.code.alpha.is_finite() && cfg.code.alpha > 0.0 || cfg.code.kind != CodeChoice::Cat, "code.alpha", "must be positive");
            r.core("code", cfg.build_code());
            r.check(
                !(cfg.track_parity() && cfg.code.kind == CodeChoice::Fock),
                "transfer.track_parity",
                "parity tracking needs a cat or binomial code",
            );
        }
        Scenario::EntangleSingle | Scenario::EntangleHom | Scenario::Multiround => {
            let s = cfg.settings(CodeKind::FOCK);
            r.core("truncation", s.validate());
            let need = if scenario == Scenario::EntangleSingle { 2 } else { 4 };
            r.check(
                s.cavity_dim >= need,
                "truncation.cavity_dim",
                &format!("must be at least {need} for this scenario"),
            );
            if scenario == Scenario::Multiround {
                let m = &cfg.multiround;
                r.check(m.max_rounds >= 1, "multiround.max_rounds", "must be at least 1");
                r.check(m.shots.is_none_or(|n| n >= 1), "multiround.shots", "must be at least 1");
                r.check(m.p_success.is_none_or(|p| (0.0..=1.0).contains(&p)), "multiround.p_success", "must lie in [0, 1]");
                r.check((0.0..1.0).contains(&m.prep_failure), "multiround.prep_failure", "must lie in [0, 1)");
                r.core("multiround", m.timing().validate());
            }
        }
        Scenario::OptimalAlpha => {
            let o = &cfg.optimal_alpha;
            r.check(!o.eta.is_empty(), "optimal_alpha.eta", "needs at least one efficiency");
            r.check(o.eta.iter().all(|e| *e > 0.0 && *e <= 1.0), "optimal_alpha.eta", "values must lie in (0, 1]");
            r.check(
                o.alpha_min.is_finite() && o.alpha_min > 0.0 && o.alpha_min < o.alpha_max && o.alpha_max.is_finite(),
                "optimal_alpha.alpha_max",
                "need 0 < alpha_min < alpha_max",
            );
            r.check(o.curve_points >= 2, "optimal_alpha.curve_points", "must be at least 2");
            r.check(o.cavity_dim >= 5, "optimal_alpha.cavity_dim", "must be at least 5");
            if o.alpha_max.is_finite() && o.alpha_max > 0.0 && o.cavity_dim >= 5 {
                r.core("optimal_alpha.alpha_max", build_code(CodeKind::Cat, o.alpha_max, o.cavity_dim));
            }
        }
        Scenario::WignerExport => {
            let w = &cfg.wigner;
            r.check(w.cardinal().is_some(), "wigner.state", "must be one of +z, -z, +x, -x, +y, -y");
            if let Some(code) = r.core("code", cfg.build_code()) {
                let spec = w.grid(code.dim);
                r.core("wigner", spec.validate());
                if let Some(d) = w.reconstruct_dim {
                    r.check(d >= 2, "wigner.reconstruct_dim", "must be at least 2");
                    r.check(spec.points_re * spec.points_im >= d * d, "wigner.points", "grid needs at least dim^2 points");
                }
            }
            r.check(w.mle_max_iterations >= 1, "wigner.mle_max_iterations", "must be at least 1");
            r.check(w.mle_tolerance.is_finite() && w.mle_tolerance > 0.0, "wigner.mle_tolerance", "must be positive");
        }
        Scenario::LinkBudget => {
            let l = &cfg.link_budget;
            r.core(
                "link_budget",
                attenuation_budget(l.q_factor, l.mode_freq_khz * 1e3, l.velocity_fraction * SPEED_OF_LIGHT, l.cable_length_m),
            );
        }
    }
    r.0
}
