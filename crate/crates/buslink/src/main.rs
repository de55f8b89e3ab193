use std::path::PathBuf;
use std::process::ExitCode;

use buslink::config::{self, derived, diagnose, Scenario};
use buslink::{gnuplot, scenarios, AppError, AppResult};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

/// Two-cavity bosonic link simulator.
#[derive(Parser)]
#[command(name = "buslink", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field override such as `physics.g_khz=600`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for Monte Carlo sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
#[command(rename_all = "snake_case")]
enum Command {
    /// Occupations versus detuning and time.
    SweepDetuning(RunArgs),
    /// Logical state transfer fidelities.
    Transfer(RunArgs),
    /// Single-photon Bell state through a 50:50 beamsplitter.
    EntangleSingle(RunArgs),
    /// Two-photon interference with parity postselection.
    EntangleHom(RunArgs),
    /// Heralded entanglement with retries.
    Multiround(RunArgs),
    /// Cat size maximising the corrected fidelity.
    OptimalAlpha(RunArgs),
    /// Wigner function of an encoded state.
    WignerExport(RunArgs),
    /// Cable attenuation length.
    LinkBudget(RunArgs),
    /// Checks a configuration without simulating.
    Validate {
        config: PathBuf,
        /// Scenario to check against; taken from the file when omitted.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Converts a result CSV into a gnuplot data file.
    Gnuplot {
        input: PathBuf,
        /// Defaults to the input path with a `.dat` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_scenario(name: &str) -> AppResult<Scenario> {
    Scenario::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| AppError::Config(format!("unknown scenario `{name}`")))
}

fn run_scenario(scenario: Scenario, args: RunArgs) -> AppResult<()> {
    let mut cfg = config::load(args.config.as_deref(), &args.set)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    info!("{}", scenarios::describe(&cfg.params()));
    let bundle = match args.threads {
        Some(0) => return Err(AppError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| AppError::Config(format!("thread pool: {e}")))?
            .install(|| scenarios::run(&cfg, scenario))?,
        None => scenarios::run(&cfg, scenario)?,
    };
    for path in bundle.write(&cfg.output.dir)? {
        println!("{}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&bundle.summary).expect("summary serialises"));
    Ok(())
}

fn validate(path: PathBuf, scenario: Option<String>, set: Vec<String>) -> AppResult<()> {
    let cfg = config::load(Some(&path), &set)?;
    let scenario = match (scenario, cfg.scenario) {
        (Some(name), _) => parse_scenario(&name)?,
        (None, Some(s)) => s,
        (None, None) => return Err(AppError::Config("no scenario in the file; pass --scenario".into())),
    };
    let problems = diagnose(&cfg, scenario);
    let report = serde_json::json!({
        "scenario": scenario.name(),
        "diagnostics": problems,
        "derived": derived(&cfg),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    if problems.is_empty() {
        Ok(())
    } else {
        Err(AppError::Config(format!("{} problem(s) found", problems.len())))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BUSLINK_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SweepDetuning(a) => run_scenario(Scenario::SweepDetuning, a),
        Command::Transfer(a) => run_scenario(Scenario::Transfer, a),
        Command::EntangleSingle(a) => run_scenario(Scenario::EntangleSingle, a),
        Command::EntangleHom(a) => run_scenario(Scenario::EntangleHom, a),
        Command::Multiround(a) => run_scenario(Scenario::Multiround, a),
        Command::OptimalAlpha(a) => run_scenario(Scenario::OptimalAlpha, a),
        Command::WignerExport(a) => run_scenario(Scenario::WignerExport, a),
        Command::LinkBudget(a) => run_scenario(Scenario::LinkBudget, a),
        Command::Validate { config, scenario, set } => validate(config, scenario, set),
        Command::Gnuplot { input, out } => {
            let out = out.unwrap_or_else(|| input.with_extension("dat"));
            gnuplot::convert(&input, &out).map(|_| println!("{}", out.display()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            warn!("exiting with code {}", e.exit_code());
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
