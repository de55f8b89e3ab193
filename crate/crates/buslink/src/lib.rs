//! Configuration, scenario orchestration and file output for the buslink
//! simulator.

pub mod bundle;
pub mod config;
pub mod error;
pub mod gnuplot;
pub mod scenarios;

pub use bundle::{Cell, ResultBundle, Table};
pub use config::{Diagnostic, Scenario, ScenarioConfig};
pub use error::{AppError, AppResult};
pub use scenarios::run;
