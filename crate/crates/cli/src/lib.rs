//! Scenario-driven front end for `quasiprox`: config parsing, single runs,
//! sweeps, certification of saved traces and plot-ready outputs.

pub mod config;
pub mod rate;
pub mod runner;
pub mod scenario;
pub mod sweep;

pub use config::{parse_config, print_config, ConfigError, ScenarioConfig, SemanticError};
pub use rate::{emit_rate_data, RateData, RateStatus};
pub use runner::{certify_endpoint, execute, run_scenario, write_outputs, ExitStatus, RunError, RunOutcome};
pub use scenario::Scenario;
pub use sweep::{expand_sweep, run_sweep, SweepOutcome};
