//! Single-scenario runs and endpoint re-certification.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use quasiprox::prox_solver::{read_trace_endpoint, run, Model, Termination, Trace};
use quasiprox::traps::{
    certify_trap, habituation_profile, variational_trap_report, HabituationProfile, TrapCertificate,
    TrapKind, VariationalTrapReport,
};
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::rate::{emit_rate_data, RateData};
use crate::scenario::Scenario;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExitStatus {
    /// Converged and the endpoint is a (weak or strong) trap.
    Certified,
    /// Invalid configuration or an I/O failure.
    ConfigOrIo,
    MaxIters,
    StepFailure,
    /// Converged, but the endpoint certificate or the worthwhile path failed.
    RefutedTrap,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Certified => 0,
            ExitStatus::ConfigOrIo => 1,
            ExitStatus::MaxIters => 2,
            ExitStatus::StepFailure => 3,
            ExitStatus::RefutedTrap => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExitStatus::Certified => "certified",
            ExitStatus::ConfigOrIo => "config_or_io_error",
            ExitStatus::MaxIters => "max_iters",
            ExitStatus::StepFailure => "step_failure",
            ExitStatus::RefutedTrap => "refuted_trap",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: ConfigError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Solver(#[from] quasiprox::Error),
}

impl RunError {
    fn io(path: &Path, source: io::Error) -> Self {
        RunError::Io { path: path.to_owned(), source }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub trace: Trace,
    pub lambda_star: f64,
    pub report: VariationalTrapReport,
    pub habituation: HabituationProfile,
    pub rate: RateData,
    pub objective: String,
    pub rho_bar: f64,
}

impl RunOutcome {
    pub fn summary(&self) -> String {
        let mut out = self.trace.summary_record();
        out.push_str(&format!("objective = {}\n", self.objective));
        out.push_str(&format!("rho_bar = {:e}\n", self.rho_bar));
        out.push_str(&format!("habituation = {}\n", self.habituation.kind.as_str()));
        out.push_str(&format!("monotone = {}\n", self.habituation.monotone));
        out.push_str(&format!("worthwhile_path = {}\n", self.report.path_ok));
        out.push_str(&format!("trap = {}\n", self.report.certificate.kind.as_str()));
        out.push_str(&format!("lambda_star = {:e}\n", self.lambda_star));
        out.push_str(&format!("rate = {}\n", self.rate.status.label()));
        out.push_str(&format!("exit_status = {}\n", self.status.as_str()));
        out.push_str(&format!("exit_code = {}\n", self.status.code()));
        out
    }
}

/// Runs a built scenario without touching the filesystem.
pub fn execute(scenario: &Scenario) -> Result<RunOutcome, RunError> {
    let model = Model::new(scenario.objective.as_ref(), scenario.quasi.as_ref(), &scenario.gamma)?;
    let trace = run(scenario.regime, &model, &scenario.solver, &scenario.x0)?;
    let lambda_star = scenario.trap.lambda_star(trace.lambda_infinity());
    let report = variational_trap_report(&trace, &model, lambda_star, &scenario.trap.sampling)?;
    let habituation = habituation_profile(&trace);
    let rate = emit_rate_data(&trace, scenario.objective.as_ref(), scenario.kl.as_ref());
    let status = match trace.status {
        Termination::StepFailure(_) => ExitStatus::StepFailure,
        Termination::MaxIters => ExitStatus::MaxIters,
        Termination::Converged if !report.path_ok || report.certificate.kind == TrapKind::Refuted => {
            ExitStatus::RefutedTrap
        }
        Termination::Converged => ExitStatus::Certified,
    };
    Ok(RunOutcome {
        status,
        trace,
        lambda_star,
        report,
        habituation,
        rate,
        objective: scenario.objective.name().to_owned(),
        rho_bar: scenario.rho_bar,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| RunError::io(&path, e))
}

/// Writes `trace.csv`, `summary.txt`, `certificate.txt`, `habituation.csv`,
/// `rate.csv` and `rate.txt` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    write(dir, "trace.csv", &outcome.trace.to_csv())?;
    write(dir, "summary.txt", &outcome.summary())?;
    let mut cert = outcome.report.certificate.to_record();
    cert.push_str(&format!("worthwhile_path = {}\n", outcome.report.path_ok));
    write(dir, "certificate.txt", &cert)?;
    write(dir, "habituation.csv", &outcome.habituation.to_csv())?;
    write(dir, "rate.csv", &outcome.rate.to_csv())?;
    write(dir, "rate.txt", &outcome.rate.to_record())?;
    Ok(())
}

/// Validates, runs and writes one scenario into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    let scenario = Scenario::build(config)?;
    let outcome = execute(&scenario)?;
    write_outputs(&outcome, out_dir)?;
    Ok(outcome)
}

/// Re-certifies the endpoint of an existing trace CSV. λ* comes from
/// `trap.lambda_star` or `trap.lambda_factor` times the trace's tail mean of
/// λ_k (falling back to λ̄ for a trace without steps).
pub fn certify_endpoint(
    config: &ScenarioConfig,
    trace_csv: &Path,
    out_dir: &Path,
) -> Result<(ExitStatus, TrapCertificate), RunError> {
    let scenario = Scenario::build(config)?;
    let text = fs::read_to_string(trace_csv).map_err(|e| RunError::io(trace_csv, e))?;
    let endpoint = read_trace_endpoint(&text)?;
    let model = Model::new(scenario.objective.as_ref(), scenario.quasi.as_ref(), &scenario.gamma)?;
    let lambda_inf = endpoint.lambda_infinity().unwrap_or(scenario.solver.lambda_lo);
    let lambda_star = scenario.trap.lambda_star(lambda_inf);
    let cert = certify_trap(&model, lambda_star, &endpoint.point, &scenario.trap.sampling)?;
    fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    write(out_dir, "certificate.txt", &cert.to_record())?;
    let status = if cert.kind == TrapKind::Refuted {
        ExitStatus::RefutedTrap
    } else {
        ExitStatus::Certified
    };
    Ok((status, cert))
}
