use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use quasiprox_cli::{
    certify_endpoint, parse_config, run_scenario, run_sweep, ConfigError, ExitStatus, RunError,
    ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "quasiprox", version, about = "Inexact proximal point runs over quasi-metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker cap for sweeps.
    #[arg(long, global = true, env = "QUASIPROX_WORKERS")]
    workers: Option<usize>,

    /// Output directory (overrides `out_dir` in the scenario).
    #[arg(long, global = true, env = "QUASIPROX_OUT")]
    out: Option<PathBuf>,

    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run,
    /// Run every point of the scenario's [sweep] table.
    Sweep,
    /// Check a scenario file and report every problem.
    Validate,
    /// Re-certify the endpoint of an existing trace CSV.
    Certify {
        /// Trace written by a previous run.
        #[arg(long)]
        trace: PathBuf,
    },
}

fn load(cli: &Cli) -> Result<ScenarioConfig, RunError> {
    let path = cli.config.as_deref().ok_or_else(|| {
        RunError::Config(ConfigError::Semantic(vec![quasiprox_cli::SemanticError {
            path: "--config".to_owned(),
            message: "a scenario file is required".to_owned(),
        }]))
    })?;
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_owned(), source })?;
    let mut config = parse_config(&text).map_err(|source| RunError::InFile { path: path.to_owned(), source })?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
        parse_config(&quasiprox_cli::print_config(&config))?;
    }
    Ok(config)
}

fn out_dir(cli: &Cli, config: &ScenarioConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn say(cli: &Cli, text: &str) {
    if !cli.quiet {
        print!("{text}");
    }
}

fn main_inner(cli: &Cli) -> Result<ExitStatus, RunError> {
    let config = load(cli)?;
    match &cli.command {
        Command::Validate => {
            say(cli, "ok\n");
            Ok(ExitStatus::Certified)
        }
        Command::Run => {
            let dir = out_dir(cli, &config);
            let outcome = run_scenario(&config, &dir)?;
            say(cli, &outcome.summary());
            say(cli, &format!("artifacts = {}\n", dir.display()));
            Ok(outcome.status)
        }
        Command::Sweep => {
            let dir = out_dir(cli, &config);
            let workers = cli.workers.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let outcome = run_sweep(&config, &dir, workers)?;
            for (p, r) in outcome.points.iter().zip(&outcome.results) {
                match r {
                    Ok(o) => say(cli, &format!("run_{:04}: {}\n", p.index, o.status.as_str())),
                    Err(e) => eprintln!("run_{:04}: {e}", p.index),
                }
            }
            say(cli, &format!("artifacts = {}\n", dir.display()));
            Ok(outcome.status())
        }
        Command::Certify { trace } => {
            let dir = out_dir(cli, &config);
            let (status, cert) = certify_endpoint(&config, trace, &dir)?;
            say(cli, &cert.to_record());
            Ok(status)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::ConfigOrIo.code() } else { 0 };
            let _ = e.print();
            process::exit(code);
        }
    };
    let status = main_inner(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitStatus::ConfigOrIo
    });
    process::exit(status.code());
}
