//! Parameter sweeps over α, σ, λ and x⁰.
//!
//! The cross product is expanded in a fixed order (α outermost, x⁰
//! innermost). Runs execute concurrently on a bounded pool; each owns the
//! subdirectory `run_NNNN` and a seed derived from the scenario seed and its
//! index, so results do not depend on scheduling.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ScenarioConfig, SweepSpec};
use crate::runner::{run_scenario, ExitStatus, RunError, RunOutcome};
use crate::scenario::Scenario;

/// One point of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub x0: Option<Vec<f64>>,
    /// The base scenario with this point's overrides and no sweep table.
    pub config: ScenarioConfig,
}

pub fn run_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64() >> 1
}

fn axis<T: Clone>(values: &Option<Vec<T>>) -> Vec<Option<T>> {
    match values {
        Some(v) => v.iter().cloned().map(Some).collect(),
        None => vec![None],
    }
}

/// Expands the sweep table of `config` (a missing table yields one run).
pub fn expand_sweep(config: &ScenarioConfig) -> Vec<SweepPoint> {
    let spec = config.sweep.clone().unwrap_or_else(SweepSpec::default);
    let mut points = Vec::new();
    for alpha in axis(&spec.alpha) {
        for sigma in axis(&spec.sigma) {
            for lambda in axis(&spec.lambda) {
                for x0 in axis(&spec.x0) {
                    let index = points.len();
                    let mut c = config.clone();
                    c.sweep = None;
                    c.seed = run_seed(config.seed, index);
                    if let Some(a) = alpha {
                        c.gamma.alpha = a;
                    }
                    if let Some(s) = sigma {
                        c.solver.sigma = Some(s);
                    }
                    if let Some(l) = lambda {
                        c.solver.lambda = Some(l);
                        c.solver.lambda_lo = Some(l);
                        c.solver.lambda_hi = Some(l);
                        c.solver.lambda_schedule = Some("constant".to_owned());
                        c.solver.lambda_values = None;
                    }
                    if let Some(x) = &x0 {
                        c.x0 = x.clone();
                    }
                    points.push(SweepPoint { index, alpha, sigma, lambda, x0, config: c });
                }
            }
        }
    }
    points
}

pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub results: Vec<Result<RunOutcome, RunError>>,
}

impl SweepOutcome {
    /// Highest exit code among the runs.
    pub fn status(&self) -> ExitStatus {
        self.results
            .iter()
            .map(|r| r.as_ref().map_or(ExitStatus::ConfigOrIo, |o| o.status))
            .max_by_key(|s| s.code())
            .unwrap_or(ExitStatus::Certified)
    }

    /// `sweep.csv`: one row per run.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("run,alpha,sigma,lambda,x0,exit_status,iterations,final_point,final_value\n");
        let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        let coords = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        for (p, r) in self.points.iter().zip(&self.results) {
            let _ = write!(
                out,
                "{},{},{},{},{},",
                p.index,
                opt(p.alpha),
                opt(p.sigma),
                opt(p.lambda),
                p.x0.as_deref().map(coords).unwrap_or_default()
            );
            match r {
                Ok(o) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{:e}",
                        o.status.as_str(),
                        o.trace.iterations(),
                        coords(o.trace.final_point.coords()),
                        o.trace.final_value
                    );
                }
                Err(_) => {
                    let _ = writeln!(out, "{},,,", ExitStatus::ConfigOrIo.as_str());
                }
            }
        }
        out
    }
}

pub fn run_dir(out_dir: &Path, index: usize) -> std::path::PathBuf {
    out_dir.join(format!("run_{index:04}"))
}

/// Runs every sweep point with at most `workers` threads and writes
/// `sweep.csv` plus one subdirectory per run.
pub fn run_sweep(config: &ScenarioConfig, out_dir: &Path, workers: usize) -> Result<SweepOutcome, RunError> {
    Scenario::build(config)?;
    let points = expand_sweep(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool construction");
    let results: Vec<Result<RunOutcome, RunError>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| run_scenario(&p.config, &run_dir(out_dir, p.index)))
            .collect()
    });
    let outcome = SweepOutcome { points, results };
    fs::create_dir_all(out_dir).map_err(|e| RunError::Io { path: out_dir.to_owned(), source: e })?;
    let path = out_dir.join("sweep.csv");
    fs::write(&path, outcome.to_csv()).map_err(|e| RunError::Io { path, source: e })?;
    Ok(outcome)
}
