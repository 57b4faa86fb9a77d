use std::fmt::{self, Write as _};

use super::Regime;
use crate::error::{Error, Result};
use crate::point::Point;
use crate::slack;

/// One accepted step `x_k → x_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `λ_k`, the weight of the step-k subproblem.
    pub lambda: f64,
    pub epsilon: Option<f64>,
    pub x_k: Point,
    pub x_next: Point,
    pub f_k: f64,
    pub f_next: f64,
    /// `q(x_k, x_{k+1})`.
    pub q_step: f64,
    /// `Γ[q_step]`.
    pub gamma_q: f64,
    /// `Γ'[q_step]`.
    pub gamma_prime_q: f64,
    /// `‖w^{k+1}‖` with `w^{k+1} ∈ ∂f(x_{k+1})`.
    pub w_norm: f64,
    /// `‖v^{k+1}‖` with `v^{k+1} ∈ ∂q(x_k, ·)(x_{k+1})`.
    pub v_norm: f64,
    pub descent_ok: bool,
    pub stop_rule_ok: bool,
    /// `P(x_{k+1}) − min P` over the grid (ε-inexact and algorithm 2 only).
    pub global_slack: Option<f64>,
}

impl IterationRecord {
    pub fn is_stay(&self) -> bool {
        self.q_step == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxIters,
    StepFailure(String),
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::StepFailure(_) => "step_failure",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub regime: Regime,
    pub records: Vec<IterationRecord>,
    pub status: Termination,
    pub x0: Point,
    pub f0: f64,
    pub final_point: Point,
    pub final_value: f64,
    /// Norm of the oracle's subgradient element at the final point.
    pub final_residual: f64,
    pub sigma: f64,
    pub b: f64,
    /// λ̄
    pub lambda_lo: f64,
    pub step_tol: f64,
    pub residual_tol: f64,
    pub tail_window: usize,
    /// Where the global conditions were certified.
    pub scope: &'static str,
}

/// Number of trailing λ_k averaged into λ_∞.
pub const LAMBDA_TAIL: usize = 10;

impl Trace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// `Σ Γ[q_step]`.
    pub fn gamma_sum(&self) -> f64 {
        self.records.iter().map(|r| r.gamma_q).sum()
    }

    /// Mean of the last [`LAMBDA_TAIL`] values of `λ_k`, or `λ̄` for an empty trace.
    pub fn lambda_infinity(&self) -> f64 {
        let tail = &self.records[self.records.len().saturating_sub(LAMBDA_TAIL)..];
        if tail.is_empty() {
            self.lambda_lo
        } else {
            tail.iter().map(|r| r.lambda).sum::<f64>() / tail.len() as f64
        }
    }

    /// Whether `f` is nonincreasing along the records (up to the usual slack).
    pub fn is_monotone(&self) -> bool {
        self.records.iter().all(|r| r.f_next <= r.f_k + slack(r.f_k))
    }

    /// `(f(x⁰) − f_star)/(λ̄(1−σ))`, the telescoped bound on [`Trace::gamma_sum`].
    pub fn summability_bound(&self, f_star: f64) -> f64 {
        (self.f0 - f_star) / (self.lambda_lo * (1.0 - self.sigma))
    }

    /// Indices of records failing the sufficient descent or the stopping rule
    /// of algorithm 1 (with this trace's σ and b).
    pub fn algorithm1_violations(&self) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let tol = slack(r.f_k);
                if r.is_stay() {
                    return !(r.f_next <= r.f_k + tol && r.w_norm <= self.residual_tol);
                }
                let descent = r.f_k - r.f_next >= r.lambda * (1.0 - self.sigma) * r.gamma_q - tol;
                let stop = r.w_norm <= self.b * r.gamma_prime_q * r.v_norm + tol;
                !(descent && stop)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Iterate sequence `x⁰, x¹, …` with values.
    pub fn iterates(&self) -> impl Iterator<Item = (&Point, f64)> {
        std::iter::once((&self.x0, self.f0)).chain(self.records.iter().map(|r| (&r.x_next, r.f_next)))
    }

    /// CSV header for a problem of dimension `n`.
    pub fn csv_header(n: usize) -> String {
        let mut h = String::from("k");
        for j in 1..=n {
            let _ = write!(h, ",x{j}");
        }
        h.push_str(",f,q_step,w_norm,v_norm,descent_ok,stop_rule_ok,global_slack,lambda_k");
        h
    }

    /// CSV with one row per iterate. Row `k` holds `x_k` and `f(x_k)`; its step
    /// columns describe the step that produced it, with `lambda_k` the weight
    /// used for that step. Row 0 leaves the step columns empty.
    pub fn to_csv(&self) -> String {
        let n = self.x0.dim();
        let mut out = Self::csv_header(n);
        out.push('\n');
        let _ = write!(out, "0");
        for v in self.x0.iter() {
            let _ = write!(out, ",{v:e}");
        }
        let _ = writeln!(out, ",{:e},,,,,,,", self.f0);
        for (i, r) in self.records.iter().enumerate() {
            let _ = write!(out, "{}", i + 1);
            for v in r.x_next.iter() {
                let _ = write!(out, ",{v:e}");
            }
            let slack = r.global_slack.map(|s| format!("{s:e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                ",{:e},{:e},{:e},{:e},{},{},{},{:e}",
                r.f_next, r.q_step, r.w_norm, r.v_norm, r.descent_ok, r.stop_rule_ok, slack, r.lambda
            );
        }
        out
    }

    /// `key = value` summary of the run.
    pub fn summary_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "regime = {}", self.regime);
        let _ = writeln!(out, "status = {}", self.status);
        if let Termination::StepFailure(msg) = &self.status {
            let _ = writeln!(out, "failure = {msg}");
        }
        let _ = writeln!(out, "iterations = {}", self.iterations());
        let _ = writeln!(out, "final_point = {}", join(self.final_point.iter()));
        let _ = writeln!(out, "final_value = {:e}", self.final_value);
        let _ = writeln!(out, "final_residual = {:e}", self.final_residual);
        let _ = writeln!(out, "gamma_sum = {:e}", self.gamma_sum());
        let _ = writeln!(out, "lambda_infinity = {:e}", self.lambda_infinity());
        let _ = writeln!(out, "scope = {}", self.scope);
        out
    }
}

pub(crate) fn join<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ")
}

/// Final iterate and the λ sequence recovered from a trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEndpoint {
    pub point: Point,
    pub value: f64,
    pub lambdas: Vec<f64>,
}

impl TraceEndpoint {
    /// Mean of the last ten λ_k, if any steps were recorded.
    pub fn lambda_infinity(&self) -> Option<f64> {
        let tail = &self.lambdas[self.lambdas.len().saturating_sub(LAMBDA_TAIL)..];
        (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
    }
}

/// Parses a CSV produced by [`Trace::to_csv`].
pub fn read_trace_endpoint(csv: &str) -> Result<TraceEndpoint> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::invalid("trace CSV is empty"))?
        .split(',')
        .collect();
    let n = header.iter().filter(|h| h.starts_with('x')).count();
    if n == 0 || header.len() != n + 9 || header[0] != "k" {
        return Err(Error::invalid("trace CSV header is not recognised"));
    }
    let parse = |s: &str, line: usize| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("trace CSV line {line}: cannot parse {s:?} as a number")))
    };
    let mut last = None;
    let mut lambdas = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::invalid(format!(
                "trace CSV line {}: expected {} fields, found {}",
                i + 2,
                header.len(),
                fields.len()
            )));
        }
        let point = fields[1..=n]
            .iter()
            .map(|s| parse(s, i + 2))
            .collect::<Result<Vec<f64>>>()?;
        let value = parse(fields[n + 1], i + 2)?;
        let lambda = fields[header.len() - 1];
        if !lambda.is_empty() {
            lambdas.push(parse(lambda, i + 2)?);
        }
        last = Some((point, value));
    }
    let (point, value) = last.ok_or_else(|| Error::invalid("trace CSV has no rows"))?;
    Ok(TraceEndpoint { point: Point::new(point)?, value, lambdas })
}
