//! Empirical convergence-rate data.
//!
//! Rows follow the iterates `x⁰, x¹, …` with the gap `f(x_k) − f*`, where
//! `f*` is the value at the KL reference point when one is configured and
//! the final value otherwise. The fitted slope of `log(gap)` over the tail is
//! an empirical observation only.

use std::fmt::Write as _;

use quasiprox::objectives::{KlDescriptor, Objective};
use quasiprox::prox_solver::{Termination, Trace};

/// Minimum number of usable gaps for a fit.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum RateStatus {
    /// Least-squares slope of `log(gap)` against `k` over the tail.
    Empirical { slope: f64, points: usize },
    /// The gap reached zero at iterate `k` and stayed there.
    FiniteArrival { k: usize },
    Inconclusive { reason: String },
}

impl RateStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RateStatus::Empirical { .. } => "empirical",
            RateStatus::FiniteArrival { .. } => "finite_arrival",
            RateStatus::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub k: usize,
    pub f_gap: f64,
    /// `q(x_{k−1}, x_k)`; absent for the starting point.
    pub q_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateData {
    pub f_star: f64,
    pub rows: Vec<RateRow>,
    pub status: RateStatus,
}

impl RateData {
    /// `k,f_gap,log_f_gap,q_step` rows. `log_f_gap` is empty for gaps at or
    /// below the resolution threshold.
    pub fn to_csv(&self) -> String {
        let threshold = gap_threshold(self.f_star);
        let mut out = String::from("k,f_gap,log_f_gap,q_step\n");
        for r in &self.rows {
            let log = if r.f_gap > threshold { format!("{:e}", r.f_gap.ln()) } else { String::new() };
            let q = r.q_step.map(|q| format!("{q:e}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{},{}", r.k, r.f_gap, log, q);
        }
        out
    }

    /// `key = value` record describing the fit.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "status = {}", self.status.label());
        let _ = writeln!(out, "f_star = {:e}", self.f_star);
        match &self.status {
            RateStatus::Empirical { slope, points } => {
                let _ = writeln!(out, "tail_slope = {slope:e}");
                let _ = writeln!(out, "fit_points = {points}");
                let _ = writeln!(out, "note = empirical least-squares fit of log(f_gap) against k");
            }
            RateStatus::FiniteArrival { k } => {
                let _ = writeln!(out, "arrival_k = {k}");
            }
            RateStatus::Inconclusive { reason } => {
                let _ = writeln!(out, "reason = {reason}");
            }
        }
        out
    }
}

/// Gaps at or below a few ulps of `f*` count as zero.
pub fn gap_threshold(f_star: f64) -> f64 {
    4.0 * f64::EPSILON * f_star.abs()
}

/// Builds the rate table and the tail fit for `trace`.
pub fn emit_rate_data(trace: &Trace, objective: &dyn Objective, kl: Option<&KlDescriptor>) -> RateData {
    let f_star = kl.map_or(trace.final_value, |d| objective.value(d.reference()));
    let mut rows = vec![RateRow { k: 0, f_gap: trace.f0 - f_star, q_step: None }];
    rows.extend(trace.records.iter().enumerate().map(|(i, r)| RateRow {
        k: i + 1,
        f_gap: r.f_next - f_star,
        q_step: Some(r.q_step),
    }));
    let status = classify(trace, &rows, f_star);
    RateData { f_star, rows, status }
}

fn classify(trace: &Trace, rows: &[RateRow], f_star: f64) -> RateStatus {
    if trace.status != Termination::Converged {
        return RateStatus::Inconclusive {
            reason: format!("run ended with status {}", trace.status),
        };
    }
    let threshold = gap_threshold(f_star);
    let arrived: Vec<&RateRow> = rows.iter().filter(|r| r.f_gap.abs() <= threshold).collect();
    // The final iterate defines f* when no reference is given, so a single
    // zero gap is expected; arrival means the iterates sat at f* for longer.
    if arrived.len() >= 2 {
        return RateStatus::FiniteArrival { k: arrived[0].k };
    }
    let usable: Vec<&RateRow> = rows.iter().filter(|r| r.f_gap > threshold).collect();
    if usable.len() < MIN_FIT_POINTS {
        return RateStatus::Inconclusive {
            reason: format!("{} usable gaps, at least {MIN_FIT_POINTS} needed", usable.len()),
        };
    }
    let tail = &usable[usable.len() - (usable.len() / 2).max(MIN_FIT_POINTS)..];
    let slope = least_squares_slope(tail.iter().map(|r| (r.k as f64, r.f_gap.ln())));
    RateStatus::Empirical { slope, points: tail.len() }
}

fn least_squares_slope(points: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}
