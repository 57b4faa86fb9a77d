//! Worthwhile changes, variational traps and habituation.
//!
//! A move `x → y` is worthwhile at ratio `λ` when the advantage to change
//! exceeds the weighted resistance, `f(x) − f(y) ≥ λΓ[q(x, y)]`. A point
//! `x*` is a strong trap at `λ*` when no move away from it is worthwhile,
//! `f(x*) − f(y) < λ*Γ[q(x*, y)]` for all `y ≠ x*`, and a weak trap when the
//! inequality holds non-strictly.
//!
//! Trap certificates are sampling evidence over the recorded sample set,
//! not proofs.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::prox_solver::{Model, Termination, Trace};
use crate::sampling::{shell_point, UniformBox};
use crate::slack;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worthwhile {
    pub worthwhile: bool,
    /// `f(x) − f(y) − λΓ[q(x, y)]`.
    pub margin: f64,
}

/// Tests `f(x) − f(y) ≥ λΓ[q(x, y)]`, allowing `slack(f(x))`.
pub fn is_worthwhile_change(model: &Model<'_>, lambda: f64, x: &[f64], y: &[f64]) -> Worthwhile {
    let fx = model.f.value(x);
    let margin = fx - model.f.value(y) - lambda * model.gamma.value(model.q.value(x, y));
    Worthwhile {
        worthwhile: margin >= -slack(fx),
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapKind {
    Strong,
    Weak,
    Refuted,
}

impl TrapKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrapKind::Strong => "strong",
            TrapKind::Weak => "weak",
            TrapKind::Refuted => "refuted",
        }
    }
}

/// Gap used to separate strict from non-strict inequalities: `1e-10·(1 + |f(x*)|)`.
pub fn strictness_tolerance(f_star: f64) -> f64 {
    1e-10 * (1.0 + f_star.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapCertificate {
    pub point: Point,
    pub lambda_star: f64,
    pub kind: TrapKind,
    /// Number of samples `y ≠ x*` inside the domain that were evaluated.
    pub samples: usize,
    /// `max f(x*) − f(y) − λ*Γ[q(x*, y)]` over the samples.
    pub worst_violation: f64,
    /// Sample attaining the worst violation.
    pub worst_sample: Option<Point>,
    /// Set when refuted: a sample to which moving is worthwhile.
    pub witness: Option<Point>,
}

impl TrapCertificate {
    /// Structured `key = value` record.
    pub fn to_record(&self) -> String {
        let coords = |p: &Point| p.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "kind = {}", self.kind.as_str());
        let _ = writeln!(out, "point = {}", coords(&self.point));
        let _ = writeln!(out, "lambda_star = {:e}", self.lambda_star);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "worst_violation = {:e}", self.worst_violation);
        let _ = writeln!(
            out,
            "witness = {}",
            self.witness.as_ref().map(coords).unwrap_or_else(|| "none".to_owned())
        );
        let _ = writeln!(out, "evidence = sampled");
        out
    }
}

/// Sample plan for [`certify_trap`]: half uniform over the domain box, half
/// on spheres of the listed radii around `x*` (drawn round-robin).
#[derive(Debug, Clone, PartialEq)]
pub struct TrapSampling {
    pub count: usize,
    pub radii: Vec<f64>,
    pub seed: u64,
}

impl Default for TrapSampling {
    fn default() -> Self {
        TrapSampling {
            count: 10_000,
            radii: vec![1e-4, 1e-2, 1e-1, 1.0],
            seed: 0,
        }
    }
}

/// Draws the sample set of `plan` around `x_star`. Shell points falling
/// outside the domain are redrawn, up to ten attempts per point.
pub fn trap_samples(model: &Model<'_>, x_star: &[f64], plan: &TrapSampling) -> Result<Vec<Point>> {
    if plan.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("trap radii must be positive"));
    }
    let domain = model.f.domain();
    let mut uniform = UniformBox::from_domain(domain, plan.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ 0x9e37_79b9_7f4a_7c15);
    let shells = if plan.radii.is_empty() { 0 } else { plan.count / 2 };
    let mut out = Vec::with_capacity(plan.count);
    for _ in 0..plan.count - shells {
        out.push(uniform.sample());
    }
    for i in 0..shells {
        let r = plan.radii[i % plan.radii.len()];
        let mut y = shell_point(&mut rng, x_star, r);
        for _ in 0..10 {
            if domain.contains(&y) {
                break;
            }
            y = shell_point(&mut rng, x_star, r);
        }
        if domain.contains(&y) {
            out.push(y);
        }
    }
    Ok(out)
}

/// Certifies `x_star` as a trap at `lambda_star` over the sample plan.
pub fn certify_trap(
    model: &Model<'_>,
    lambda_star: f64,
    x_star: &[f64],
    plan: &TrapSampling,
) -> Result<TrapCertificate> {
    let samples = trap_samples(model, x_star, plan)?;
    certify_trap_on(model, lambda_star, x_star, &samples)
}

/// Certifies over an explicit sample set. Samples equal to `x_star` or off
/// the domain are skipped.
pub fn certify_trap_on(
    model: &Model<'_>,
    lambda_star: f64,
    x_star: &[f64],
    samples: &[Point],
) -> Result<TrapCertificate> {
    if !(lambda_star > 0.0 && lambda_star.is_finite()) {
        return Err(Error::invalid(format!("lambda_star must be positive (got {lambda_star})")));
    }
    check_dim(model.dim(), x_star.len())?;
    let f_star = model.f.value(x_star);
    if !f_star.is_finite() {
        return Err(Error::OutsideDomain(x_star.to_vec()));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_sample: Option<&Point> = None;
    let mut count = 0;
    for y in samples {
        check_dim(model.dim(), y.dim())?;
        if y.coords() == x_star {
            continue;
        }
        let fy = model.f.value(y);
        if !fy.is_finite() {
            continue;
        }
        count += 1;
        let violation = f_star - fy - lambda_star * model.gamma.value(model.q.value(x_star, y));
        if violation > worst {
            worst = violation;
            worst_sample = Some(y);
        }
    }
    let tol = strictness_tolerance(f_star);
    let kind = if count == 0 || worst < -tol {
        TrapKind::Strong
    } else if worst <= tol {
        TrapKind::Weak
    } else {
        TrapKind::Refuted
    };
    Ok(TrapCertificate {
        point: Point::from(x_star.to_vec()),
        lambda_star,
        kind,
        samples: count,
        worst_violation: worst,
        worst_sample: worst_sample.cloned(),
        witness: (kind == TrapKind::Refuted).then(|| worst_sample.cloned()).flatten(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HabituationKind {
    /// The last `window` steps all have `q_step ≤ step_tol`.
    Habituating,
    /// Steps in the tail remain above `step_tol`.
    Oscillating,
    /// Too few steps to judge, or the run stopped on a step failure.
    Stalled,
}

impl HabituationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HabituationKind::Habituating => "habituating",
            HabituationKind::Oscillating => "oscillating",
            HabituationKind::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HabituationProfile {
    pub q_steps: Vec<f64>,
    pub kind: HabituationKind,
    /// Largest `q_step` over the last `window` steps.
    pub tail_max: f64,
    pub monotone: bool,
}

impl HabituationProfile {
    /// Classifies a bare `q_step` sequence.
    pub fn from_steps(q_steps: Vec<f64>, step_tol: f64, window: usize) -> Self {
        let window = window.max(1);
        let tail = &q_steps[q_steps.len().saturating_sub(window)..];
        let tail_max = tail.iter().copied().fold(0.0, f64::max);
        let kind = if q_steps.len() < window {
            HabituationKind::Stalled
        } else if tail_max <= step_tol {
            HabituationKind::Habituating
        } else {
            HabituationKind::Oscillating
        };
        HabituationProfile { q_steps, kind, tail_max, monotone: true }
    }

    /// `k,q_step` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,q_step\n");
        for (k, q) in self.q_steps.iter().enumerate() {
            let _ = writeln!(out, "{k},{q:e}");
        }
        out
    }
}

/// Habituation profile of a trace, using its own `step_tol` and tail window.
pub fn habituation_profile(trace: &Trace) -> HabituationProfile {
    let q_steps = trace.records.iter().map(|r| r.q_step).collect();
    let mut profile = HabituationProfile::from_steps(q_steps, trace.step_tol, trace.tail_window);
    if matches!(trace.status, Termination::StepFailure(_)) {
        profile.kind = HabituationKind::Stalled;
    }
    profile.monotone = trace.is_monotone();
    profile
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalTrapReport {
    /// Every recorded step was worthwhile at `λ_k(1−σ)`.
    pub path_ok: bool,
    /// Indices of steps that were not.
    pub failing_steps: Vec<usize>,
    pub certificate: TrapCertificate,
}

/// Checks the worthwhile path and certifies its endpoint at `lambda_star`.
pub fn variational_trap_report(
    trace: &Trace,
    model: &Model<'_>,
    lambda_star: f64,
    plan: &TrapSampling,
) -> Result<VariationalTrapReport> {
    let failing_steps: Vec<usize> = trace
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            !is_worthwhile_change(model, r.lambda * (1.0 - trace.sigma), &r.x_k, &r.x_next).worthwhile
        })
        .map(|(i, _)| i)
        .collect();
    let certificate = certify_trap(model, lambda_star, &trace.final_point, plan)?;
    Ok(VariationalTrapReport {
        path_ok: failing_steps.is_empty(),
        failing_steps,
        certificate,
    })
}
