use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Rule producing `λ_k ∈ [λ̄, λ̃]`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSchedule {
    Constant(f64),
    /// Cycles through the listed values.
    Periodic(Vec<f64>),
    /// Uniform draws in `[λ̄, λ̃]`.
    Random { seed: u64 },
}

/// Rule producing the error terms `ε_k ≥ 0` of the ε-inexact regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonSchedule {
    Zero,
    Constant(f64),
    /// `ε₀·ratioᵏ`.
    Geometric { initial: f64, ratio: f64 },
    /// `ε₀/(k+1)²`.
    Summable { initial: f64 },
}

impl EpsilonSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            EpsilonSchedule::Zero => 0.0,
            EpsilonSchedule::Constant(e) => e,
            EpsilonSchedule::Geometric { initial, ratio } => initial * ratio.powi(k as i32),
            EpsilonSchedule::Summable { initial } => initial / ((k + 1) as f64).powi(2),
        }
    }
}

/// Inner subproblem solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSettings {
    /// Grid points per axis for the box scan; `None` uses [`default_grid`].
    pub grid: Option<usize>,
    /// Maximum refinement sweeps (coordinate searches plus a pattern move).
    pub refine_sweeps: usize,
    /// Extra refinement rounds before a step is declared a failure.
    pub retry_budget: usize,
}

impl Default for InnerSettings {
    fn default() -> Self {
        InnerSettings {
            grid: None,
            refine_sweeps: 50,
            retry_budget: 2,
        }
    }
}

/// Grid points per axis: 4001 in 1D, 201 in 2D, 41 in 3D, then about 2·10⁵
/// points in total.
pub fn default_grid(dim: usize) -> usize {
    match dim {
        0 | 1 => 4001,
        2 => 201,
        3 => 41,
        n => ((2e5f64).powf(1.0 / n as f64).floor() as usize).max(3),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// λ̄
    pub lambda_lo: f64,
    /// λ̃
    pub lambda_hi: f64,
    pub lambda_schedule: LambdaSchedule,
    pub sigma: f64,
    pub b: f64,
    pub epsilon_schedule: EpsilonSchedule,
    pub max_iters: usize,
    /// Habituation threshold on `q(x_k, x_{k+1})`.
    pub step_tol: f64,
    pub residual_tol: f64,
    /// Number of trailing steps that must all fall below `step_tol`.
    pub tail_window: usize,
    pub inner: InnerSettings,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda_lo: 1.0,
            lambda_hi: 1.0,
            lambda_schedule: LambdaSchedule::Constant(1.0),
            sigma: 0.0,
            b: 10.0,
            epsilon_schedule: EpsilonSchedule::Zero,
            max_iters: 10_000,
            step_tol: 1e-6,
            residual_tol: 1e-6,
            tail_window: 10,
            inner: InnerSettings::default(),
        }
    }
}

impl SolverConfig {
    /// Constant `λ` with `λ̄ = λ̃ = λ`.
    pub fn with_constant_lambda(mut self, lambda: f64) -> Self {
        self.lambda_lo = lambda;
        self.lambda_hi = lambda;
        self.lambda_schedule = LambdaSchedule::Constant(lambda);
        self
    }

    /// Every violated invariant, one message each.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (lo, hi) = (self.lambda_lo, self.lambda_hi);
        if !(lo > 0.0 && lo.is_finite()) {
            out.push(format!("lambda_lo must be positive and finite (got {lo})"));
        }
        if !(hi.is_finite() && hi >= lo) {
            out.push(format!("lambda_hi must be finite and >= lambda_lo (got {hi})"));
        }
        let in_range = |v: f64| v >= lo && v <= hi;
        match &self.lambda_schedule {
            LambdaSchedule::Constant(v) if !in_range(*v) => {
                out.push(format!("constant lambda {v} lies outside [{lo}, {hi}]"))
            }
            LambdaSchedule::Periodic(vs) if vs.is_empty() => {
                out.push("periodic lambda schedule needs at least one value".to_owned())
            }
            LambdaSchedule::Periodic(vs) => {
                if let Some(v) = vs.iter().find(|v| !in_range(**v)) {
                    out.push(format!("periodic lambda {v} lies outside [{lo}, {hi}]"));
                }
            }
            _ => {}
        }
        if !(self.sigma >= 0.0 && self.sigma < 1.0) {
            out.push(format!("sigma must lie in [0, 1) (got {})", self.sigma));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            out.push(format!("b must be positive (got {})", self.b));
        }
        let eps_ok = match self.epsilon_schedule {
            EpsilonSchedule::Zero => true,
            EpsilonSchedule::Constant(e) | EpsilonSchedule::Summable { initial: e } => e >= 0.0 && e.is_finite(),
            EpsilonSchedule::Geometric { initial, ratio } => {
                initial >= 0.0 && initial.is_finite() && ratio >= 0.0 && ratio <= 1.0
            }
        };
        if !eps_ok {
            out.push("epsilon schedule needs a finite epsilon0 >= 0 and a ratio in [0, 1]".to_owned());
        }
        if self.max_iters == 0 {
            out.push("max_iters must be at least 1".to_owned());
        }
        if !(self.step_tol >= 0.0) || !(self.residual_tol >= 0.0) {
            out.push("step_tol and residual_tol must be nonnegative".to_owned());
        }
        if self.tail_window == 0 {
            out.push("tail_window must be at least 1".to_owned());
        }
        if self.inner.refine_sweeps == 0 {
            out.push("refine_sweeps must be at least 1".to_owned());
        }
        if matches!(self.inner.grid, Some(g) if g < 2) {
            out.push("grid needs at least 2 points per axis".to_owned());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// The `λ_k` sequence, deterministic for a given schedule.
    pub fn lambdas(&self) -> LambdaSequence {
        let rng = match self.lambda_schedule {
            LambdaSchedule::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        LambdaSequence {
            schedule: self.lambda_schedule.clone(),
            lo: self.lambda_lo,
            hi: self.lambda_hi,
            rng,
            k: 0,
        }
    }
}

pub struct LambdaSequence {
    schedule: LambdaSchedule,
    lo: f64,
    hi: f64,
    rng: Option<ChaCha8Rng>,
    k: usize,
}

impl Iterator for LambdaSequence {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let k = self.k;
        self.k += 1;
        Some(match &self.schedule {
            LambdaSchedule::Constant(v) => *v,
            LambdaSchedule::Periodic(vs) => vs[k % vs.len()],
            LambdaSchedule::Random { .. } => {
                let rng = self.rng.as_mut().expect("random schedule carries an rng");
                if self.lo == self.hi {
                    self.lo
                } else {
                    rng.random_range(self.lo..=self.hi)
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let mut cfg = SolverConfig::default();
        cfg.lambda_lo = 0.5;
        cfg.lambda_schedule = LambdaSchedule::Periodic(vec![0.5, 1.0]);
        assert_eq!(cfg.lambdas().take(4).collect::<Vec<_>>(), vec![0.5, 1.0, 0.5, 1.0]);

        cfg.lambda_schedule = LambdaSchedule::Random { seed: 4 };
        let a: Vec<f64> = cfg.lambdas().take(50).collect();
        assert_eq!(a, cfg.lambdas().take(50).collect::<Vec<_>>());
        assert!(a.iter().all(|l| (0.5..=1.0).contains(l)));

        assert_eq!(EpsilonSchedule::Geometric { initial: 1.0, ratio: 0.5 }.at(3), 0.125);
        assert_eq!(EpsilonSchedule::Summable { initial: 1.0 }.at(1), 0.25);
    }

    #[test]
    fn validation_collects_every_problem() {
        let cfg = SolverConfig {
            lambda_lo: 2.0,
            lambda_hi: 1.0,
            sigma: 1.0,
            b: 0.0,
            ..SolverConfig::default()
        };
        let problems = cfg.problems();
        assert!(problems.len() >= 4, "{problems:?}");
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn default_grids() {
        assert_eq!(default_grid(1), 4001);
        assert_eq!(default_grid(2), 201);
        assert_eq!(default_grid(3), 41);
        assert!(default_grid(5).pow(5) <= 200_000);
    }
}
