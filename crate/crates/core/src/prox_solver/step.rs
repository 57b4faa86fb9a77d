//! Single proximal steps for each regime.
//!
//! Each step solves the subproblem, then walks the refinement path from the
//! grid minimizer towards the refined argmin and accepts the first candidate
//! satisfying the regime's conditions. The exact regime only considers the
//! refined argmin. When nothing passes, refinement continues with a doubled
//! sweep budget up to `retry_budget` times before reporting a step failure.

use super::config::SolverConfig;
use super::subproblem::{prox_subproblem_min, SubproblemSolution};
use super::trace::IterationRecord;
use super::{Model, Regime};
use crate::error::{Error, Result};
use crate::objectives::subgradient_element;
use crate::point::Point;
use crate::quasi_metric::subgradient_second_norm;
use crate::slack;
use crate::traps::is_worthwhile_change;

/// Exact proximal step: the refined argmin of the subproblem.
pub fn exact_prox_step(
    model: &Model<'_>,
    lambda: f64,
    x_k: &[f64],
    cfg: &SolverConfig,
) -> Result<IterationRecord> {
    step(Regime::Exact, model, lambda, None, x_k, cfg)
}

/// Global ε-inexact step: `P(x_{k+1}) ≤ P(y) + ε_k` for every grid `y`,
/// with `f` not increasing.
pub fn epsilon_inexact_step(
    model: &Model<'_>,
    lambda: f64,
    epsilon: f64,
    x_k: &[f64],
    cfg: &SolverConfig,
) -> Result<IterationRecord> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be finite and >= 0 (got {epsilon})")));
    }
    step(Regime::EpsilonInexact, model, lambda, Some(epsilon), x_k, cfg)
}

/// Sufficient descent plus the stopping rule.
pub fn algorithm1_step(
    model: &Model<'_>,
    lambda: f64,
    x_k: &[f64],
    cfg: &SolverConfig,
) -> Result<IterationRecord> {
    step(Regime::Algorithm1, model, lambda, None, x_k, cfg)
}

/// Global worthwhile-to-change condition over the box grid plus the
/// stopping rule.
pub fn algorithm2_step(
    model: &Model<'_>,
    lambda: f64,
    x_k: &[f64],
    cfg: &SolverConfig,
) -> Result<IterationRecord> {
    step(Regime::Algorithm2, model, lambda, None, x_k, cfg)
}

struct Checker<'m, 'a> {
    regime: Regime,
    model: &'m Model<'a>,
    lambda: f64,
    epsilon: Option<f64>,
    x_k: &'m [f64],
    f_k: f64,
    cfg: &'m SolverConfig,
}

impl Checker<'_, '_> {
    /// Effective σ: the exact and ε-inexact regimes demand full descent.
    fn sigma(&self) -> f64 {
        match self.regime {
            Regime::Algorithm1 | Regime::Algorithm2 => self.cfg.sigma,
            Regime::Exact | Regime::EpsilonInexact => 0.0,
        }
    }

    fn evaluate(&self, candidate: &Point, p_value: f64, p_min: f64) -> Result<(IterationRecord, bool)> {
        let model = self.model;
        let x_next = candidate.coords();
        let q_step = model.q.value(self.x_k, x_next);
        let gamma_q = model.gamma.value(q_step);
        let gamma_prime_q = model.gamma.first(q_step);
        let w = subgradient_element(model.f, x_next)?;
        let w_norm = w.norm();
        let mut buf = vec![0.0; x_next.len()];
        let v_norm = subgradient_second_norm(model.q, self.x_k, x_next, &mut buf);
        let tol = slack(self.f_k);

        let descent = is_worthwhile_change(model, self.lambda * (1.0 - self.sigma()), self.x_k, x_next);
        let descent_ok = descent.worthwhile;
        let stop_rule_ok = w_norm <= self.cfg.b * gamma_prime_q * v_norm + tol;
        let global_slack = p_value - p_min;

        let stay = q_step == 0.0;
        let accepted = if stay {
            w_norm <= self.cfg.residual_tol
        } else {
            match self.regime {
                Regime::Exact => descent_ok,
                Regime::EpsilonInexact => {
                    descent_ok && global_slack <= self.epsilon.unwrap_or(0.0) + tol
                }
                Regime::Algorithm1 => descent_ok && stop_rule_ok,
                Regime::Algorithm2 => {
                    descent_ok
                        && stop_rule_ok
                        && global_slack <= self.lambda * self.cfg.sigma * gamma_q + tol
                }
            }
        };
        let record = IterationRecord {
            k: 0,
            lambda: self.lambda,
            epsilon: self.epsilon,
            x_k: Point::from(self.x_k.to_vec()),
            x_next: candidate.clone(),
            f_k: self.f_k,
            f_next: model.f.value(x_next),
            q_step,
            gamma_q,
            gamma_prime_q,
            w_norm,
            v_norm,
            descent_ok,
            stop_rule_ok,
            global_slack: match self.regime {
                Regime::EpsilonInexact | Regime::Algorithm2 => Some(global_slack),
                Regime::Exact | Regime::Algorithm1 => None,
            },
        };
        Ok((record, accepted))
    }

    /// First acceptable candidate among `path[from..]`, or the last record checked.
    fn scan(
        &self,
        sol: &SubproblemSolution,
        from: usize,
    ) -> Result<(Option<IterationRecord>, Option<IterationRecord>)> {
        let p_min = sol.grid_min.min(sol.value);
        let candidates: Vec<&(Point, f64)> = match self.regime {
            Regime::Exact => sol.path.last().into_iter().collect(),
            _ => sol.path[from..].iter().collect(),
        };
        let mut last = None;
        for (candidate, p_value) in candidates {
            let (record, ok) = self.evaluate(candidate, *p_value, p_min)?;
            if ok {
                return Ok((Some(record), None));
            }
            last = Some(record);
        }
        Ok((None, last))
    }
}

fn step(
    regime: Regime,
    model: &Model<'_>,
    lambda: f64,
    epsilon: Option<f64>,
    x_k: &[f64],
    cfg: &SolverConfig,
) -> Result<IterationRecord> {
    cfg.validate()?;
    let f_k = model.f.value(x_k);
    if !f_k.is_finite() {
        return Err(Error::OutsideDomain(x_k.to_vec()));
    }
    let checker = Checker { regime, model, lambda, epsilon, x_k, f_k, cfg };
    let mut sol = prox_subproblem_min(model, lambda, x_k, &cfg.inner)?;
    let mut from = 0;
    let mut last = None;
    for attempt in 0..=cfg.inner.retry_budget {
        if attempt > 0 {
            from = sol.path.len();
            sol.refine_further(model, lambda, x_k, &cfg.inner, cfg.inner.refine_sweeps << attempt);
        }
        let (accepted, rejected) = checker.scan(&sol, from)?;
        if let Some(record) = accepted {
            return Ok(record);
        }
        last = rejected.or(last);
    }
    Err(Error::StepFailure(match last {
        Some(r) => format!(
            "{regime} rejected every candidate from x = {}: last q_step = {:e}, \
             descent_ok = {}, stop_rule_ok = {}, w_norm = {:e}, global_slack = {:?}",
            r.x_k, r.q_step, r.descent_ok, r.stop_rule_ok, r.w_norm, r.global_slack
        ),
        None => format!("{regime} found no candidate from x = {}", Point::from(x_k.to_vec())),
    }))
}
