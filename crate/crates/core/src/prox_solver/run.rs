use super::config::SolverConfig;
use super::step::{algorithm1_step, algorithm2_step, epsilon_inexact_step, exact_prox_step};
use super::trace::{IterationRecord, Termination, Trace};
use super::{Model, Regime, CERTIFICATION_SCOPE};
use crate::error::{check_dim, Error, Result};
use crate::objectives::critical_residual;
use crate::point::Point;

/// Iterates `regime` from `x0` until habituation (the last `tail_window`
/// steps all have `q_step ≤ step_tol` and the current residual is at most
/// `residual_tol`), `max_iters`, or a step failure.
pub fn run(regime: Regime, model: &Model<'_>, cfg: &SolverConfig, x0: &[f64]) -> Result<Trace> {
    cfg.validate()?;
    check_dim(model.dim(), x0.len())?;
    if !model.f.domain().contains(x0) {
        return Err(Error::Config(format!(
            "x0 = {} lies outside the domain box",
            Point::from(x0.to_vec())
        )));
    }
    let f0 = model.f.value(x0);
    if !f0.is_finite() {
        return Err(Error::OutsideDomain(x0.to_vec()));
    }

    let mut records = Vec::new();
    let mut x = x0.to_vec();
    let mut status = Termination::MaxIters;
    let mut lambdas = cfg.lambdas();
    for k in 0..cfg.max_iters {
        let lambda = lambdas.next().expect("λ sequences are infinite");
        let outcome = match regime {
            Regime::Exact => exact_prox_step(model, lambda, &x, cfg),
            Regime::EpsilonInexact => {
                epsilon_inexact_step(model, lambda, cfg.epsilon_schedule.at(k), &x, cfg)
            }
            Regime::Algorithm1 => algorithm1_step(model, lambda, &x, cfg),
            Regime::Algorithm2 => algorithm2_step(model, lambda, &x, cfg),
        };
        let mut record = match outcome {
            Ok(r) => r,
            Err(Error::StepFailure(msg)) => {
                status = Termination::StepFailure(format!("step {k}: {msg}"));
                break;
            }
            Err(e) => return Err(e),
        };
        record.k = k;
        x.copy_from_slice(record.x_next.coords());
        let residual = record.w_norm;
        records.push(record);
        if habituated(&records, cfg) && residual <= cfg.residual_tol {
            status = Termination::Converged;
            break;
        }
    }

    let final_residual = critical_residual(model.f, &x)?;
    Ok(Trace {
        regime,
        records,
        status,
        f0,
        x0: Point::from(x0.to_vec()),
        final_value: model.f.value(&x),
        final_point: Point::from(x),
        final_residual,
        sigma: match regime {
            Regime::Algorithm1 | Regime::Algorithm2 => cfg.sigma,
            Regime::Exact | Regime::EpsilonInexact => 0.0,
        },
        b: cfg.b,
        lambda_lo: cfg.lambda_lo,
        step_tol: cfg.step_tol,
        residual_tol: cfg.residual_tol,
        tail_window: cfg.tail_window,
        scope: CERTIFICATION_SCOPE,
    })
}

fn habituated(records: &[IterationRecord], cfg: &SolverConfig) -> bool {
    records.len() >= cfg.tail_window
        && records[records.len() - cfg.tail_window..]
            .iter()
            .all(|r| r.q_step <= cfg.step_tol)
}
