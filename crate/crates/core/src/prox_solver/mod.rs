//! Proximal stepping regimes and run orchestration.
//!
//! Every step works on the proximal payoff `P_λ(x_k, y) = f(y) + λ·Γ[q(x_k, y)]`.
//! Candidates come from the inner solver in [`subproblem`]; each regime then
//! certifies its own acceptance conditions:
//!
//! | regime            | acceptance                                                        |
//! |-------------------|-------------------------------------------------------------------|
//! | exact             | refined argmin of `P`                                             |
//! | ε-inexact         | `P(x_{k+1}) ≤ inf P + ε_k` and `f` does not increase              |
//! | algorithm 1       | `f(x_k) − f(x_{k+1}) ≥ λ_k(1−σ)Γ[q]` and `‖w‖ ≤ b·Γ'[q]·‖v‖`      |
//! | algorithm 2       | `P(x_{k+1}) ≤ P(y) + λ_kσΓ[q]` for all grid `y`, and the same rule |
//!
//! The "for all y" quantifiers are certified over the domain-box grid only;
//! traces carry the label [`CERTIFICATION_SCOPE`].

mod config;
mod run;
mod step;
pub mod subproblem;
mod trace;

pub use config::{default_grid, EpsilonSchedule, InnerSettings, LambdaSchedule, SolverConfig};
pub use run::run;
pub use step::{algorithm1_step, algorithm2_step, epsilon_inexact_step, exact_prox_step};
pub use subproblem::{prox_subproblem_min, SubproblemSolution};
pub use trace::{read_trace_endpoint, IterationRecord, Termination, Trace, TraceEndpoint};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::quasi_metric::QuasiDistance;
use crate::resistance::ResistanceCurve;

/// Label attached to traces: global conditions hold over the box grid.
pub const CERTIFICATION_SCOPE: &str = "box-grid";

/// The three ingredients of a proximal payoff.
#[derive(Clone, Copy)]
pub struct Model<'a> {
    pub f: &'a dyn Objective,
    pub q: &'a dyn QuasiDistance,
    pub gamma: &'a dyn ResistanceCurve,
}

impl<'a> Model<'a> {
    pub fn new(
        f: &'a dyn Objective,
        q: &'a dyn QuasiDistance,
        gamma: &'a dyn ResistanceCurve,
    ) -> Result<Self> {
        if let Some(n) = q.dim() {
            if n != f.dim() {
                return Err(Error::DimensionMismatch { expected: f.dim(), got: n });
            }
        }
        Ok(Model { f, q, gamma })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `P_λ(anchor, y) = f(y) + λ·Γ[q(anchor, y)]`.
    pub fn payoff(&self, lambda: f64, anchor: &[f64], y: &[f64]) -> f64 {
        self.f.value(y) + lambda * self.gamma.value(self.q.value(anchor, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Exact,
    EpsilonInexact,
    Algorithm1,
    Algorithm2,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Exact,
        Regime::EpsilonInexact,
        Regime::Algorithm1,
        Regime::Algorithm2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Exact => "exact",
            Regime::EpsilonInexact => "eps_inexact",
            Regime::Algorithm1 => "algorithm1",
            Regime::Algorithm2 => "algorithm2",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown regime {s:?}; expected one of exact, eps_inexact, algorithm1, algorithm2"
                ))
            })
    }
}
