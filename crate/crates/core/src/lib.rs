//! Generalized inexact proximal point methods over quasi-metric spaces.
//!
//! The crate is organised around the pieces of a proximal step
//! `y ↦ f(y) + λ·Γ[q(x, y)]`:
//!
//! * [`quasi_metric`]: asymmetric costs to change `q(x, y)`.
//! * [`resistance`]: the curved perturbation `Γ` and its curvature machinery.
//! * [`objectives`]: payoffs `f` with limiting-subgradient element oracles.
//! * [`prox_solver`]: exact, ε-inexact and the two certified inexact regimes.
//! * [`traps`]: worthwhile changes, variational trap certificates and
//!   habituation diagnostics.

pub mod error;
pub mod objectives;
pub mod point;
pub mod prox_solver;
pub mod quasi_metric;
pub mod resistance;
pub mod sampling;
pub mod traps;

pub use error::{Error, Result};
pub use point::Point;

/// Additive slack used by every inequality check: `1e-12·(1 + |f|)`.
pub fn slack(reference_value: f64) -> f64 {
    1e-12 * (1.0 + reference_value.abs())
}
