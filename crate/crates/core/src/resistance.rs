//! Relative resistance to change `Γ` and its curvature rate.
//!
//! `Γ` must be twice differentiable with `Γ[0] = Γ'[0] = 0` and
//! `Γ', Γ'' > 0` on `(0, ∞)`, and its generalized curvature rate
//! `ρ_Γ(q, r) = Γ'[q/r] / (Γ[q]/q)` must stay bounded on `(0, q̄]`.

use std::fmt::Debug;

use crate::error::{Error, Result};

/// A perturbation curve `Γ` with its first two derivatives.
///
/// Methods assume `q ≥ 0`; the checked entry points are [`gamma`],
/// [`gamma_prime`] and [`gamma_second`].
pub trait ResistanceCurve: Debug + Send + Sync {
    fn value(&self, q: f64) -> f64;
    fn first(&self, q: f64) -> f64;
    fn second(&self, q: f64) -> f64;
}

/// `Γ[q] = q^α` with `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResistance {
    alpha: f64,
}

impl PowerResistance {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::invalid(format!("alpha must exceed 1 (got {alpha})")));
        }
        Ok(PowerResistance { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Closed form of the curvature rate, `α·r^{1−α}`, independent of `q`.
    pub fn analytic_rate(&self, r: f64) -> f64 {
        self.alpha * r.powf(1.0 - self.alpha)
    }
}

impl ResistanceCurve for PowerResistance {
    fn value(&self, q: f64) -> f64 {
        q.powf(self.alpha)
    }

    fn first(&self, q: f64) -> f64 {
        if q == 0.0 {
            0.0
        } else {
            self.alpha * q.powf(self.alpha - 1.0)
        }
    }

    fn second(&self, q: f64) -> f64 {
        self.alpha * (self.alpha - 1.0) * q.powf(self.alpha - 2.0)
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_nan() || q < 0.0 {
        Err(Error::invalid(format!("resistance argument must be nonnegative (got {q})")))
    } else {
        Ok(())
    }
}

pub fn gamma(curve: &dyn ResistanceCurve, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(curve.value(q))
}

pub fn gamma_prime(curve: &dyn ResistanceCurve, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(curve.first(q))
}

/// `Γ''[q]`; errors where the second derivative is not finite (e.g. `q = 0`
/// for `α < 2`).
pub fn gamma_second(curve: &dyn ResistanceCurve, q: f64) -> Result<f64> {
    check_q(q)?;
    let v = curve.second(q);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("second derivative is not finite at q = {q}")))
    }
}

/// `ρ_Γ(q, r) = Γ'[q/r] / (Γ[q]/q)`.
pub fn curvature_rate(curve: &dyn ResistanceCurve, q: f64, r: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::invalid(format!("curvature rate needs q > 0 (got {q})")));
    }
    check_r(r)?;
    Ok(curve.first(q / r) * q / curve.value(q))
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("r must lie in (0, 1) (got {r})")))
    }
}

/// Grid size used when none is given.
pub const DEFAULT_CURVATURE_GRID: usize = 512;

/// Lower end of the curvature grid, relative to `q̄`.
const GRID_FLOOR: f64 = 1e-6;

/// `ρ̄_Γ(r) ≥ ρ_Γ(q, r)` for all `q ∈ (0, q̄]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBound {
    pub r: f64,
    pub q_bar: f64,
    pub rho_bar: f64,
}

/// Log-spaced grid on `[1e-6·q̄, q̄]`, endpoints included.
pub fn curvature_grid(q_bar: f64, grid_size: usize) -> Vec<f64> {
    let lo = (GRID_FLOOR * q_bar).ln();
    let hi = q_bar.ln();
    let last = (grid_size - 1) as f64;
    (0..grid_size)
        .map(|i| {
            if i + 1 == grid_size {
                q_bar
            } else {
                (lo + (hi - lo) * i as f64 / last).exp()
            }
        })
        .collect()
}

/// Supremum of the curvature rate over [`curvature_grid`].
pub fn curvature_bound(
    curve: &dyn ResistanceCurve,
    r: f64,
    q_bar: f64,
    grid_size: usize,
) -> Result<CurvatureBound> {
    if grid_size < 2 {
        return Err(Error::invalid("curvature grid needs at least 2 points"));
    }
    if !(q_bar > 0.0 && q_bar.is_finite()) {
        return Err(Error::invalid(format!("q_bar must be positive (got {q_bar})")));
    }
    check_r(r)?;
    let mut rho_bar = f64::NEG_INFINITY;
    for q in curvature_grid(q_bar, grid_size) {
        let rho = curvature_rate(curve, q, r)?;
        if rho.is_nan() {
            rho_bar = f64::INFINITY;
        } else {
            rho_bar = rho_bar.max(rho);
        }
    }
    Ok(CurvatureBound { r, q_bar, rho_bar })
}

/// Outcome of checking the standing hypotheses on `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub value_at_zero: f64,
    pub slope_at_zero: f64,
    pub slope_positive: bool,
    pub curvature_positive: bool,
    pub rho_bar: f64,
    pub violations: Vec<String>,
}

impl HypothesisReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Γ[0] = Γ'[0] = 0`, positivity of `Γ'` and `Γ''` on the curvature
/// grid, and finiteness of `ρ̄_Γ(r)`.
pub fn validate_hypotheses(curve: &dyn ResistanceCurve, q_bar: f64, r: f64) -> HypothesisReport {
    let mut violations = Vec::new();
    let value_at_zero = curve.value(0.0);
    let slope_at_zero = curve.first(0.0);
    if value_at_zero != 0.0 {
        violations.push(format!("Γ[0] = {value_at_zero}, expected 0"));
    }
    if slope_at_zero != 0.0 {
        violations.push(format!("Γ'[0] = {slope_at_zero}, expected 0"));
    }

    let grid = if q_bar > 0.0 && q_bar.is_finite() {
        // Past q̄ as well: Γ', Γ'' > 0 is required on all of (0, ∞); probe to 10·q̄.
        let mut g = curvature_grid(q_bar, DEFAULT_CURVATURE_GRID);
        g.extend(curvature_grid(10.0 * q_bar, 64).into_iter().filter(|q| *q > q_bar));
        g
    } else {
        violations.push(format!("q_bar = {q_bar} must be positive"));
        Vec::new()
    };
    let slope_positive = grid.iter().all(|&q| curve.first(q) > 0.0);
    let curvature_positive = grid.iter().all(|&q| curve.second(q) > 0.0);
    if !slope_positive {
        violations.push("Γ' is not positive on the grid".to_owned());
    }
    if !curvature_positive {
        violations.push("Γ'' is not positive on the grid".to_owned());
    }

    let rho_bar = match curvature_bound(curve, r, q_bar, DEFAULT_CURVATURE_GRID) {
        Ok(b) => b.rho_bar,
        Err(e) => {
            violations.push(e.to_string());
            f64::NAN
        }
    };
    if !rho_bar.is_finite() && !rho_bar.is_nan() {
        violations.push("curvature rate is unbounded on (0, q_bar]".to_owned());
    }

    HypothesisReport {
        value_at_zero,
        slope_at_zero,
        slope_positive,
        curvature_positive,
        rho_bar,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Linear;

    impl ResistanceCurve for Linear {
        fn value(&self, q: f64) -> f64 {
            q
        }
        fn first(&self, _q: f64) -> f64 {
            1.0
        }
        fn second(&self, _q: f64) -> f64 {
            0.0
        }
    }

    /// `cosh(q) − 1`: satisfies the hypotheses without being a power.
    #[derive(Debug)]
    struct Cosh;

    impl ResistanceCurve for Cosh {
        fn value(&self, q: f64) -> f64 {
            q.cosh() - 1.0
        }
        fn first(&self, q: f64) -> f64 {
            q.sinh()
        }
        fn second(&self, q: f64) -> f64 {
            q.cosh()
        }
    }

    #[test]
    fn power_values_and_derivatives() {
        let g2 = PowerResistance::new(2.0).unwrap();
        assert_eq!(gamma(&g2, 3.0).unwrap(), 9.0);
        assert_eq!(gamma(&g2, 0.0).unwrap(), 0.0);
        assert_eq!(gamma_prime(&g2, 3.0).unwrap(), 6.0);
        assert_eq!(gamma_prime(&g2, 0.0).unwrap(), 0.0);
        assert_eq!(gamma(&PowerResistance::new(1.5).unwrap(), 4.0).unwrap(), 8.0);
        assert_eq!(gamma_second(&PowerResistance::new(3.0).unwrap(), 2.0).unwrap(), 12.0);
    }

    #[test]
    fn negative_arguments_are_rejected() {
        let g = PowerResistance::new(2.0).unwrap();
        assert!(gamma(&g, -1.0).is_err());
        assert!(gamma_prime(&g, -1e-300).is_err());
        assert!(gamma(&g, f64::NAN).is_err());
        assert!(gamma_second(&PowerResistance::new(1.5).unwrap(), 0.0).is_err());
    }

    #[test]
    fn alpha_at_most_one_is_rejected() {
        assert!(PowerResistance::new(1.0).is_err());
        assert!(PowerResistance::new(0.5).is_err());
        assert!(PowerResistance::new(f64::INFINITY).is_err());
    }

    #[test]
    fn curvature_rate_examples() {
        let g2 = PowerResistance::new(2.0).unwrap();
        let g3 = PowerResistance::new(3.0).unwrap();
        for q in [1e-3, 0.2, 1.0] {
            assert!((curvature_rate(&g2, q, 0.5).unwrap() - 4.0).abs() < 1e-12);
            assert!((curvature_rate(&g3, q, 0.5).unwrap() - 12.0).abs() < 1e-12);
        }
        // r → 1 recovers the elasticity α.
        let near_one = curvature_rate(&g2, 1.0, 1.0 - 1e-12).unwrap();
        assert!((near_one - 2.0).abs() < 1e-9);
        assert!(curvature_rate(&g2, 0.0, 0.5).is_err());
        assert!(curvature_rate(&g2, 1.0, 1.0).is_err());
        assert!(curvature_rate(&g2, 1.0, 0.0).is_err());
    }

    #[test]
    fn curvature_bound_matches_closed_form() {
        let b = curvature_bound(&PowerResistance::new(2.0).unwrap(), 0.5, 1.0, 512).unwrap();
        assert!((b.rho_bar - 4.0).abs() < 1e-12);
        let b = curvature_bound(&PowerResistance::new(1.5).unwrap(), 0.25, 1.0, 512).unwrap();
        assert!((b.rho_bar - 3.0).abs() < 1e-12);
        assert!(curvature_bound(&PowerResistance::new(2.0).unwrap(), 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn grid_spans_requested_range() {
        let g = curvature_grid(2.0, 512);
        assert_eq!(g.len(), 512);
        assert!((g[0] - 2e-6).abs() < 1e-18);
        assert_eq!(g[511], 2.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hypotheses_hold_for_power_and_cosh() {
        assert!(validate_hypotheses(&PowerResistance::new(2.0).unwrap(), 1.0, 0.5).passes());
        let report = validate_hypotheses(&PowerResistance::new(5.0).unwrap(), 1.0, 0.9);
        assert!(report.passes());
        let expected = 5.0 * 0.9f64.powi(-4);
        assert!((report.rho_bar - expected).abs() < 1e-12 * expected);
        let report = validate_hypotheses(&Cosh, 1.0, 0.5);
        assert!(report.passes(), "{:?}", report.violations);
    }

    #[test]
    fn linear_resistance_is_flagged() {
        let report = validate_hypotheses(&Linear, 1.0, 0.5);
        assert!(!report.passes());
        assert!(!report.curvature_positive);
        assert_eq!(report.slope_at_zero, 1.0);
    }
}
