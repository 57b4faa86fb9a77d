//! Quasi-distances: asymmetric costs to be able to change.
//!
//! A quasi-distance `q` on `R^n` satisfies `q(x, y) ≥ 0`, `q(x, y) = 0` iff
//! `x = y`, and the triangle inequality `q(x, z) ≤ q(x, y) + q(y, z)`. It need
//! not be symmetric: hiring a worker and firing one cost different amounts.

use std::fmt::Debug;

use crate::error::{check_dim, Error, Result};
use crate::point::{dist2, norm2, Point};

/// A quasi-distance on `R^n`.
///
/// The trait methods assume matched dimensions; the free functions
/// [`evaluate`] and [`subgradient_second`] check them.
pub trait QuasiDistance: Debug + Send + Sync {
    /// Fixed dimension, or `None` when the distance works in any dimension.
    fn dim(&self) -> Option<usize>;

    fn value(&self, x: &[f64], y: &[f64]) -> f64;

    /// Writes one element of `∂q(x, ·)(y)` into `out`.
    fn subgradient_second_into(&self, x: &[f64], y: &[f64], out: &mut [f64]);

    /// Location of the kink of `y_j ↦ q(x, y)` along coordinate `j`, if any.
    fn coordinate_kink(&self, x: &[f64], j: usize) -> Option<f64> {
        Some(x[j])
    }

    /// Short tag used in configs and reports.
    fn kind(&self) -> &'static str;
}

/// `q(x, y) = Σ_j h₊ʲ (yʲ − xʲ)₊ + h₋ʲ (xʲ − yʲ)₊`: hiring costs `h₊` per unit
/// increase and firing costs `h₋` per unit decrease, with zero conservation
/// costs.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetricWeightedL1 {
    h_plus: Vec<f64>,
    h_minus: Vec<f64>,
}

impl AsymmetricWeightedL1 {
    pub fn new(h_plus: Vec<f64>, h_minus: Vec<f64>) -> Result<Self> {
        if h_plus.is_empty() {
            return Err(Error::invalid("weights must be nonempty"));
        }
        check_dim(h_plus.len(), h_minus.len())?;
        for (name, weights) in [("h_plus", &h_plus), ("h_minus", &h_minus)] {
            if let Some((j, w)) = weights
                .iter()
                .enumerate()
                .find(|(_, w)| !(w.is_finite() && **w > 0.0))
            {
                return Err(Error::invalid(format!(
                    "{name}[{j}] = {w} must be a finite positive weight"
                )));
            }
        }
        Ok(AsymmetricWeightedL1 { h_plus, h_minus })
    }

    /// Symmetric weights: a weighted ℓ1 distance.
    pub fn symmetric(weights: Vec<f64>) -> Result<Self> {
        AsymmetricWeightedL1::new(weights.clone(), weights)
    }

    pub fn h_plus(&self) -> &[f64] {
        &self.h_plus
    }

    pub fn h_minus(&self) -> &[f64] {
        &self.h_minus
    }

    pub fn equivalence_bounds(&self) -> NormEquivalenceBounds {
        equivalence_bounds(self)
    }
}

impl QuasiDistance for AsymmetricWeightedL1 {
    fn dim(&self) -> Option<usize> {
        Some(self.h_plus.len())
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut total = 0.0;
        for j in 0..x.len() {
            let delta = y[j] - x[j];
            if delta > 0.0 {
                total += self.h_plus[j] * delta;
            } else if delta < 0.0 {
                total -= self.h_minus[j] * delta;
            }
        }
        total
    }

    fn subgradient_second_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for j in 0..x.len() {
            out[j] = if y[j] > x[j] {
                self.h_plus[j]
            } else if y[j] < x[j] {
                -self.h_minus[j]
            } else {
                // 0 ∈ [-h₋, h₊]: the minimal-norm selection.
                0.0
            };
        }
    }

    fn kind(&self) -> &'static str {
        "asym_l1"
    }
}

/// `q(x, y) = s·‖x − y‖₂`, a genuine (symmetric) distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEuclidean {
    scale: f64,
}

impl ScaledEuclidean {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid(format!("scale {scale} must be a finite positive number")));
        }
        Ok(ScaledEuclidean { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn equivalence_bounds(&self) -> NormEquivalenceBounds {
        NormEquivalenceBounds {
            beta1: self.scale,
            beta2: self.scale,
        }
    }
}

impl Default for ScaledEuclidean {
    fn default() -> Self {
        ScaledEuclidean { scale: 1.0 }
    }
}

impl QuasiDistance for ScaledEuclidean {
    fn dim(&self) -> Option<usize> {
        None
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.scale * dist2(x, y)
    }

    fn subgradient_second_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let d = dist2(x, y);
        for j in 0..x.len() {
            out[j] = if d > 0.0 { self.scale * (y[j] - x[j]) / d } else { 0.0 };
        }
    }

    fn coordinate_kink(&self, _x: &[f64], _j: usize) -> Option<f64> {
        None
    }

    fn kind(&self) -> &'static str {
        "euclidean"
    }
}

fn check_pair(q: &dyn QuasiDistance, x: &[f64], y: &[f64]) -> Result<()> {
    check_dim(x.len(), y.len())?;
    if let Some(n) = q.dim() {
        check_dim(n, x.len())?;
    }
    Ok(())
}

/// `q(x, y)`, checking dimensions.
pub fn evaluate(q: &dyn QuasiDistance, x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(q, x, y)?;
    Ok(q.value(x, y))
}

/// One element `v ∈ ∂q(x, ·)(y)`; coordinates with `yʲ = xʲ` select 0.
pub fn subgradient_second(q: &dyn QuasiDistance, x: &[f64], y: &[f64]) -> Result<Point> {
    check_pair(q, x, y)?;
    let mut out = vec![0.0; x.len()];
    q.subgradient_second_into(x, y, &mut out);
    Ok(Point::from(out))
}

/// Sampled evidence for the quasi-distance axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub samples: usize,
    /// `max(q(x,z) − q(x,y) − q(y,z), 0)` over the sampled triples.
    pub max_triangle_violation: f64,
    pub triangle_violations: usize,
    /// `q(x, x) = 0` exactly for every sampled point.
    pub identity_ok: bool,
    /// `q(x, y) > 0` for every sampled pair with `x ≠ y`.
    pub separation_ok: bool,
    pub nonnegative_ok: bool,
    /// Largest `|q(x,y) − q(y,x)|` seen.
    pub max_asymmetry: f64,
}

impl AxiomReport {
    pub const TRIANGLE_TOL: f64 = 1e-12;

    pub fn passes(&self) -> bool {
        self.triangle_violations == 0 && self.identity_ok && self.separation_ok && self.nonnegative_ok
    }

    pub fn asymmetry_witnessed(&self) -> bool {
        self.max_asymmetry > 0.0
    }
}

/// Checks the axioms over `count` triples drawn from `sampler`.
pub fn verify_axioms(
    q: &dyn QuasiDistance,
    mut sampler: impl FnMut() -> (Point, Point, Point),
    count: usize,
) -> Result<AxiomReport> {
    if count == 0 {
        return Err(Error::invalid("axiom check needs at least one sample"));
    }
    let mut report = AxiomReport {
        samples: count,
        max_triangle_violation: 0.0,
        triangle_violations: 0,
        identity_ok: true,
        separation_ok: true,
        nonnegative_ok: true,
        max_asymmetry: 0.0,
    };
    for _ in 0..count {
        let (x, y, z) = sampler();
        let xy = evaluate(q, &x, &y)?;
        let yz = evaluate(q, &y, &z)?;
        let xz = evaluate(q, &x, &z)?;
        let yx = evaluate(q, &y, &x)?;

        let violation = xz - xy - yz;
        if violation > report.max_triangle_violation {
            report.max_triangle_violation = violation;
        }
        if violation > AxiomReport::TRIANGLE_TOL {
            report.triangle_violations += 1;
        }
        for p in [&x, &y, &z] {
            if q.value(p, p) != 0.0 {
                report.identity_ok = false;
            }
        }
        if [xy, yz, xz, yx].iter().any(|v| *v < 0.0) {
            report.nonnegative_ok = false;
        }
        for (a, b, v) in [(&x, &y, xy), (&y, &z, yz), (&x, &z, xz)] {
            if a != b && v <= 0.0 {
                report.separation_ok = false;
            }
        }
        report.max_asymmetry = report.max_asymmetry.max((xy - yx).abs());
    }
    Ok(report)
}

/// Constants of `β₁‖x − y‖₂ ≤ q(x, y) ≤ β₂‖x − y‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEquivalenceBounds {
    pub beta1: f64,
    pub beta2: f64,
}

/// Relative slack for the sandwich check; equality is attained on axes.
const SANDWICH_RTOL: f64 = 1e-12;

impl NormEquivalenceBounds {
    /// Whether a single pair respects the sandwich.
    pub fn holds(&self, q: &dyn QuasiDistance, x: &[f64], y: &[f64]) -> bool {
        let d = dist2(x, y);
        let v = q.value(x, y);
        let tol = SANDWICH_RTOL * (1.0 + v.abs());
        self.beta1 * d <= v + tol && v <= self.beta2 * d + tol
    }

    /// Number of sampled pairs violating the sandwich.
    pub fn count_violations(
        &self,
        q: &dyn QuasiDistance,
        mut pairs: impl FnMut() -> (Point, Point),
        count: usize,
    ) -> usize {
        (0..count)
            .filter(|_| {
                let (x, y) = pairs();
                !self.holds(q, &x, &y)
            })
            .count()
    }
}

/// `β₁ = min_j min(h₊ʲ, h₋ʲ)` and `β₂ = √n · max_j max(h₊ʲ, h₋ʲ)`.
pub fn equivalence_bounds(q: &AsymmetricWeightedL1) -> NormEquivalenceBounds {
    let all = q.h_plus.iter().chain(&q.h_minus);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(0.0, f64::max);
    let n = q.h_plus.len() as f64;
    NormEquivalenceBounds {
        beta1: lo,
        beta2: n.sqrt() * hi,
    }
}

/// Norm of an element of `∂q(x, ·)(y)`, used by the stopping rule.
pub(crate) fn subgradient_second_norm(q: &dyn QuasiDistance, x: &[f64], y: &[f64], buf: &mut [f64]) -> f64 {
    q.subgradient_second_into(x, y, buf);
    norm2(buf)
}
