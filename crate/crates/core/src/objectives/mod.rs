//! "To be decreased" payoffs `f` with limiting-subgradient element oracles.

mod builtin;
mod entrepreneur;
mod kl;

pub use builtin::{AbsValue, DoubleWell, FnObjective, L1Quadratic, Quadratic};
pub use entrepreneur::{build_entrepreneur, Entrepreneur, EntrepreneurScenario};
pub use kl::{kl_empirical_check, KlDescriptor, KlReport, KlStatus};

use crate::error::{check_dim, Error, Result};
use crate::point::{norm2, Point};

/// Axis-aligned box used by grid oracles and samplers.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::invalid("domain box needs at least one coordinate"));
        }
        check_dim(lower.len(), upper.len())?;
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::invalid(format!(
                    "domain box coordinate {j}: need finite lower < upper (got [{l}, {u}])"
                )));
            }
        }
        Ok(DomainBox { lower, upper })
    }

    /// `[-half_width, half_width]^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        DomainBox::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn clamp_coord(&self, j: usize, v: f64) -> f64 {
        v.clamp(self.lower[j], self.upper[j])
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    /// Uniform grid with `per_axis` points per coordinate, endpoints included.
    pub fn grid_axis(&self, j: usize, per_axis: usize) -> Vec<f64> {
        let last = (per_axis - 1) as f64;
        (0..per_axis)
            .map(|i| {
                if i + 1 == per_axis {
                    self.upper[j]
                } else {
                    self.lower[j] + self.width(j) * i as f64 / last
                }
            })
            .collect()
    }

    /// Visits every point of the tensor grid, last coordinate fastest.
    pub fn for_each_grid_point(&self, per_axis: usize, mut visit: impl FnMut(&[f64])) {
        let axes: Vec<Vec<f64>> = (0..self.dim()).map(|j| self.grid_axis(j, per_axis)).collect();
        let mut idx = vec![0usize; self.dim()];
        let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        loop {
            visit(&point);
            let mut j = self.dim();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < per_axis {
                    point[j] = axes[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                point[j] = axes[j][0];
            }
        }
    }
}

/// A proper lower semicontinuous payoff with a subgradient element oracle.
///
/// `subgradient_into` writes the minimal-norm element of `∂f(x)` where the
/// oracle can identify it (kinks of separable terms), and the gradient at
/// smooth points.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x)`; `+∞` outside `dom f`.
    fn value(&self, x: &[f64]) -> f64;

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    /// Box over which grid oracles and samplers operate.
    fn domain(&self) -> &DomainBox;

    /// Coordinate values where `f` has a kink along coordinate `j`.
    fn coordinate_kinks(&self, _j: usize) -> &[f64] {
        &[]
    }

    fn bounded_below(&self) -> bool {
        true
    }

    fn name(&self) -> &str;
}

/// `f(x)`, checking the dimension.
pub fn value(obj: &dyn Objective, x: &[f64]) -> Result<f64> {
    check_dim(obj.dim(), x.len())?;
    Ok(obj.value(x))
}

/// One element of `∂f(x)`; errors with [`Error::OutsideDomain`] off `dom f`.
pub fn subgradient_element(obj: &dyn Objective, x: &[f64]) -> Result<Point> {
    check_dim(obj.dim(), x.len())?;
    let mut out = vec![0.0; x.len()];
    obj.subgradient_into(x, &mut out)?;
    Ok(Point::from(out))
}

/// `‖w‖` for the oracle's minimal-norm selection; 0 certifies `0 ∈ ∂f(x)`.
pub fn critical_residual(obj: &dyn Objective, x: &[f64]) -> Result<f64> {
    Ok(subgradient_element(obj, x)?.norm())
}

pub(crate) fn residual_with(obj: &dyn Objective, x: &[f64], buf: &mut [f64]) -> Result<f64> {
    obj.subgradient_into(x, buf)?;
    Ok(norm2(buf))
}
