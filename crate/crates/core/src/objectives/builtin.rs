use std::fmt;

use super::{DomainBox, Objective};
use crate::error::{check_dim, Error, Result};

fn check_positive(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
        Some(j) => Err(Error::invalid(format!("{name}[{j}] must be finite and positive"))),
        None => Ok(()),
    }
}

fn check_finite(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|a| !a.is_finite()) {
        Some(j) => Err(Error::invalid(format!("{name}[{j}] must be finite"))),
        None => Ok(()),
    }
}

/// `f(x) = Σ aⱼ (xⱼ − cⱼ)²`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    weights: Vec<f64>,
    center: Vec<f64>,
    domain: DomainBox,
}

impl Quadratic {
    pub fn new(weights: Vec<f64>, center: Vec<f64>, domain: DomainBox) -> Result<Self> {
        check_dim(domain.dim(), weights.len())?;
        check_dim(domain.dim(), center.len())?;
        check_positive("weights", &weights)?;
        check_finite("center", &center)?;
        Ok(Quadratic { weights, center, domain })
    }

    /// `Σ xⱼ²` on the given box.
    pub fn unit(domain: DomainBox) -> Self {
        let n = domain.dim();
        Quadratic::new(vec![1.0; n], vec![0.0; n], domain).expect("unit weights are valid")
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.weights.iter().zip(&self.center))
            .map(|(v, (a, c))| a * (v - c) * (v - c))
            .sum()
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for j in 0..x.len() {
            out[j] = 2.0 * self.weights[j] * (x[j] - self.center[j]);
        }
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn name(&self) -> &str {
        "quadratic"
    }
}

/// `f(x) = Σ aⱼ |xⱼ − cⱼ|`.
#[derive(Debug, Clone)]
pub struct AbsValue {
    weights: Vec<f64>,
    center: Vec<f64>,
    kinks: Vec<[f64; 1]>,
    domain: DomainBox,
}

impl AbsValue {
    pub fn new(weights: Vec<f64>, center: Vec<f64>, domain: DomainBox) -> Result<Self> {
        check_dim(domain.dim(), weights.len())?;
        check_dim(domain.dim(), center.len())?;
        check_positive("weights", &weights)?;
        check_finite("center", &center)?;
        let kinks = center.iter().map(|c| [*c]).collect();
        Ok(AbsValue { weights, center, kinks, domain })
    }

    pub fn unit(domain: DomainBox) -> Self {
        let n = domain.dim();
        AbsValue::new(vec![1.0; n], vec![0.0; n], domain).expect("unit weights are valid")
    }
}

impl Objective for AbsValue {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.weights.iter().zip(&self.center))
            .map(|(v, (a, c))| a * (v - c).abs())
            .sum()
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for j in 0..x.len() {
            let d = x[j] - self.center[j];
            out[j] = if d > 0.0 {
                self.weights[j]
            } else if d < 0.0 {
                -self.weights[j]
            } else {
                0.0
            };
        }
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn coordinate_kinks(&self, j: usize) -> &[f64] {
        &self.kinks[j]
    }

    fn name(&self) -> &str {
        "abs"
    }
}

/// `f(x) = Σ (xⱼ² − 1)²`, with wells at `xⱼ = ±1` and a local max at 0.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    domain: DomainBox,
}

impl DoubleWell {
    pub fn new(domain: DomainBox) -> Self {
        DoubleWell { domain }
    }
}

impl Objective for DoubleWell {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| (v * v - 1.0) * (v * v - 1.0)).sum()
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for j in 0..x.len() {
            out[j] = 4.0 * x[j] * (x[j] * x[j] - 1.0);
        }
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn name(&self) -> &str {
        "double_well"
    }
}

/// `f(x) = Σ aⱼ (xⱼ − cⱼ)² + μ Σ |xⱼ|`.
#[derive(Debug, Clone)]
pub struct L1Quadratic {
    weights: Vec<f64>,
    center: Vec<f64>,
    mu: f64,
    domain: DomainBox,
}

const ZERO_KINK: [f64; 1] = [0.0];

impl L1Quadratic {
    pub fn new(weights: Vec<f64>, center: Vec<f64>, mu: f64, domain: DomainBox) -> Result<Self> {
        check_dim(domain.dim(), weights.len())?;
        check_dim(domain.dim(), center.len())?;
        check_positive("weights", &weights)?;
        check_finite("center", &center)?;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::invalid(format!("mu must be finite and nonnegative (got {mu})")));
        }
        Ok(L1Quadratic { weights, center, mu, domain })
    }

    /// Closed-form minimizer: soft-thresholding of the center.
    pub fn minimizer(&self) -> Vec<f64> {
        self.center
            .iter()
            .zip(&self.weights)
            .map(|(c, a)| {
                let t = self.mu / (2.0 * a);
                c.signum() * (c.abs() - t).max(0.0)
            })
            .collect()
    }
}

impl Objective for L1Quadratic {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.weights.iter().zip(&self.center))
            .map(|(v, (a, c))| a * (v - c) * (v - c) + self.mu * v.abs())
            .sum()
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for j in 0..x.len() {
            let smooth = 2.0 * self.weights[j] * (x[j] - self.center[j]);
            out[j] = if x[j] > 0.0 {
                smooth + self.mu
            } else if x[j] < 0.0 {
                smooth - self.mu
            } else {
                // Nearest point to 0 of [smooth − μ, smooth + μ].
                smooth.signum() * (smooth.abs() - self.mu).max(0.0)
            };
        }
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn coordinate_kinks(&self, _j: usize) -> &[f64] {
        if self.mu > 0.0 {
            &ZERO_KINK
        } else {
            &[]
        }
    }

    fn name(&self) -> &str {
        "l1_quadratic"
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Objective assembled from closures.
pub struct FnObjective {
    name: String,
    domain: DomainBox,
    value: Box<ValueFn>,
    grad: Box<GradFn>,
    kinks: Vec<Vec<f64>>,
}

impl FnObjective {
    pub fn new(
        name: impl Into<String>,
        domain: DomainBox,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        let n = domain.dim();
        FnObjective {
            name: name.into(),
            domain,
            value: Box::new(value),
            grad: Box::new(grad),
            kinks: vec![Vec::new(); n],
        }
    }

    /// Declares kink locations along coordinate `j`.
    pub fn with_kinks(mut self, j: usize, kinks: Vec<f64>) -> Self {
        self.kinks[j] = kinks;
        self
    }
}

impl fmt::Debug for FnObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObjective")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if !(self.value)(x).is_finite() {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        (self.grad)(x, out);
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn coordinate_kinks(&self, j: usize) -> &[f64] {
        &self.kinks[j]
    }

    fn name(&self) -> &str {
        &self.name
    }
}
