//! Empirical Kurdyka–Łojasiewicz checks with the power desingularizer
//! `φ(s) = c·s^{1−θ}`.

use super::{residual_with, Objective};
use crate::error::{check_dim, Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct KlDescriptor {
    theta: f64,
    c: f64,
    eta: f64,
    reference: Point,
}

impl KlDescriptor {
    pub fn new(theta: f64, c: f64, eta: f64, reference: Point) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::invalid(format!("theta must lie in (0, 1) (got {theta})")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("c must be positive (got {c})")));
        }
        if !(eta > 0.0) {
            return Err(Error::invalid(format!("eta must be positive (got {eta})")));
        }
        Ok(KlDescriptor { theta, c, eta, reference })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn reference(&self) -> &Point {
        &self.reference
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.c * s.powf(1.0 - self.theta)
    }

    pub fn phi_prime(&self, s: f64) -> f64 {
        self.c * (1.0 - self.theta) * s.powf(-self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Pass,
    Fail,
    /// No sample fell in the band `f(x̄) < f < f(x̄) + η`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlReport {
    pub status: KlStatus,
    /// `min φ'(f(x) − f(x̄))·dist(0, ∂f(x))` over valid samples.
    pub min_statistic: f64,
    pub max_statistic: f64,
    pub valid_samples: usize,
    pub drawn: usize,
}

/// Pass threshold on the minimum statistic.
pub const KL_PASS: f64 = 1.0 - 1e-9;

/// Evaluates the KL statistic on `count` draws, keeping those in the band.
///
/// `dist(0, ∂f(x))` is approximated by the norm of the oracle's
/// minimal-norm element.
pub fn kl_empirical_check(
    obj: &dyn Objective,
    desc: &KlDescriptor,
    mut sampler: impl FnMut() -> Point,
    count: usize,
) -> Result<KlReport> {
    check_dim(obj.dim(), desc.reference.dim())?;
    let f_ref = obj.value(&desc.reference);
    let mut buf = vec![0.0; obj.dim()];
    let mut min_statistic = f64::INFINITY;
    let mut max_statistic = f64::NEG_INFINITY;
    let mut valid = 0;
    for _ in 0..count {
        let x = sampler();
        check_dim(obj.dim(), x.dim())?;
        let gap = obj.value(&x) - f_ref;
        if !(gap > 0.0 && gap < desc.eta) {
            continue;
        }
        let dist = match residual_with(obj, &x, &mut buf) {
            Ok(d) => d,
            Err(Error::OutsideDomain(_)) => continue,
            Err(e) => return Err(e),
        };
        let stat = desc.phi_prime(gap) * dist;
        min_statistic = min_statistic.min(stat);
        max_statistic = max_statistic.max(stat);
        valid += 1;
    }
    let status = if valid == 0 {
        KlStatus::Inconclusive
    } else if min_statistic >= KL_PASS {
        KlStatus::Pass
    } else {
        KlStatus::Fail
    };
    Ok(KlReport {
        status,
        min_statistic,
        max_statistic,
        valid_samples: valid,
        drawn: count,
    })
}
