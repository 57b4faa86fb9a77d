//! Knowledge-management scenario: an entrepreneur choosing a profile of
//! skilled workers `x ∈ R^l₊`.
//!
//! Profit is `g(x) = p·𝔮(x)^γ·s(x) − Σⱼ wageⱼ·xⱼ` with quantity
//! `𝔮(x) = Σⱼ xⱼ` and complementary quality `s(x) = Πⱼ (1 − e^{−xⱼ})`.
//! The objective minimized is `f(x) = ḡ − g(x)`, with `ḡ` the maximum
//! of `g` over a dense grid of the domain box.

use super::{DomainBox, Objective};
use crate::error::{check_dim, Error, Result};
use crate::quasi_metric::AsymmetricWeightedL1;

/// Largest number of skill types accepted.
pub const MAX_SKILL_TYPES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EntrepreneurScenario {
    /// Per-unit hiring costs.
    pub h_plus: Vec<f64>,
    /// Per-unit firing costs.
    pub h_minus: Vec<f64>,
    pub wages: Vec<f64>,
    pub price: f64,
    /// Exponent γ on quantity. `1` gives revenue linear in headcount.
    pub quantity_exponent: f64,
    /// Box of admissible worker counts (lower bounds must be ≥ 0).
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Points per axis of the grid that computes ḡ.
    pub grid: Option<usize>,
}

impl EntrepreneurScenario {
    pub fn skill_types(&self) -> usize {
        self.wages.len()
    }

    /// Default ḡ grid: 201 points per axis up to three skill types.
    pub fn grid_per_axis(&self) -> usize {
        self.grid.unwrap_or(if self.skill_types() <= 3 { 201 } else { 41 })
    }

    /// The hiring/firing quasi-distance of this scenario.
    pub fn quasi_distance(&self) -> Result<AsymmetricWeightedL1> {
        AsymmetricWeightedL1::new(self.h_plus.clone(), self.h_minus.clone())
    }

    fn validate(&self) -> Result<DomainBox> {
        let l = self.skill_types();
        if l == 0 || l > MAX_SKILL_TYPES {
            return Err(Error::invalid(format!(
                "entrepreneur needs 1..={MAX_SKILL_TYPES} skill types (got {l})"
            )));
        }
        check_dim(l, self.h_plus.len())?;
        check_dim(l, self.h_minus.len())?;
        self.quasi_distance()?;
        if self.wages.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("wages must be finite and nonnegative"));
        }
        if !(self.price.is_finite() && self.price >= 0.0) {
            return Err(Error::invalid("price must be finite and nonnegative"));
        }
        if !(self.quantity_exponent.is_finite() && self.quantity_exponent > 0.0) {
            return Err(Error::invalid("quantity_exponent must be positive"));
        }
        let domain = DomainBox::new(self.lower.clone(), self.upper.clone())?;
        check_dim(l, domain.dim())?;
        if self.lower.iter().any(|v| *v < 0.0) {
            return Err(Error::invalid("worker counts cannot be negative: lower bounds must be >= 0"));
        }
        if self.grid_per_axis() < 2 {
            return Err(Error::invalid("ḡ grid needs at least 2 points per axis"));
        }
        Ok(domain)
    }
}

/// `f = ḡ − g`, with `ḡ` cached at construction.
#[derive(Debug, Clone)]
pub struct Entrepreneur {
    scenario: EntrepreneurScenario,
    domain: DomainBox,
    g_bar: f64,
    grid_argmax: Vec<f64>,
}

/// Builds the payoff, computing ḡ by brute force over the grid.
pub fn build_entrepreneur(scenario: &EntrepreneurScenario) -> Result<Entrepreneur> {
    let domain = scenario.validate()?;
    let mut g_bar = f64::NEG_INFINITY;
    let mut grid_argmax = domain.lower().to_vec();
    domain.for_each_grid_point(scenario.grid_per_axis(), |x| {
        let g = profit(scenario, x);
        if g > g_bar {
            g_bar = g;
            grid_argmax.copy_from_slice(x);
        }
    });
    if !g_bar.is_finite() {
        return Err(Error::invalid("profit is unbounded above on the domain box"));
    }
    Ok(Entrepreneur {
        scenario: scenario.clone(),
        domain,
        g_bar,
        grid_argmax,
    })
}

fn quality_factors(x: &[f64]) -> impl Iterator<Item = f64> + '_ {
    x.iter().map(|v| -(-v).exp_m1())
}

fn profit(s: &EntrepreneurScenario, x: &[f64]) -> f64 {
    let quantity: f64 = x.iter().sum();
    let quality: f64 = quality_factors(x).product();
    let cost: f64 = s.wages.iter().zip(x).map(|(w, v)| w * v).sum();
    s.price * quantity.powf(s.quantity_exponent) * quality - cost
}

impl Entrepreneur {
    pub fn scenario(&self) -> &EntrepreneurScenario {
        &self.scenario
    }

    /// `g(x)`.
    pub fn profit(&self, x: &[f64]) -> f64 {
        profit(&self.scenario, x)
    }

    /// Grid supremum ḡ of the profit.
    pub fn g_bar(&self) -> f64 {
        self.g_bar
    }

    pub fn grid_argmax(&self) -> &[f64] {
        &self.grid_argmax
    }

    fn profit_gradient(&self, x: &[f64], out: &mut [f64]) {
        let s = &self.scenario;
        let gamma = s.quantity_exponent;
        let quantity: f64 = x.iter().sum();
        let factors: Vec<f64> = quality_factors(x).collect();
        let quality: f64 = factors.iter().product();
        // d/dxᵢ 𝔮^γ = γ𝔮^{γ−1}; the product vanishes at least as fast as 𝔮² near 0.
        let quantity_term = if quantity > 0.0 {
            gamma * quantity.powf(gamma - 1.0) * quality
        } else {
            0.0
        };
        let scale = quantity.powf(gamma);
        for i in 0..x.len() {
            let others: f64 = factors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, f)| f)
                .product();
            let quality_term = scale * (-x[i]).exp() * others;
            out[i] = s.price * (quantity_term + quality_term) - s.wages[i];
        }
    }
}

impl Objective for Entrepreneur {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        if self.domain.contains(x) {
            self.g_bar - self.profit(x)
        } else {
            f64::INFINITY
        }
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        self.profit_gradient(x, out);
        for v in out.iter_mut() {
            *v = -*v;
        }
        Ok(())
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn name(&self) -> &str {
        "entrepreneur"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::subgradient_element;

    fn scenario(price: f64, wages: Vec<f64>, gamma: f64) -> EntrepreneurScenario {
        EntrepreneurScenario {
            h_plus: vec![2.0, 1.0],
            h_minus: vec![1.0, 3.0],
            wages,
            price,
            quantity_exponent: gamma,
            lower: vec![0.0, 0.0],
            upper: vec![8.0, 8.0],
            grid: None,
        }
    }

    #[test]
    fn f_is_nonnegative_on_the_grid() {
        let e = build_entrepreneur(&scenario(4.0, vec![1.0, 1.0], 0.5)).unwrap();
        let mut min = f64::INFINITY;
        e.domain().for_each_grid_point(201, |x| min = min.min(e.value(x)));
        assert!(min >= -1e-12);
        assert_eq!(e.value(e.grid_argmax()), 0.0);
    }

    #[test]
    fn constant_profit_gives_zero_payoff() {
        // Zero price and zero wages: g ≡ 0.
        let e = build_entrepreneur(&scenario(0.0, vec![0.0, 0.0], 0.5)).unwrap();
        assert_eq!(e.g_bar(), 0.0);
        assert_eq!(e.value(&[3.0, 1.5]), 0.0);
    }

    #[test]
    fn outside_the_box_is_off_domain() {
        let e = build_entrepreneur(&scenario(4.0, vec![1.0, 1.0], 0.5)).unwrap();
        assert_eq!(e.value(&[-1.0, 1.0]), f64::INFINITY);
        assert!(matches!(
            subgradient_element(&e, &[9.0, 1.0]),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn rejects_bad_scenarios() {
        let mut s = scenario(4.0, vec![1.0, 1.0], 0.5);
        s.lower = vec![-1.0, 0.0];
        assert!(build_entrepreneur(&s).is_err());
        let mut s = scenario(4.0, vec![1.0, 1.0], 0.5);
        s.h_minus = vec![1.0, 0.0];
        assert!(build_entrepreneur(&s).is_err());
        let s = EntrepreneurScenario {
            h_plus: vec![1.0; 5],
            h_minus: vec![1.0; 5],
            wages: vec![1.0; 5],
            lower: vec![0.0; 5],
            upper: vec![1.0; 5],
            ..scenario(4.0, vec![1.0, 1.0], 0.5)
        };
        assert!(build_entrepreneur(&s).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let e = build_entrepreneur(&scenario(4.0, vec![1.0, 0.5], 0.5)).unwrap();
        for x in [[1.0, 2.0], [3.5, 3.6], [0.2, 7.0], [5.0, 0.5]] {
            let w = subgradient_element(&e, &x).unwrap();
            for j in 0..2 {
                let h = 1e-6;
                let mut p = x;
                let mut m = x;
                p[j] += h;
                m[j] -= h;
                let fd = (e.value(&p) - e.value(&m)) / (2.0 * h);
                assert!((fd - w[j]).abs() <= 1e-5 * (1.0 + w[j].abs()), "{x:?} {j}: {fd} vs {}", w[j]);
            }
        }
    }

    #[test]
    fn gradient_is_finite_at_the_origin() {
        let e = build_entrepreneur(&scenario(4.0, vec![1.0, 1.0], 0.5)).unwrap();
        let w = subgradient_element(&e, &[0.0, 0.0]).unwrap();
        assert_eq!(w.coords(), &[1.0, 1.0]);
    }
}
